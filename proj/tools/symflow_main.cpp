// symflow command-line tool. Links only the C interface.
//
// Exit codes: 0 pass, 2 verification failure, 3 configuration or usage
// error, 4 numerical failure.

#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symflow/symflow.h"

namespace {

constexpr int kPass = 0;
constexpr int kVerifyFail = 2;
constexpr int kConfigError = 3;
constexpr int kNumericalFail = 4;

int exit_code(symflow_status s) {
  switch (s) {
    case SYMFLOW_OK: return kPass;
    case SYMFLOW_ERR_NUMERICAL:
    case SYMFLOW_ERR_INVALID_STATE: return kNumericalFail;
    default: return kConfigError;
  }
}

int report_error(symflow_status s) {
  std::cerr << "symflow: " << symflow_last_error() << '\n';
  return exit_code(s);
}

std::string report_text(const symflow_report* r) {
  size_t needed = 0;
  symflow_report_text(r, nullptr, 0, &needed);
  std::string text(needed, '\0');
  symflow_report_text(r, text.data(), text.size(), &needed);
  text.resize(needed - 1);
  return text;
}

std::string config_text(const symflow_config* c) {
  size_t needed = 0;
  symflow_config_serialize(c, nullptr, 0, &needed);
  std::string text(needed, '\0');
  symflow_config_serialize(c, text.data(), text.size(), &needed);
  text.resize(needed - 1);
  return text;
}

void print_fit(const symflow_fit& f) {
  std::printf("fit %s: slope %.6g, intercept %.6g, R^2 %.6f, samples %zu, value %.6g",
              f.kind, f.slope, f.intercept, f.r2, f.samples, f.value);
  if (f.has_reference) std::printf(", reference %.6g", f.reference);
  std::printf(", %s\n", f.pass < 0 ? "reported" : (f.pass ? "pass" : "FAIL"));
}

struct RunArgs {
  std::string config_path;
  std::string preset;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool print_config = false;
};

int cmd_run(const RunArgs& a) {
  symflow_config* cfg = nullptr;
  symflow_status s = a.config_path.empty() ? symflow_config_preset(a.preset.c_str(), &cfg)
                                           : symflow_config_load(a.config_path.c_str(), &cfg);
  if (s != SYMFLOW_OK) return report_error(s);
  for (const auto& o : a.overrides) {
    if ((s = symflow_config_override(cfg, o.c_str())) != SYMFLOW_OK) {
      symflow_config_free(cfg);
      return report_error(s);
    }
  }
  if (!a.out_dir.empty()) {
    const std::string o = "output.dir=" + a.out_dir;
    if ((s = symflow_config_override(cfg, o.c_str())) != SYMFLOW_OK) {
      symflow_config_free(cfg);
      return report_error(s);
    }
  }
  if (a.print_config) {
    std::cout << config_text(cfg);
    symflow_config_free(cfg);
    return kPass;
  }

  symflow_run* run = nullptr;
  s = symflow_run_scenario(cfg, &run);
  symflow_config_free(cfg);
  if (s != SYMFLOW_OK) return report_error(s);

  std::printf("stop_reason %s after %zu steps, %zu records\n", symflow_run_stop_reason(run),
              symflow_run_accepted_steps(run), symflow_run_record_count(run));
  const symflow_report* rep = symflow_run_report(run);
  std::cout << report_text(rep);
  for (size_t i = 0; i < symflow_run_fit_count(run); ++i) {
    symflow_fit f;
    if (symflow_run_fit(run, i, &f) == SYMFLOW_OK) print_fit(f);
  }
  symflow_singularity sing;
  if (symflow_run_singularity(run, &sing) == SYMFLOW_OK)
    std::printf("singularity T %.6g, normalized curvature [%.6g, %.6g], roundness %.6g\n",
                sing.t_singular, sing.normalized_min, sing.normalized_max, sing.roundness);

  int code = symflow_run_passed(run) ? kPass : kVerifyFail;
  if (code != kPass && std::strcmp(symflow_run_stop_reason(run), "step_underflow") == 0) {
    for (size_t i = 0; i < symflow_report_check_count(rep); ++i) {
      symflow_check c;
      symflow_report_check(rep, i, &c);
      if (std::strcmp(c.name, "stop_reason") == 0 && c.status == SYMFLOW_CHECK_FAIL)
        code = kNumericalFail;
    }
  }
  symflow_run_free(run);
  return code;
}

int cmd_verify(const std::string& dir, const std::string& config_path) {
  symflow_config* cfg = nullptr;
  if (!config_path.empty()) {
    const symflow_status s = symflow_config_load(config_path.c_str(), &cfg);
    if (s != SYMFLOW_OK) return report_error(s);
  }
  symflow_report* rep = nullptr;
  const symflow_status s = symflow_verify_dir(dir.c_str(), cfg, &rep);
  symflow_config_free(cfg);
  if (s != SYMFLOW_OK) return report_error(s);
  std::cout << report_text(rep);
  const int code = symflow_report_passed(rep) ? kPass : kVerifyFail;
  symflow_report_free(rep);
  return code;
}

int cmd_fit(const std::string& dir, const std::vector<std::string>& kinds) {
  int code = kPass;
  for (const auto& k : kinds) {
    symflow_fit f;
    const symflow_status s = symflow_fit_dir(dir.c_str(), k.c_str(), &f);
    if (s != SYMFLOW_OK) return report_error(s);
    print_fit(f);
    if (f.pass == 0) code = kVerifyFail;
  }
  return code;
}

int cmd_rescale(const std::string& in, const std::string& out, double factor,
                const std::string& kind) {
  const symflow_status s =
      symflow_rescale_dir(in.c_str(), out.c_str(), factor, kind.empty() ? nullptr : kind.c_str());
  if (s != SYMFLOW_OK) return report_error(s);
  std::printf("rescaled %s by %g into %s\n", in.c_str(), factor, out.c_str());
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetry-reduced Ricci flow simulator and bound verifier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", symflow_version());

  app.add_subcommand("presets", "List built-in scenario presets");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a scenario, verify it and write its outputs");
  auto* src = run->add_option_group("source");
  src->add_option("-c,--config", run_args.config_path, "Configuration file")
      ->check(CLI::ExistingFile);
  src->add_option("-p,--preset", run_args.preset, "Built-in preset");
  src->require_option(1);
  run->add_option("-s,--set", run_args.overrides, "Override, section.key=value (repeatable)");
  run->add_option("-o,--out", run_args.out_dir, "Output directory");
  run->add_flag("--print-config", run_args.print_config,
                "Print the resolved configuration and exit");

  std::string verify_dir, verify_config;
  auto* verify = app.add_subcommand("verify", "Re-check bounds on a stored trajectory");
  verify->add_option("dir", verify_dir, "Trajectory directory")->required();
  verify->add_option("-c,--config", verify_config, "Configuration supplying tolerances")
      ->check(CLI::ExistingFile);

  std::string fit_dir;
  std::vector<std::string> fit_kinds;
  auto* fit = app.add_subcommand("fit", "Fit asymptotics of a stored trajectory");
  fit->add_option("dir", fit_dir, "Trajectory directory")->required();
  fit->add_option("-k,--kind", fit_kinds,
                  "exp-flat, sol-power, growth-exponent or curvature-decay (repeatable)")
      ->required();

  std::string rs_in, rs_out, rs_kind;
  double rs_factor = 1.0;
  auto* rescale = app.add_subcommand("rescale", "Parabolically rescale a stored trajectory");
  rescale->add_option("in", rs_in, "Input trajectory directory")->required();
  rescale->add_option("out", rs_out, "Output trajectory directory")->required();
  rescale->add_option("-f,--factor", rs_factor, "Scale factor s > 0")->required();
  rescale->add_option("-k,--kind", rs_kind, "warped-2d, warped-3d or bundle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (app.got_subcommand("presets")) {
    for (size_t i = 0; i < symflow_preset_count(); ++i) std::puts(symflow_preset_name(i));
    return kPass;
  }
  if (run->parsed()) return cmd_run(run_args);
  if (verify->parsed()) return cmd_verify(verify_dir, verify_config);
  if (fit->parsed()) return cmd_fit(fit_dir, fit_kinds);
  return cmd_rescale(rs_in, rs_out, rs_factor, rs_kind);
}
