#include "symflow/symflow.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <string>

#include "symflow/error.hpp"
#include "symflow/scenario.hpp"

struct symflow_config {
  symflow::RunConfig config;
};

struct symflow_report {
  symflow::VerificationReport report;
};

struct symflow_run {
  symflow::ScenarioResult result;
  symflow_report report;
  std::string stop_reason;
};

namespace {

thread_local std::string last_error;

symflow_status status_of(symflow::ErrorKind k) {
  switch (k) {
    case symflow::ErrorKind::InvalidArgument: return SYMFLOW_ERR_INVALID_ARGUMENT;
    case symflow::ErrorKind::InvalidState: return SYMFLOW_ERR_INVALID_STATE;
    case symflow::ErrorKind::Config: return SYMFLOW_ERR_CONFIG;
    case symflow::ErrorKind::Numerical: return SYMFLOW_ERR_NUMERICAL;
    case symflow::ErrorKind::Io: return SYMFLOW_ERR_IO;
  }
  return SYMFLOW_ERR_INTERNAL;
}

template <class F>
symflow_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return SYMFLOW_OK;
  } catch (const symflow::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SYMFLOW_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SYMFLOW_ERR_INTERNAL;
  }
}

symflow_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return SYMFLOW_ERR_INVALID_ARGUMENT;
}

symflow_status copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (cap > 0) {
    if (!buf) return null_argument("buf");
    const size_t n = std::min(cap - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
  last_error.clear();
  return SYMFLOW_OK;
}

void fill_fit(const symflow::FitReport& f, symflow_fit* out) {
  out->kind = symflow::to_string(f.kind).data();
  out->slope = f.slope;
  out->intercept = f.intercept;
  out->r2 = f.r2;
  out->samples = f.samples;
  out->value = f.value;
  out->has_reference = f.reference.has_value();
  out->reference = f.reference.value_or(0.0);
  out->pass = f.pass ? (*f.pass ? 1 : 0) : -1;
}

symflow_status new_config(symflow::RunConfig c, symflow_config** out) {
  *out = new symflow_config{std::move(c)};
  return SYMFLOW_OK;
}

}  // namespace

extern "C" {

const char* symflow_version(void) { return "1.0.0"; }

const char* symflow_last_error(void) { return last_error.c_str(); }

size_t symflow_preset_count(void) { return symflow::preset_names().size(); }

const char* symflow_preset_name(size_t index) {
  const auto& names = symflow::preset_names();
  return index < names.size() ? names[index].data() : nullptr;
}

symflow_status symflow_config_preset(const char* name, symflow_config** out) {
  if (!name) return null_argument("name");
  if (!out) return null_argument("out");
  return guarded([&] { new_config(symflow::preset(name), out); });
}

symflow_status symflow_config_parse(const char* text, symflow_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  return guarded([&] { new_config(symflow::parse_config(text), out); });
}

symflow_status symflow_config_load(const char* path, symflow_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] { new_config(symflow::load_config(path), out); });
}

symflow_status symflow_config_override(symflow_config* c, const char* assignment) {
  if (!c) return null_argument("config");
  if (!assignment) return null_argument("assignment");
  return guarded([&] {
    symflow::RunConfig next = c->config;
    symflow::apply_override(next, assignment);
    c->config = std::move(next);
  });
}

symflow_status symflow_config_serialize(const symflow_config* c, char* buf, size_t cap,
                                        size_t* needed) {
  if (!c) return null_argument("config");
  std::string text;
  const symflow_status s = guarded([&] { text = symflow::serialize_config(c->config); });
  return s == SYMFLOW_OK ? copy_out(text, buf, cap, needed) : s;
}

void symflow_config_free(symflow_config* c) { delete c; }

symflow_status symflow_run_scenario(const symflow_config* c, symflow_run** out) {
  if (!c) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto* r = new symflow_run{symflow::run_scenario(c->config), {}, {}};
    r->report.report = r->result.report;
    r->stop_reason = std::string(symflow::to_string(r->result.stop_reason()));
    *out = r;
  });
}

size_t symflow_run_record_count(const symflow_run* r) {
  if (!r) return 0;
  return std::visit([](const auto& t) { return t.records.size(); }, r->result.stored.trajectory);
}

symflow_status symflow_run_record(const symflow_run* r, size_t index, symflow_record* out) {
  if (!r) return null_argument("run");
  if (!out) return null_argument("out");
  const auto& recs = std::visit([](const auto& t) -> const auto& { return t.records; },
                                r->result.stored.trajectory);
  if (index >= recs.size()) {
    last_error = "record index out of range";
    return SYMFLOW_ERR_INVALID_ARGUMENT;
  }
  const auto& d = recs[index];
  *out = symflow_record{d.t,        d.dt,       d.V,     d.E,
                        d.min_S,    d.max_gradu_sq, d.max_riem, d.gauss_bonnet,
                        d.L,        d.detG_min, d.detG_max, d.max_energy_density,
                        d.W_plus.value_or(0.0), d.W_plus.has_value(), d.u_min, d.u_max};
  last_error.clear();
  return SYMFLOW_OK;
}

const char* symflow_run_stop_reason(const symflow_run* r) {
  return r ? r->stop_reason.c_str() : nullptr;
}

size_t symflow_run_accepted_steps(const symflow_run* r) {
  if (!r) return 0;
  return std::visit([](const auto& t) { return static_cast<size_t>(t.accepted_steps); },
                    r->result.stored.trajectory);
}

const symflow_report* symflow_run_report(const symflow_run* r) {
  return r ? &r->report : nullptr;
}

size_t symflow_run_fit_count(const symflow_run* r) { return r ? r->result.fits.size() : 0; }

symflow_status symflow_run_fit(const symflow_run* r, size_t index, symflow_fit* out) {
  if (!r) return null_argument("run");
  if (!out) return null_argument("out");
  if (index >= r->result.fits.size()) {
    last_error = "fit index out of range";
    return SYMFLOW_ERR_INVALID_ARGUMENT;
  }
  fill_fit(r->result.fits[index], out);
  last_error.clear();
  return SYMFLOW_OK;
}

symflow_status symflow_run_singularity(const symflow_run* r, symflow_singularity* out) {
  if (!r) return null_argument("run");
  if (!out) return null_argument("out");
  if (!r->result.singularity) {
    last_error = "run produced no singularity profile";
    return SYMFLOW_ERR_INVALID_STATE;
  }
  const auto& s = *r->result.singularity;
  *out = symflow_singularity{s.t_singular, s.normalized_min, s.normalized_max, s.roundness,
                             s.u_oscillation};
  last_error.clear();
  return SYMFLOW_OK;
}

int symflow_run_passed(const symflow_run* r) { return r && r->result.passed() ? 1 : 0; }

void symflow_run_free(symflow_run* r) { delete r; }

symflow_status symflow_verify_dir(const char* dir, const symflow_config* c,
                                  symflow_report** out) {
  if (!dir) return null_argument("dir");
  if (!out) return null_argument("out");
  return guarded([&] {
    const symflow::StoredTrajectory t = symflow::read_trajectory(dir);
    const symflow::VerifyOptions opt = c ? c->config.verify : symflow::VerifyOptions{};
    *out = new symflow_report{symflow::verify_stored(t, opt)};
  });
}

size_t symflow_report_check_count(const symflow_report* r) {
  return r ? r->report.checks.size() : 0;
}

symflow_status symflow_report_check(const symflow_report* r, size_t index,
                                    symflow_check* out) {
  if (!r) return null_argument("report");
  if (!out) return null_argument("out");
  if (index >= r->report.checks.size()) {
    last_error = "check index out of range";
    return SYMFLOW_ERR_INVALID_ARGUMENT;
  }
  const auto& c = r->report.checks[index];
  out->name = c.name.c_str();
  out->status = c.status == symflow::CheckStatus::Pass   ? SYMFLOW_CHECK_PASS
                : c.status == symflow::CheckStatus::Fail ? SYMFLOW_CHECK_FAIL
                                                         : SYMFLOW_CHECK_NOT_APPLICABLE;
  out->worst_margin = c.worst_margin;
  out->time_of_worst = c.time_of_worst;
  out->diagnostic = c.diagnostic ? 1 : 0;
  out->detail = c.detail.c_str();
  last_error.clear();
  return SYMFLOW_OK;
}

int symflow_report_passed(const symflow_report* r) { return r && r->report.passed() ? 1 : 0; }

symflow_status symflow_report_text(const symflow_report* r, char* buf, size_t cap,
                                   size_t* needed) {
  if (!r) return null_argument("report");
  return copy_out(symflow::report_text(r->report), buf, cap, needed);
}

void symflow_report_free(symflow_report* r) { delete r; }

symflow_status symflow_fit_dir(const char* dir, const char* kind, symflow_fit* out) {
  if (!dir) return null_argument("dir");
  if (!kind) return null_argument("kind");
  if (!out) return null_argument("out");
  return guarded([&] {
    const symflow::FitKind k = symflow::parse_fit_kind(kind);
    fill_fit(symflow::fit_stored(symflow::read_trajectory(dir), k), out);
  });
}

symflow_status symflow_rescale_dir(const char* in_dir, const char* out_dir, double factor,
                                   const char* kind) {
  if (!in_dir) return null_argument("in_dir");
  if (!out_dir) return null_argument("out_dir");
  return guarded([&] {
    if (!(factor > 0) || !std::isfinite(factor))
      symflow::fail(symflow::ErrorKind::InvalidArgument, "rescale factor must be positive");
    symflow::StoredTrajectory t = symflow::read_trajectory(in_dir);
    const std::string k = kind ? kind : "";
    if (auto* w = std::get_if<symflow::WarpedTrajectory>(&t.trajectory)) {
      symflow::RescaleKind rk = symflow::RescaleKind::Warped2d;
      if (k == "warped-3d")
        rk = symflow::RescaleKind::Warped3d;
      else if (!k.empty() && k != "warped-2d")
        symflow::fail(symflow::ErrorKind::InvalidArgument,
                      "rescale kind '" + k + "' does not apply to a warped trajectory");
      t.trajectory = symflow::parabolic_rescale(*w, factor, rk);
    } else {
      if (!k.empty() && k != "bundle")
        symflow::fail(symflow::ErrorKind::InvalidArgument,
                      "rescale kind '" + k + "' does not apply to a bundle trajectory");
      t.trajectory =
          symflow::parabolic_rescale(std::get<symflow::BundleTrajectory>(t.trajectory), factor);
    }
    if (t.context.time_origin) *t.context.time_origin /= factor;
    symflow::write_trajectory(out_dir, t, true);
  });
}

}  // extern "C"
