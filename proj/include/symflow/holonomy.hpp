#pragma once

#include <array>
#include <string>
#include <string_view>

#include "symflow/linalg2.hpp"

namespace symflow {

enum class HolonomyClass { Elliptic, Parabolic, Hyperbolic };

std::string_view to_string(HolonomyClass c);

/// Mapping class of a torus bundle: an integer 2x2 matrix of determinant one.
class Holonomy {
 public:
  /// Throws ErrorKind::InvalidArgument unless det == 1.
  Holonomy(long a, long b, long c, long d);
  static Holonomy identity() { return {1, 0, 0, 1}; }

  const std::array<long, 4>& entries() const { return entries_; }
  long trace() const { return entries_[0] + entries_[3]; }
  HolonomyClass classification() const;

  /// Order of the element when elliptic (1, 2, 3, 4 or 6), otherwise 0.
  int finite_order() const;

  Mat2 matrix() const {
    return {double(entries_[0]), double(entries_[1]), double(entries_[2]),
            double(entries_[3])};
  }

  std::string str() const;

  friend bool operator==(const Holonomy&, const Holonomy&) = default;

 private:
  std::array<long, 4> entries_;
};

/// Real logarithm of +/-H chosen so that exp(y*log) interpolates from I to a
/// matrix whose conjugation action equals that of H. Used to build initial data
/// obeying G(y+1) = H^T G(y) H.
Mat2 conjugation_log(const Mat2& h);

/// exp of a general real 2x2 matrix (closed form).
Mat2 mat_exp(const Mat2& m);

}  // namespace symflow
