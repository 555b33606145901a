#pragma once

/// Shared vector types and error classes for the lpbm toolkit.
///
/// Every geometric object in the library lives in dimension 2 or 3, so points
/// and directions use Eigen vectors with a runtime size bounded by 3. They are
/// stack allocated and cheap to copy.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lpbm {

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

/// A violated precondition. `invariant()` names the condition that failed so
/// front ends can report it verbatim.
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(std::string invariant, const std::string& what)
      : std::invalid_argument(invariant + ": " + what), invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// A geometric construction that degenerated (lower-dimensional hull, empty slab, ...).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const char* invariant, const std::string& what) {
  if (!cond) throw PreconditionError(invariant, what);
}

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Vec unit_vec(int dim, int axis) {
  Vec v = Vec::Zero(dim);
  v[axis] = 1.0;
  return v;
}

inline Eigen::Vector3d to3(const Vec& v) { return Eigen::Vector3d(v[0], v[1], v[2]); }

/// Volume of the unit ball, κ_n.
inline double unit_ball_volume(int dim) {
  return std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

/// Surface area of the unit sphere S^{n-1}, n·κ_n.
inline double unit_sphere_area(int dim) { return dim * unit_ball_volume(dim); }

/// True when p lies within 1e-12 of an even integer.
inline bool is_even_integer(double p) {
  const double r = std::round(p);
  return std::abs(p - r) < 1e-12 && static_cast<long long>(r) % 2 == 0;
}

}  // namespace lpbm
