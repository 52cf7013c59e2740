#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace daqc {

using cplx = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXc = Matrix<cplx>;
using VectorXc = Vector<cplx>;

/// Thrown when a dimension or size argument is out of range.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an input violates a documented precondition.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Non-negative remainder.
inline int mod(long long x, int d) {
  long long r = x % d;
  return static_cast<int>(r < 0 ? r + d : r);
}

/// exp(2 pi i e / d) with the exponent reduced first so repeated products do not drift.
template <typename Real = double>
std::complex<Real> root_of_unity(int d, long long e) {
  const Real two_pi = Real(2) * Real(3.14159265358979323846264338327950288L);
  const int r = mod(e, d);
  if (r == 0) return {Real(1), Real(0)};
  if (2 * r == d) return {Real(-1), Real(0)};
  if (4 * r == d) return {Real(0), Real(1)};
  if (4 * r == 3 * d) return {Real(0), Real(-1)};
  const Real arg = two_pi * Real(r) / Real(d);
  return {std::cos(arg), std::sin(arg)};
}

}  // namespace daqc
