#include "daqc/weyl.hpp"

#include <cmath>

namespace daqc {

std::string to_string(const WeylLabel& l) {
  return "(" + std::to_string(l.a) + "," + std::to_string(l.b) + ")";
}

void check_dimension(int d) {
  if (d < 2) throw DimensionError("qudit dimension must be >= 2, got " + std::to_string(d));
}

void check_label(const WeylLabel& l, int d) {
  if (!l.valid_for(d))
    throw PreconditionError("Weyl label " + to_string(l) + " is not reduced mod " + std::to_string(d));
}

cplx conjugation_phase(int d, const WeylLabel& target, const WeylLabel& conjugator) {
  check_label(target, d);
  check_label(conjugator, d);
  return root_of_unity(d, conjugation_exponent(d, target, conjugator));
}

PhasedLabel weyl_product(int d, const WeylLabel& left, const WeylLabel& right) {
  check_label(left, d);
  check_label(right, d);
  return {mod(1LL * right.a * left.b, d), add(left, right, d)};
}

std::pair<cplx, WeylLabel> weyl_product_phase(int d, const WeylLabel& left, const WeylLabel& right) {
  auto p = weyl_product(d, left, right);
  return {p.phase(d), p.label};
}

PhasedLabel weyl_dagger(int d, const WeylLabel& l) {
  check_label(l, d);
  return {mod(1LL * l.a * l.b, d), negate(l, d)};
}

char axis_name(SpinAxis axis) {
  switch (axis) {
    case SpinAxis::x: return 'x';
    case SpinAxis::y: return 'y';
    case SpinAxis::z: return 'z';
  }
  return '?';
}

SpinAxis parse_axis(char c) {
  switch (c) {
    case 'x': case 'X': return SpinAxis::x;
    case 'y': case 'Y': return SpinAxis::y;
    case 'z': case 'Z': return SpinAxis::z;
  }
  throw PreconditionError(std::string("unknown spin axis '") + c + "'");
}

MatrixXc spin_operator(int d, SpinAxis axis) {
  check_dimension(d);
  const double s = 0.5 * (d - 1);
  MatrixXc out = MatrixXc::Zero(d, d);
  if (axis == SpinAxis::z) {
    for (int k = 0; k < d; ++k) out(k, k) = s - k;
    return out;
  }
  // S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>; level k holds m = s - k
  MatrixXc raise = MatrixXc::Zero(d, d);
  for (int k = 1; k < d; ++k) {
    const double m = s - k;
    raise(k - 1, k) = std::sqrt(s * (s + 1) - m * (m + 1));
  }
  if (axis == SpinAxis::x) return 0.5 * (raise + raise.adjoint());
  return cplx(0, -0.5) * (raise - raise.adjoint());
}

std::pair<int, SpinAxis> levi_civita(SpinAxis mu, SpinAxis nu) {
  const int m = static_cast<int>(mu), n = static_cast<int>(nu);
  if (m == n) return {0, mu};
  const int e = 3 - m - n;
  const int sign = ((n - m + 3) % 3 == 1) ? 1 : -1;
  return {sign, static_cast<SpinAxis>(e)};
}

MatrixXc spin_conjugate(int d, SpinAxis mu, SpinAxis nu, double theta) {
  const MatrixXc s_mu = spin_operator(d, mu);
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(spin_operator(d, nu));
  const VectorXc phases =
      (cplx(0, 1) * theta * es.eigenvalues().cast<cplx>()).array().exp().matrix();
  const MatrixXc u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return u * s_mu * u.adjoint();
}

MatrixXc WeylDecomposition::reconstruct() const {
  MatrixXc out = MatrixXc::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      if (coefficients(a, b) != cplx(0)) out += coefficients(a, b) * weyl_operator(d, WeylLabel(a, b));
  return out;
}

}  // namespace daqc
