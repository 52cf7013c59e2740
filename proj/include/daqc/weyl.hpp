#pragma once

#include <array>
#include <compare>
#include <string>
#include <utility>

#include "daqc/types.hpp"

namespace daqc {

/// Label (a, b) of the Weyl operator Z^a X^b. Components are kept reduced mod d.
struct WeylLabel {
  int a = 0;
  int b = 0;

  WeylLabel() = default;
  WeylLabel(int a_, int b_) : a(a_), b(b_) {}

  /// Canonical label with both components reduced mod d.
  static WeylLabel make(long long a, long long b, int d) { return {mod(a, d), mod(b, d)}; }

  bool is_identity() const { return a == 0 && b == 0; }
  bool valid_for(int d) const { return a >= 0 && a < d && b >= 0 && b < d; }
  /// Position in the ordering (0,0), (0,1), ..., (0,d-1), (1,0), ...
  int index(int d) const { return d * a + b; }

  friend auto operator<=>(const WeylLabel&, const WeylLabel&) = default;
};

std::string to_string(const WeylLabel& l);

void check_dimension(int d);
void check_label(const WeylLabel& l, int d);

/// Negated label, reduced mod d.
inline WeylLabel negate(const WeylLabel& l, int d) { return WeylLabel::make(-l.a, -l.b, d); }
/// Per-component sum mod d.
inline WeylLabel add(const WeylLabel& x, const WeylLabel& y, int d) {
  return WeylLabel::make(x.a + y.a, x.b + y.b, d);
}

/// Dense d x d matrix of W_ab = sum_k w^{k a} |k><k+b mod d|.
template <typename Real = double>
Matrix<std::complex<Real>> weyl_operator(int d, const WeylLabel& label) {
  check_dimension(d);
  check_label(label, d);
  Matrix<std::complex<Real>> w = Matrix<std::complex<Real>>::Zero(d, d);
  for (int k = 0; k < d; ++k) w(k, (k + label.b) % d) = root_of_unity<Real>(d, 1LL * k * label.a);
  return w;
}

/// Exponent e in W_k^dag W_l W_k = w^e W_l, with target l and conjugator k.
inline int conjugation_exponent(int d, const WeylLabel& target, const WeylLabel& conjugator) {
  return mod(1LL * target.b * conjugator.a - 1LL * target.a * conjugator.b, d);
}

/// Scalar phi with W_k^dag W_l W_k = phi W_l.
cplx conjugation_phase(int d, const WeylLabel& target, const WeylLabel& conjugator);

/// A Weyl label with a phase w^exponent in front.
struct PhasedLabel {
  int exponent = 0;
  WeylLabel label;

  cplx phase(int d) const { return root_of_unity(d, exponent); }
};

/// W_left W_right = w^{l1 k2} W_{left+right}, with left = k and right = l.
PhasedLabel weyl_product(int d, const WeylLabel& left, const WeylLabel& right);
/// Same as weyl_product, with the phase materialized.
std::pair<cplx, WeylLabel> weyl_product_phase(int d, const WeylLabel& left, const WeylLabel& right);
/// W_l^dag = w^{l1 l2} W_{-l}.
PhasedLabel weyl_dagger(int d, const WeylLabel& l);

enum class SpinAxis { x, y, z };

char axis_name(SpinAxis axis);
SpinAxis parse_axis(char c);

/// Spin-s matrix along an axis, s = (d-1)/2, basis ordered m = s, s-1, ..., -s.
MatrixXc spin_operator(int d, SpinAxis axis);

/// exp(i theta S_nu) S_mu exp(-i theta S_nu).
MatrixXc spin_conjugate(int d, SpinAxis mu, SpinAxis nu, double theta);

/// Levi-Civita sign for (mu, nu, eta) and the remaining axis eta; sign 0 when mu == nu.
std::pair<int, SpinAxis> levi_civita(SpinAxis mu, SpinAxis nu);

/// Coefficients c_ab of a single-qudit operator in the Weyl basis; c(a, b) multiplies W_ab.
struct WeylDecomposition {
  int d = 0;
  MatrixXc coefficients;

  cplx operator()(const WeylLabel& l) const { return coefficients(l.a, l.b); }
  MatrixXc reconstruct() const;
};

/// c_ab = Tr(W_ab^dag op) / d.
template <typename Derived>
WeylDecomposition decompose(const Eigen::MatrixBase<Derived>& op, int d) {
  check_dimension(d);
  if (op.rows() != d || op.cols() != d)
    throw DimensionError("decompose: operator is " + std::to_string(op.rows()) + "x" +
                         std::to_string(op.cols()) + ", expected " + std::to_string(d) + "x" +
                         std::to_string(d));
  WeylDecomposition out{d, MatrixXc::Zero(d, d)};
  // Tr(W_ab^dag op) = sum_k conj(w^{k a}) op(k, k+b)
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      cplx acc = 0;
      for (int k = 0; k < d; ++k)
        acc += std::conj(root_of_unity(d, 1LL * k * a)) * cplx(op(k, (k + b) % d));
      out.coefficients(a, b) = acc / double(d);
    }
  return out;
}

}  // namespace daqc
