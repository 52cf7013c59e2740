#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "daqc/weyl.hpp"

namespace daqc {

/// Row key of the phase matrix: a two-body Weyl term, or a one-body one when site_j < 0.
struct CouplingKey {
  int site_i = 0;
  int site_j = -1;
  WeylLabel left;
  WeylLabel right;

  bool is_local() const { return site_j < 0; }

  friend auto operator<=>(const CouplingKey&, const CouplingKey&) = default;
};

std::string to_string(const CouplingKey& k);

/// h W_left (site_i) W_right (site_j), site_i < site_j, no identity factor.
struct CouplingTerm {
  int site_i = 0;
  int site_j = 1;
  WeylLabel left;
  WeylLabel right;
  cplx coefficient{0.0, 0.0};

  CouplingKey key() const { return {site_i, site_j, left, right}; }
};

/// h W_label on one site, label not the identity.
struct LocalTerm {
  int site = 0;
  WeylLabel label;
  cplx coefficient{0.0, 0.0};

  CouplingKey key() const { return {site, -1, label, WeylLabel{}}; }
};

/// Largest Hilbert-space dimension that materialize() will build by default.
inline constexpr std::size_t kDefaultMaterializeCap = std::size_t(1) << 14;

/// One- and two-body Hamiltonian on n qudits of dimension d written in the Weyl basis.
/// Terms are kept sorted by key with duplicates merged; negligible terms are dropped.
class QuditHamiltonian {
 public:
  QuditHamiltonian() = default;
  QuditHamiltonian(int d, int n);

  int d() const { return d_; }
  int n() const { return n_; }
  const std::vector<CouplingTerm>& two_body() const { return two_body_; }
  const std::vector<LocalTerm>& one_body() const { return one_body_; }
  double identity_offset() const { return identity_offset_; }

  /// Adds a two-body term; sites may come in either order.
  QuditHamiltonian& add_coupling(int i, int j, const WeylLabel& li, const WeylLabel& lj, cplx h);
  QuditHamiltonian& add_local(int site, const WeylLabel& l, cplx h);
  QuditHamiltonian& add_identity(double h);

  /// Coefficient for a key, zero when absent.
  cplx coefficient(const CouplingKey& key) const;

  /// True when every term is a power of Z (diagonal in the computational basis).
  bool is_diagonal() const;
  /// True when every term is a power of X.
  bool is_x_type() const;
  /// Symbolic Hermiticity from the dagger relation.
  bool is_hermitian(double tol = 1e-10) const;

  /// Same Hamiltonian without one-body terms and identity offset.
  QuditHamiltonian two_body_part() const;

  std::size_t dimension() const;

 private:
  void check_site(int s) const;

  int d_ = 2;
  int n_ = 0;
  std::vector<CouplingTerm> two_body_;
  std::vector<LocalTerm> one_body_;
  double identity_offset_ = 0.0;
};

/// One product term coefficient * op_i (site_i) op_j (site_j) of a spin-basis description.
struct SpinProductTerm {
  int site_i = 0;
  int site_j = 1;
  MatrixXc op_i;
  MatrixXc op_j;
  double coefficient = 1.0;
};

/// Decomposes each product term in the Weyl basis and collects the pieces.
QuditHamiltonian from_spin_terms(int d, int n, const std::vector<SpinProductTerm>& terms);

/// sum_i cos(theta) S_z S_z + sin(theta) S_z^2 S_z^2 on a spin-1 chain, one- and two-body parts.
QuditHamiltonian blbq_problem(int n, double theta);

/// sum_i S_z S_z on a chain of spin-(d-1)/2 qudits.
QuditHamiltonian zz_source(int n, int d);

struct CompatibilityReport {
  std::vector<std::pair<int, int>> violations;
  bool compatible() const { return violations.empty(); }
};

/// Lists coupled problem site pairs that the source does not couple.
CompatibilityReport check_compatibility(const QuditHamiltonian& source, const QuditHamiltonian& problem);

/// Dense d^n x d^n matrix including the identity offset.
MatrixXc materialize(const QuditHamiltonian& h, std::size_t cap = kDefaultMaterializeCap);

/// Diagonal of a diagonal Hamiltonian (including offset), without building the matrix.
Eigen::VectorXd diagonal_energies(const QuditHamiltonian& h);

/// Dense operator of one Weyl word acting on n sites; identity labels fill the gaps.
MatrixXc weyl_string(int d, const std::vector<WeylLabel>& labels);

/// Single-site operator embedded at `site` among n qudits.
MatrixXc embed_local(int d, int n, int site, const MatrixXc& op);

/// Spin coupling J S_mu (site_i) S_nu (site_j).
struct SpinCoupling {
  int site_i = 0;
  int site_j = 1;
  SpinAxis mu = SpinAxis::z;
  SpinAxis nu = SpinAxis::z;
  double coefficient = 0.0;
};

/// Two-body Hamiltonian in the spin basis, sum of SpinCoupling terms.
struct SpinHamiltonian {
  int d = 2;
  int n = 0;
  std::vector<SpinCoupling> terms;

  /// Coefficient for (i, j, mu, nu), zero when absent.
  double coefficient(int i, int j, SpinAxis mu, SpinAxis nu) const;
};

MatrixXc materialize(const SpinHamiltonian& h, std::size_t cap = kDefaultMaterializeCap);

/// Nearest-neighbour chain sum_i (jx SxSx + jy SySy + jz SzSz).
SpinHamiltonian heisenberg_chain(int d, int n, double jx, double jy, double jz);

}  // namespace daqc
