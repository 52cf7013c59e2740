#include "daqc/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace daqc {

namespace {

constexpr double kDropTolerance = 1e-14;

std::size_t checked_dimension(int d, int n, std::size_t cap) {
  std::size_t dim = 1;
  for (int s = 0; s < n; ++s) {
    if (dim > cap / static_cast<std::size_t>(d))
      throw DimensionError("Hilbert space " + std::to_string(d) + "^" + std::to_string(n) +
                           " exceeds the size cap " + std::to_string(cap));
    dim *= static_cast<std::size_t>(d);
  }
  return dim;
}

template <typename Term>
void merge_term(std::vector<Term>& terms, const Term& t) {
  auto it = std::lower_bound(terms.begin(), terms.end(), t.key(),
                             [](const Term& x, const CouplingKey& k) { return x.key() < k; });
  if (it != terms.end() && it->key() == t.key()) {
    it->coefficient += t.coefficient;
    if (std::abs(it->coefficient) < kDropTolerance) terms.erase(it);
    return;
  }
  if (std::abs(t.coefficient) < kDropTolerance) return;
  terms.insert(it, t);
}

bool is_hermitian_op(const MatrixXc& op) {
  const double scale = std::max(1.0, op.norm());
  return (op - op.adjoint()).norm() <= 1e-12 * scale;
}

// Adds coefficient * W_{labels[0]} (x) ... (x) W_{labels[n-1]} to out, using the
// monomial structure: W_ab |x> = w^{a (x - b)} |x - b>.
void accumulate_weyl_string(MatrixXc& out, int d, const std::vector<WeylLabel>& labels, cplx coefficient) {
  const int n = static_cast<int>(labels.size());
  const Eigen::Index dim = out.rows();
  std::vector<int> digits(n, 0);
  for (Eigen::Index col = 0; col < dim; ++col) {
    Eigen::Index row = 0;
    long long exponent = 0;
    for (int s = 0; s < n; ++s) {
      const int y = mod(digits[s] - labels[s].b, d);
      exponent += 1LL * labels[s].a * y;
      row = row * d + y;
    }
    out(row, col) += coefficient * root_of_unity(d, exponent);
    for (int s = n - 1; s >= 0; --s) {
      if (++digits[s] < d) break;
      digits[s] = 0;
    }
  }
}

}  // namespace

std::string to_string(const CouplingKey& k) {
  if (k.is_local()) return "site " + std::to_string(k.site_i) + " " + to_string(k.left);
  return "sites (" + std::to_string(k.site_i) + "," + std::to_string(k.site_j) + ") " + to_string(k.left) +
         to_string(k.right);
}

QuditHamiltonian::QuditHamiltonian(int d, int n) : d_(d), n_(n) {
  check_dimension(d);
  if (n < 1) throw DimensionError("number of qudits must be >= 1, got " + std::to_string(n));
}

void QuditHamiltonian::check_site(int s) const {
  if (s < 0 || s >= n_)
    throw PreconditionError("site " + std::to_string(s) + " out of range for n = " + std::to_string(n_));
}

QuditHamiltonian& QuditHamiltonian::add_coupling(int i, int j, const WeylLabel& li, const WeylLabel& lj, cplx h) {
  check_site(i);
  check_site(j);
  check_label(li, d_);
  check_label(lj, d_);
  if (i == j) throw PreconditionError("two-body term needs two distinct sites");
  if (li.is_identity() || lj.is_identity())
    throw PreconditionError("two-body term with an identity factor; use add_local");
  CouplingTerm t = i < j ? CouplingTerm{i, j, li, lj, h} : CouplingTerm{j, i, lj, li, h};
  merge_term(two_body_, t);
  return *this;
}

QuditHamiltonian& QuditHamiltonian::add_local(int site, const WeylLabel& l, cplx h) {
  check_site(site);
  check_label(l, d_);
  if (l.is_identity()) throw PreconditionError("local term with the identity label; use add_identity");
  merge_term(one_body_, LocalTerm{site, l, h});
  return *this;
}

QuditHamiltonian& QuditHamiltonian::add_identity(double h) {
  identity_offset_ += h;
  return *this;
}

cplx QuditHamiltonian::coefficient(const CouplingKey& key) const {
  if (key.is_local()) {
    for (const auto& t : one_body_)
      if (t.key() == key) return t.coefficient;
    return 0.0;
  }
  auto it = std::lower_bound(two_body_.begin(), two_body_.end(), key,
                             [](const CouplingTerm& x, const CouplingKey& k) { return x.key() < k; });
  if (it != two_body_.end() && it->key() == key) return it->coefficient;
  return 0.0;
}

bool QuditHamiltonian::is_diagonal() const {
  for (const auto& t : two_body_)
    if (t.left.b != 0 || t.right.b != 0) return false;
  for (const auto& t : one_body_)
    if (t.label.b != 0) return false;
  return true;
}

bool QuditHamiltonian::is_x_type() const {
  for (const auto& t : two_body_)
    if (t.left.a != 0 || t.right.a != 0) return false;
  for (const auto& t : one_body_)
    if (t.label.a != 0) return false;
  return true;
}

bool QuditHamiltonian::is_hermitian(double tol) const {
  // (h W_l (x) W_r)^dag = conj(h) w^{l1 l2 + r1 r2} W_{-l} (x) W_{-r}
  for (const auto& t : two_body_) {
    const auto dl = weyl_dagger(d_, t.left), dr = weyl_dagger(d_, t.right);
    const cplx expected = std::conj(t.coefficient) * root_of_unity(d_, dl.exponent + dr.exponent);
    if (std::abs(coefficient({t.site_i, t.site_j, dl.label, dr.label}) - expected) > tol) return false;
  }
  for (const auto& t : one_body_) {
    const auto dl = weyl_dagger(d_, t.label);
    const cplx expected = std::conj(t.coefficient) * root_of_unity(d_, dl.exponent);
    if (std::abs(coefficient({t.site, -1, dl.label, WeylLabel{}}) - expected) > tol) return false;
  }
  return true;
}

QuditHamiltonian QuditHamiltonian::two_body_part() const {
  QuditHamiltonian out(d_, n_);
  out.two_body_ = two_body_;
  return out;
}

std::size_t QuditHamiltonian::dimension() const {
  return checked_dimension(d_, n_, static_cast<std::size_t>(-1));
}

QuditHamiltonian from_spin_terms(int d, int n, const std::vector<SpinProductTerm>& terms) {
  QuditHamiltonian h(d, n);
  cplx offset = 0;
  for (const auto& term : terms) {
    if (term.op_i.rows() != d || term.op_i.cols() != d || term.op_j.rows() != d || term.op_j.cols() != d)
      throw DimensionError("spin term operators must be " + std::to_string(d) + "x" + std::to_string(d));
    if (!is_hermitian_op(term.op_i) || !is_hermitian_op(term.op_j))
      throw PreconditionError("spin term operators must be Hermitian");
    if (term.site_i == term.site_j) throw PreconditionError("spin term needs two distinct sites");
    const auto ci = decompose(term.op_i, d);
    const auto cj = decompose(term.op_j, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const cplx x = ci.coefficients(a, b);
        if (x == cplx(0)) continue;
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e) {
            const cplx y = cj.coefficients(c, e);
            if (y == cplx(0)) continue;
            const cplx v = term.coefficient * x * y;
            const WeylLabel li(a, b), lj(c, e);
            if (li.is_identity() && lj.is_identity()) offset += v;
            else if (lj.is_identity()) h.add_local(term.site_i, li, v);
            else if (li.is_identity()) h.add_local(term.site_j, lj, v);
            else h.add_coupling(term.site_i, term.site_j, li, lj, v);
          }
      }
  }
  h.add_identity(offset.real());
  return h;
}

QuditHamiltonian blbq_problem(int n, double theta) {
  if (n < 2) throw DimensionError("BLBQ chain needs n >= 2, got " + std::to_string(n));
  const MatrixXc sz = spin_operator(3, SpinAxis::z);
  const MatrixXc sz2 = sz * sz;
  std::vector<SpinProductTerm> terms;
  for (int i = 0; i + 1 < n; ++i) {
    terms.push_back({i, i + 1, sz, sz, std::cos(theta)});
    terms.push_back({i, i + 1, sz2, sz2, std::sin(theta)});
  }
  return from_spin_terms(3, n, terms);
}

QuditHamiltonian zz_source(int n, int d) {
  if (n < 2) throw DimensionError("ZZ chain needs n >= 2, got " + std::to_string(n));
  const MatrixXc sz = spin_operator(d, SpinAxis::z);
  std::vector<SpinProductTerm> terms;
  for (int i = 0; i + 1 < n; ++i) terms.push_back({i, i + 1, sz, sz, 1.0});
  return from_spin_terms(d, n, terms);
}

CompatibilityReport check_compatibility(const QuditHamiltonian& source, const QuditHamiltonian& problem) {
  if (source.d() != problem.d() || source.n() != problem.n())
    throw DimensionError("source and problem differ in d or n");
  std::set<std::pair<int, int>> coupled;
  for (const auto& t : source.two_body()) coupled.insert({t.site_i, t.site_j});
  CompatibilityReport report;
  std::set<std::pair<int, int>> seen;
  for (const auto& t : problem.two_body()) {
    const std::pair<int, int> p{t.site_i, t.site_j};
    if (!coupled.count(p) && seen.insert(p).second) report.violations.push_back(p);
  }
  return report;
}

MatrixXc materialize(const QuditHamiltonian& h, std::size_t cap) {
  const auto dim = static_cast<Eigen::Index>(checked_dimension(h.d(), h.n(), cap));
  MatrixXc out = MatrixXc::Zero(dim, dim);
  std::vector<WeylLabel> labels(h.n());
  for (const auto& t : h.two_body()) {
    std::fill(labels.begin(), labels.end(), WeylLabel{});
    labels[t.site_i] = t.left;
    labels[t.site_j] = t.right;
    accumulate_weyl_string(out, h.d(), labels, t.coefficient);
  }
  for (const auto& t : h.one_body()) {
    std::fill(labels.begin(), labels.end(), WeylLabel{});
    labels[t.site] = t.label;
    accumulate_weyl_string(out, h.d(), labels, t.coefficient);
  }
  out.diagonal().array() += h.identity_offset();
  return out;
}

Eigen::VectorXd diagonal_energies(const QuditHamiltonian& h) {
  if (!h.is_diagonal()) throw PreconditionError("diagonal_energies needs a diagonal Hamiltonian");
  const int d = h.d(), n = h.n();
  const auto dim = static_cast<Eigen::Index>(checked_dimension(d, n, static_cast<std::size_t>(-1)));
  Eigen::VectorXd e = Eigen::VectorXd::Constant(dim, h.identity_offset());
  std::vector<int> digits(n, 0);
  for (Eigen::Index x = 0; x < dim; ++x) {
    cplx acc = 0;
    for (const auto& t : h.two_body())
      acc += t.coefficient * root_of_unity(d, 1LL * t.left.a * digits[t.site_i] + 1LL * t.right.a * digits[t.site_j]);
    for (const auto& t : h.one_body()) acc += t.coefficient * root_of_unity(d, 1LL * t.label.a * digits[t.site]);
    e(x) += acc.real();
    for (int s = n - 1; s >= 0; --s) {
      if (++digits[s] < d) break;
      digits[s] = 0;
    }
  }
  return e;
}

MatrixXc weyl_string(int d, const std::vector<WeylLabel>& labels) {
  const auto dim = static_cast<Eigen::Index>(
      checked_dimension(d, static_cast<int>(labels.size()), kDefaultMaterializeCap));
  MatrixXc out = MatrixXc::Zero(dim, dim);
  accumulate_weyl_string(out, d, labels, 1.0);
  return out;
}

MatrixXc embed_local(int d, int n, int site, const MatrixXc& op) {
  const auto dim = static_cast<Eigen::Index>(checked_dimension(d, n, kDefaultMaterializeCap));
  Eigen::Index stride = 1;
  for (int s = site + 1; s < n; ++s) stride *= d;
  MatrixXc out = MatrixXc::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int x = static_cast<int>((col / stride) % d);
    const Eigen::Index base = col - x * stride;
    for (int y = 0; y < d; ++y) out(base + y * stride, col) = op(y, x);
  }
  return out;
}

double SpinHamiltonian::coefficient(int i, int j, SpinAxis mu, SpinAxis nu) const {
  double acc = 0;
  for (const auto& t : terms) {
    if (t.site_i == i && t.site_j == j && t.mu == mu && t.nu == nu) acc += t.coefficient;
    else if (t.site_i == j && t.site_j == i && t.mu == nu && t.nu == mu) acc += t.coefficient;
  }
  return acc;
}

MatrixXc materialize(const SpinHamiltonian& h, std::size_t cap) {
  const auto dim = static_cast<Eigen::Index>(checked_dimension(h.d, h.n, cap));
  MatrixXc out = MatrixXc::Zero(dim, dim);
  for (const auto& t : h.terms) {
    if (t.site_i == t.site_j) throw PreconditionError("spin coupling needs two distinct sites");
    out += t.coefficient * embed_local(h.d, h.n, t.site_i, spin_operator(h.d, t.mu)) *
           embed_local(h.d, h.n, t.site_j, spin_operator(h.d, t.nu));
  }
  return out;
}

SpinHamiltonian heisenberg_chain(int d, int n, double jx, double jy, double jz) {
  SpinHamiltonian h{d, n, {}};
  for (int i = 0; i + 1 < n; ++i) {
    if (jx != 0) h.terms.push_back({i, i + 1, SpinAxis::x, SpinAxis::x, jx});
    if (jy != 0) h.terms.push_back({i, i + 1, SpinAxis::y, SpinAxis::y, jy});
    if (jz != 0) h.terms.push_back({i, i + 1, SpinAxis::z, SpinAxis::z, jz});
  }
  return h;
}

}  // namespace daqc
