#include "daqc/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

namespace daqc {

namespace {

Eigen::Index int_pow(int d, int n) {
  Eigen::Index p = 1;
  for (int k = 0; k < n; ++k) p *= d;
  return p;
}

Eigen::Index site_stride(int d, int n, int site) { return int_pow(d, n - 1 - site); }

// Offsets of the d^k local basis states of `sites` (first site most significant).
std::vector<Eigen::Index> local_offsets(int d, int n, const std::vector<int>& sites) {
  std::vector<Eigen::Index> off{0};
  for (int s : sites) {
    const Eigen::Index stride = site_stride(d, n, s);
    std::vector<Eigen::Index> next;
    next.reserve(off.size() * d);
    for (Eigen::Index o : off)
      for (int x = 0; x < d; ++x) next.push_back(o + x * stride);
    off = std::move(next);
  }
  return off;
}

// Basis indices whose digits vanish on `sites`.
std::vector<Eigen::Index> base_indices(int d, int n, const std::vector<int>& sites) {
  const Eigen::Index dim = int_pow(d, n);
  std::vector<Eigen::Index> out;
  for (Eigen::Index x = 0; x < dim; ++x) {
    bool zero = true;
    for (int s : sites)
      if ((x / site_stride(d, n, s)) % d != 0) zero = false;
    if (zero) out.push_back(x);
  }
  return out;
}

void check_sites(const QuantumState& s, const std::vector<int>& sites) {
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (sites[k] < 0 || sites[k] >= s.n()) throw PreconditionError("site " + std::to_string(sites[k]) + " out of range");
    for (std::size_t l = 0; l < k; ++l)
      if (sites[l] == sites[k]) throw PreconditionError("repeated site in a local operation");
  }
}

// m <- U_sites m, acting on the row index of every column.
void left_apply(MatrixXc& m, int d, int n, const std::vector<int>& sites, const MatrixXc& u) {
  const auto off = local_offsets(d, n, sites);
  const auto bases = base_indices(d, n, sites);
  const Eigen::Index L = static_cast<Eigen::Index>(off.size());
  if (u.rows() != L || u.cols() != L) throw DimensionError("local operator has the wrong size");
  VectorXc in(L), out(L);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    cplx* col = m.col(c).data();
    for (Eigen::Index b : bases) {
      for (Eigen::Index x = 0; x < L; ++x) in(x) = col[b + off[x]];
      out.noalias() = u * in;
      for (Eigen::Index x = 0; x < L; ++x) col[b + off[x]] = out(x);
    }
  }
}

void apply_local_op(QuantumState& s, const std::vector<int>& sites, const MatrixXc& u) {
  check_sites(s, sites);
  if (s.is_pure()) {
    MatrixXc v = s.vector();
    left_apply(v, s.d(), s.n(), sites, u);
    s.vector() = v.col(0);
    return;
  }
  MatrixXc& rho = s.density();
  left_apply(rho, s.d(), s.n(), sites, u);
  rho.adjointInPlace();
  left_apply(rho, s.d(), s.n(), sites, u);
}

struct SparseSuperop {
  std::vector<std::tuple<int, int, cplx>> entries;
};

SparseSuperop sparse(const MatrixXc& s) {
  SparseSuperop out;
  const double tol = 1e-300;
  for (Eigen::Index r = 0; r < s.rows(); ++r)
    for (Eigen::Index c = 0; c < s.cols(); ++c)
      if (std::abs(s(r, c)) > tol) out.entries.emplace_back(static_cast<int>(r), static_cast<int>(c), s(r, c));
  return out;
}

bool has_decay(const NoiseModel& noise) { return std::isfinite(noise.t1); }
bool noisy(const NoiseModel& noise) {
  return has_decay(noise) || noise.single_gate_fidelity < 1.0 || noise.two_gate_fidelity < 1.0;
}

}  // namespace

QuantumState::QuantumState(int d, int n, std::variant<VectorXc, MatrixXc> data) : d_(d), n_(n), data_(std::move(data)) {}

QuantumState QuantumState::pure(int d, int n, VectorXc psi) {
  check_dimension(d);
  if (static_cast<std::size_t>(int_pow(d, n)) > kPureCap) throw DimensionError("pure state exceeds the size cap");
  if (psi.size() != int_pow(d, n)) throw DimensionError("amplitude vector has the wrong length");
  return QuantumState(d, n, std::move(psi));
}

QuantumState QuantumState::mixed(int d, int n, MatrixXc rho) {
  check_dimension(d);
  if (static_cast<std::size_t>(int_pow(d, n)) > kDensityCap) throw DimensionError("density matrix exceeds the size cap");
  if (rho.rows() != int_pow(d, n) || rho.cols() != rho.rows()) throw DimensionError("density matrix has the wrong shape");
  return QuantumState(d, n, std::move(rho));
}

QuantumState QuantumState::basis(int d, const std::vector<int>& digits) {
  const int n = static_cast<int>(digits.size());
  VectorXc psi = VectorXc::Zero(int_pow(d, n));
  Eigen::Index idx = 0;
  for (int k : digits) {
    if (k < 0 || k >= d) throw PreconditionError("basis digit out of range");
    idx = idx * d + k;
  }
  psi(idx) = 1.0;
  return pure(d, n, std::move(psi));
}

Eigen::Index QuantumState::dimension() const { return int_pow(d_, n_); }

QuantumState& QuantumState::promote() {
  if (is_pure()) {
    if (static_cast<std::size_t>(dimension()) > kDensityCap) throw DimensionError("density matrix exceeds the size cap");
    const VectorXc psi = vector();
    data_ = MatrixXc(psi * psi.adjoint());
  }
  return *this;
}

MatrixXc QuantumState::density_matrix() const {
  if (is_pure()) return vector() * vector().adjoint();
  return density();
}

double QuantumState::trace() const {
  if (is_pure()) return vector().squaredNorm();
  return density().trace().real();
}

double QuantumState::min_eigenvalue() const {
  if (is_pure()) return 0.0;
  const MatrixXc h = 0.5 * (density() + density().adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

NoiseModel NoiseModel::reference(double T) { return {100.0 * T, 0.01 * T, 0.994, 0.95, 0.1 * T}; }

NoiseModel NoiseModel::ideal(double delta_t) {
  return {std::numeric_limits<double>::infinity(), delta_t, 1.0, 1.0, 10.0 * delta_t};
}

void NoiseModel::validate() const {
  if (!(t1 > 0)) throw PreconditionError("t1 must be positive");
  if (!(single_gate_duration > 0) || !(two_gate_duration > 0)) throw PreconditionError("gate durations must be positive");
  if (!(single_gate_fidelity > 0 && single_gate_fidelity <= 1)) throw PreconditionError("single_gate_fidelity must lie in (0, 1]");
  if (!(two_gate_fidelity > 0 && two_gate_fidelity <= 1)) throw PreconditionError("two_gate_fidelity must lie in (0, 1]");
}

QuantumState ghz_state(int d, int n, bool density) {
  check_dimension(d);
  const Eigen::Index dim = int_pow(d, n);
  VectorXc psi = VectorXc::Zero(dim);
  Eigen::Index step = 0;
  for (int s = 0; s < n; ++s) step = step * d + 1;  // index of |11...1>
  for (int k = 0; k < d; ++k) psi(k * step) = 1.0 / std::sqrt(double(d));
  QuantumState s = QuantumState::pure(d, n, std::move(psi));
  if (density) s.promote();
  return s;
}

void apply_local_unitary(QuantumState& s, int site, const MatrixXc& u) { apply_local_op(s, {site}, u); }

void apply_two_site_unitary(QuantumState& s, int site_a, int site_b, const MatrixXc& u) {
  apply_local_op(s, {site_a, site_b}, u);
}

void apply_diagonal_unitary(QuantumState& s, const VectorXc& phases) {
  if (phases.size() != s.dimension()) throw DimensionError("phase vector has the wrong length");
  if (s.is_pure()) {
    s.vector().array() *= phases.array();
    return;
  }
  MatrixXc& rho = s.density();
  const VectorXc conj = phases.conjugate();
  for (Eigen::Index c = 0; c < rho.cols(); ++c) rho.col(c).array() *= phases.array() * conj(c);
}

void apply_unitary(QuantumState& s, const MatrixXc& u) {
  if (u.rows() != s.dimension() || u.cols() != s.dimension()) throw DimensionError("unitary has the wrong size");
  if (s.is_pure()) {
    s.vector() = u * s.vector();
    return;
  }
  MatrixXc tmp = u * s.density();
  s.density().noalias() = tmp * u.adjoint();
}

MatrixXc t1_superoperator(int d, double t1, double duration) {
  check_dimension(d);
  if (duration < 0) throw PreconditionError("duration must be >= 0");
  const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
  if (duration == 0 || !std::isfinite(t1)) return MatrixXc::Identity(dd, dd);
  const double gt = duration / t1;
  if (!std::isfinite(gt)) {
    // Fixed point: every population ends in |0>, coherences vanish.
    MatrixXc s = MatrixXc::Zero(dd, dd);
    for (int x = 0; x < d; ++x) s(0, x + d * x) = 1.0;
    return s;
  }
  MatrixXc gen = MatrixXc::Zero(dd, dd);
  const MatrixXc id = MatrixXc::Identity(d, d);
  for (int k = 1; k < d; ++k) {
    MatrixXc l = MatrixXc::Zero(d, d);
    l(k - 1, k) = 1.0;
    const MatrixXc ll = l.adjoint() * l;
    const MatrixXc lc = l.conjugate();
    const MatrixXc llt = ll.transpose();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q)
            gen(i * d + p, j * d + q) += lc(i, j) * l(p, q) - 0.5 * id(i, j) * ll(p, q) - 0.5 * llt(i, j) * id(p, q);
  }
  return (gen * gt).exp();
}

void apply_local_superoperator(MatrixXc& rho, int d, int n, int site, const MatrixXc& superop) {
  const auto off = local_offsets(d, n, {site});
  const auto bases = base_indices(d, n, {site});
  const SparseSuperop sp = sparse(superop);
  std::vector<cplx> in(static_cast<std::size_t>(d) * d), out(in.size());
  for (Eigen::Index b0 : bases)
    for (Eigen::Index a0 : bases) {
      for (int y = 0; y < d; ++y)
        for (int x = 0; x < d; ++x) in[x + d * y] = rho(a0 + off[x], b0 + off[y]);
      std::fill(out.begin(), out.end(), cplx(0));
      for (const auto& [r, c, v] : sp.entries) out[r] += v * in[c];
      for (int y = 0; y < d; ++y)
        for (int x = 0; x < d; ++x) rho(a0 + off[x], b0 + off[y]) = out[x + d * y];
    }
}

void apply_t1(QuantumState& s, double duration, const NoiseModel& noise) {
  if (duration < 0) throw PreconditionError("duration must be >= 0");
  s.promote();
  if (duration == 0 || !has_decay(noise)) return;
  const MatrixXc superop = t1_superoperator(s.d(), noise.t1, duration);
  for (int site = 0; site < s.n(); ++site) apply_local_superoperator(s.density(), s.d(), s.n(), site, superop);
}

double depolarizing_probability(double fidelity, int local_dim) {
  if (!(fidelity > 0 && fidelity <= 1)) throw PreconditionError("gate fidelity must lie in (0, 1]");
  const double D = local_dim;
  const double p = (1 - fidelity) * (D + 1) / D;
  if (p > 1 + 1e-15) throw PreconditionError("gate fidelity below 1/(D+1) has no depolarizing model");
  return std::min(p, 1.0);
}

void apply_gate_noise(QuantumState& s, const std::vector<int>& sites, double fidelity) {
  if (sites.empty() || sites.size() > 2) throw PreconditionError("gate noise acts on one or two sites");
  check_sites(s, sites);
  const auto off = local_offsets(s.d(), s.n(), sites);
  const int L = static_cast<int>(off.size());
  const double p = depolarizing_probability(fidelity, L);
  s.promote();
  if (p == 0) return;
  // A uniformly random non-identity Weyl error with probability p equals
  // (1 - lambda) rho + lambda I/L (x) Tr_sites rho with lambda = p L^2 / (L^2 - 1).
  const double lambda = p * L * L / (double(L) * L - 1.0);
  const auto bases = base_indices(s.d(), s.n(), sites);
  MatrixXc& rho = s.density();
  for (Eigen::Index b0 : bases)
    for (Eigen::Index a0 : bases) {
      cplx partial = 0;
      for (int x = 0; x < L; ++x) partial += rho(a0 + off[x], b0 + off[x]);
      for (int y = 0; y < L; ++y)
        for (int x = 0; x < L; ++x) rho(a0 + off[x], b0 + off[y]) *= (1 - lambda);
      for (int x = 0; x < L; ++x) rho(a0 + off[x], b0 + off[x]) += lambda * partial / double(L);
    }
}

double state_fidelity(const QuantumState& a, const QuantumState& b) {
  if (a.d() != b.d() || a.n() != b.n()) throw DimensionError("states differ in d or n");
  double f;
  if (a.is_pure() && b.is_pure()) {
    f = std::norm(a.vector().dot(b.vector()));
  } else if (a.is_pure() || b.is_pure()) {
    const VectorXc& psi = a.is_pure() ? a.vector() : b.vector();
    const MatrixXc& rho = a.is_pure() ? b.density() : a.density();
    f = psi.dot(rho * psi).real();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (a.density() + a.density().adjoint()));
    const Eigen::VectorXd sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const MatrixXc root = es.eigenvectors() * sq.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    const MatrixXc inner = root * b.density() * root;
    Eigen::SelfAdjointEigenSolver<MatrixXc> es2(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
    const double tr = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    f = tr * tr;
  }
  return std::clamp(f, 0.0, 1.0);
}

Propagator::Propagator(const QuditHamiltonian& h) : h_(h), diagonal_(h.is_diagonal()) {
  if (diagonal_) {
    energies_ = diagonal_energies(h);
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(materialize(h));
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
  }
}

MatrixXc Propagator::dense() const { return materialize(h_); }

void Propagator::apply(QuantumState& s, double t) const {
  if (t == 0) return;
  const VectorXc phases = (cplx(0, -t) * energies_.cast<cplx>()).array().exp().matrix();
  if (diagonal_) {
    apply_diagonal_unitary(s, phases);
    return;
  }
  if (s.is_pure()) {
    s.vector() = vectors_ * phases.asDiagonal() * (vectors_.adjoint() * s.vector());
    return;
  }
  apply_unitary(s, vectors_ * phases.asDiagonal() * vectors_.adjoint());
}

void Propagator::apply_left(MatrixXc& m, double t) const {
  const VectorXc phases = (cplx(0, -t) * energies_.cast<cplx>()).array().exp().matrix();
  if (diagonal_) {
    m = phases.asDiagonal() * m;
    return;
  }
  m = vectors_ * phases.asDiagonal() * (vectors_.adjoint() * m);
}

QuantumState ideal_evolution(const QuditHamiltonian& h, double T, const QuantumState& state) {
  if (h.d() != state.d() || h.n() != state.n()) throw DimensionError("Hamiltonian and state differ in d or n");
  QuantumState out = state;
  Propagator(h).apply(out, T);
  return out;
}

namespace {

void check_schedule(const Schedule& s, const QuditHamiltonian& source, const QuantumState& state) {
  if (s.d != source.d() || s.n != source.n()) throw DimensionError("schedule and source differ in d or n");
  if (s.d != state.d() || s.n != state.n()) throw DimensionError("schedule and state differ in d or n");
  for (const auto& b : s.blocks)
    if (b.duration < 0) throw PreconditionError("negative block duration");
}

void apply_layer(QuantumState& s, const std::vector<LocalGate>& layer, const std::optional<NoiseModel>& noise) {
  if (layer.empty()) return;
  for (const auto& g : layer) apply_local_unitary(s, g.site, g.unitary);
  if (!noise) return;
  if (noise->single_gate_fidelity < 1)
    for (const auto& g : layer) apply_gate_noise(s, {g.site}, noise->single_gate_fidelity);
  if (has_decay(*noise)) apply_t1(s, noise->single_gate_duration, *noise);
}

// Evolution under the source with T1 interleaved in substeps no longer than one gate duration.
void evolve(QuantumState& s, const Propagator& prop, double t, const std::optional<NoiseModel>& noise) {
  if (t <= 0) return;
  if (!noise || !has_decay(*noise)) {
    prop.apply(s, t);
    return;
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(t / noise->single_gate_duration - 1e-9)));
  const double h = t / steps;
  const MatrixXc superop = t1_superoperator(s.d(), noise->t1, h);
  s.promote();
  for (int k = 0; k < steps; ++k) {
    prop.apply(s, h);
    for (int site = 0; site < s.n(); ++site) apply_local_superoperator(s.density(), s.d(), s.n(), site, superop);
  }
}

std::string fingerprint(const QuditHamiltonian& h) {
  std::ostringstream os;
  os.precision(17);
  os << h.d() << "/" << h.n() << "/" << h.identity_offset();
  for (const auto& t : h.two_body())
    os << "|" << t.site_i << "," << t.site_j << to_string(t.left) << to_string(t.right) << t.coefficient;
  for (const auto& t : h.one_body()) os << "|" << t.site << to_string(t.label) << t.coefficient;
  return os.str();
}

}  // namespace

QuantumState run_sdaqc(const Schedule& schedule, const QuditHamiltonian& source,
                       const std::optional<NoiseModel>& noise, const QuantumState& state) {
  check_schedule(schedule, source, state);
  if (noise) noise->validate();
  QuantumState s = state;
  if (noise && noisy(*noise)) s.promote();
  const Propagator prop(source);
  const auto layers = gate_layers(schedule);
  for (std::size_t q = 0; q < schedule.blocks.size(); ++q) {
    apply_layer(s, layers[q], noise);
    evolve(s, prop, schedule.blocks[q].duration, noise);
  }
  apply_layer(s, layers.back(), noise);
  apply_layer(s, schedule.final_local_layer, noise);
  return s;
}

MatrixXc sdaqc_unitary(const Schedule& schedule, const QuditHamiltonian& source) {
  if (schedule.d != source.d() || schedule.n != source.n()) throw DimensionError("schedule and source differ in d or n");
  const Eigen::Index dim = int_pow(schedule.d, schedule.n);
  MatrixXc u = MatrixXc::Identity(dim, dim);
  const Propagator prop(source);
  const auto layers = gate_layers(schedule);
  auto layer = [&](const std::vector<LocalGate>& gates) {
    for (const auto& g : gates) left_apply(u, schedule.d, schedule.n, {g.site}, g.unitary);
  };
  for (std::size_t q = 0; q < schedule.blocks.size(); ++q) {
    layer(layers[q]);
    prop.apply_left(u, schedule.blocks[q].duration);
  }
  layer(layers.back());
  layer(schedule.final_local_layer);
  return u;
}

const MatrixXc& BangCache::get(const std::string& key, const std::function<MatrixXc()>& build) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return *it->second;
  }
  auto value = std::make_shared<const MatrixXc>(build());
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = entries_.emplace(key, std::move(value));
  return *it->second;
}

std::size_t BangCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

MatrixXc principal_generator(const MatrixXc& u, double dt) {
  if (!(dt > 0)) throw PreconditionError("gate duration must be positive");
  Eigen::ComplexSchur<MatrixXc> schur(u);
  const MatrixXc& q = schur.matrixU();
  const MatrixXc& t = schur.matrixT();
  VectorXc gen(t.rows());
  for (Eigen::Index k = 0; k < t.rows(); ++k) {
    double phi = std::arg(t(k, k));
    if (phi <= -M_PI) phi += 2 * M_PI;
    gen(k) = -phi / dt;
  }
  MatrixXc h = q * gen.asDiagonal() * q.adjoint();
  return 0.5 * (h + h.adjoint());
}

QuantumState run_bdaqc(const Schedule& schedule, const QuditHamiltonian& source, const NoiseModel& noise,
                       const QuantumState& state, BangCache* cache) {
  check_schedule(schedule, source, state);
  noise.validate();
  const double dt = noise.single_gate_duration;
  const auto layers = gate_layers(schedule);
  const std::size_t Q = schedule.blocks.size();

  // Each non-empty layer takes dt from the block after it; trailing layers from the last block.
  std::vector<double> analog(Q);
  for (std::size_t q = 0; q < Q; ++q) {
    double charge = layers[q].empty() ? 0.0 : dt;
    if (q + 1 == Q) {
      charge += layers.back().empty() ? 0.0 : dt;
      charge += schedule.final_local_layer.empty() ? 0.0 : dt;
    }
    analog[q] = schedule.blocks[q].duration - charge;
    if (analog[q] < -1e-12)
      throw PreconditionError("block " + std::to_string(q) + " lasts " + std::to_string(schedule.blocks[q].duration) +
                              ", shorter than its embedded gate time " + std::to_string(charge));
    analog[q] = std::max(0.0, analog[q]);
  }

  QuantumState s = state;
  if (noisy(noise)) s.promote();
  const Propagator prop(source);
  BangCache local_cache;
  BangCache& bang = cache ? *cache : local_cache;
  const std::string source_key = fingerprint(source);
  const std::optional<NoiseModel> opt_noise = noise;

  auto banged = [&](const std::vector<LocalGate>& layer, const std::string& tag) {
    if (layer.empty()) return;
    if (Q == 0) {
      apply_layer(s, layer, opt_noise);
      return;
    }
    std::ostringstream key;
    key.precision(17);
    key << source_key << "#" << dt << "#" << tag;
    const MatrixXc& u = bang.get(key.str(), [&] {
      MatrixXc h = prop.dense();
      for (const auto& g : layer) h += embed_local(schedule.d, schedule.n, g.site, principal_generator(g.unitary, dt));
      Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (h + h.adjoint()));
      const VectorXc phases = (cplx(0, -dt) * es.eigenvalues().cast<cplx>()).array().exp().matrix();
      return MatrixXc(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
    });
    apply_unitary(s, u);
    if (noise.single_gate_fidelity < 1)
      for (const auto& g : layer) apply_gate_noise(s, {g.site}, noise.single_gate_fidelity);
    if (has_decay(noise)) apply_t1(s, dt, noise);
  };

  auto layer_tag = [&](std::size_t q) {
    std::ostringstream os;
    const GateWord identity(schedule.d, schedule.n);
    const GateWord& from = q == 0 ? identity : schedule.blocks[q - 1].word;
    const GateWord& to = q == Q ? identity : schedule.blocks[q].word;
    os << "w" << to_string(from) << ">" << to_string(to);
    return os.str();
  };

  auto local_tag = [&] {
    std::ostringstream os;
    os.precision(17);
    os << "local";
    for (const auto& g : schedule.final_local_layer) {
      os << "|" << g.site;
      for (Eigen::Index k = 0; k < g.unitary.size(); ++k) os << "," << g.unitary(k);
    }
    return os.str();
  };

  for (std::size_t q = 0; q < Q; ++q) {
    banged(layers[q], layer_tag(q));
    evolve(s, prop, analog[q], opt_noise);
  }
  banged(layers.back(), layer_tag(Q));
  banged(schedule.final_local_layer, local_tag());
  return s;
}

namespace {

MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
  MatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

bool is_scalar_identity(const MatrixXc& u) {
  return u.isApprox(u(0, 0) * MatrixXc::Identity(u.rows(), u.cols()), 1e-12);
}

}  // namespace

MatrixXc digital_bond_unitary(double theta, double T) {
  const MatrixXc sz = spin_operator(3, SpinAxis::z);
  const MatrixXc szp = sz * sz - (2.0 / 3.0) * MatrixXc::Identity(3, 3);
  const MatrixXc h = std::cos(theta) * kron(sz, sz) + std::sin(theta) * kron(szp, szp);
  VectorXc phases(9);
  for (int k = 0; k < 9; ++k) phases(k) = std::exp(cplx(0, -T) * h(k, k));
  return phases.asDiagonal();
}

MatrixXc digital_native_gate(double theta, double T) {
  const MatrixXc x = weyl_operator(3, WeylLabel(0, 1));
  const MatrixXc x2 = weyl_operator(3, WeylLabel(0, 2));
  return kron(x2, x2) * digital_bond_unitary(theta, T) * kron(x, x);
}

QuantumState run_digital(int n, double theta, double T, const std::optional<NoiseModel>& noise,
                         const QuantumState& state, DigitalCircuitStats* stats) {
  if (state.d() != 3) throw DimensionError("the digital baseline is defined for qutrits only");
  if (state.n() != n) throw DimensionError("state size does not match n");
  if (n < 2) throw DimensionError("the digital baseline needs n >= 2");
  if (noise) noise->validate();
  QuantumState s = state;
  if (noise && noisy(*noise)) s.promote();

  const MatrixXc x = weyl_operator(3, WeylLabel(0, 1));
  const MatrixXc x2 = weyl_operator(3, WeylLabel(0, 2));
  const MatrixXc native = digital_native_gate(theta, T);
  std::vector<std::vector<int>> bond_layers(2);
  for (int i = 0; i + 1 < n; ++i) bond_layers[i % 2].push_back(i);

  DigitalCircuitStats counts;
  // Pending single-qutrit gate per site; gates between two-qutrit layers merge.
  std::vector<MatrixXc> pending(n, MatrixXc::Identity(3, 3));
  auto flush = [&] {
    std::vector<LocalGate> layer;
    for (int site = 0; site < n; ++site) {
      if (!is_scalar_identity(pending[site])) layer.push_back({site, pending[site]});
      pending[site] = MatrixXc::Identity(3, 3);
    }
    counts.single_qudit_gates += static_cast<int>(layer.size());
    apply_layer(s, layer, noise);
  };

  for (const auto& bonds : bond_layers) {
    if (bonds.empty()) continue;
    for (int i : bonds) {
      pending[i] = x2 * pending[i];
      pending[i + 1] = x2 * pending[i + 1];
    }
    flush();
    for (int i : bonds) {
      apply_two_site_unitary(s, i, i + 1, native);
      if (noise && noise->two_gate_fidelity < 1) apply_gate_noise(s, {i, i + 1}, noise->two_gate_fidelity);
    }
    counts.two_qudit_gates += static_cast<int>(bonds.size());
    if (noise && has_decay(*noise)) apply_t1(s, noise->two_gate_duration, *noise);
    for (int i : bonds) {
      pending[i] = x * pending[i];
      pending[i + 1] = x * pending[i + 1];
    }
  }
  flush();
  if (stats) *stats = counts;
  return s;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 1) throw PreconditionError("grid needs at least one point");
  std::vector<double> out(points);
  for (int k = 0; k < points; ++k) out[k] = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
  return out;
}

std::vector<SweepRow> sweep(const SweepOptions& options) {
  options.noise.validate();
  const QuditHamiltonian source = zz_source(options.n, 3);
  const QuantumState ghz = ghz_state(3, options.n);
  const QuantumState ghz_rho = ghz_state(3, options.n, true);
  std::vector<SweepRow> rows(options.thetas.size());
  BangCache cache;

  auto run_point = [&](std::size_t k) {
    const double theta = options.thetas[k];
    const QuditHamiltonian problem = blbq_problem(options.n, theta).two_body_part();
    CompileOptions copt;
    copt.policy = options.policy;
    copt.delta_t = options.noise.single_gate_duration;
    copt.pruning_factor = options.pruning_factor;
    copt.theta = theta;
    SweepRow row;
    row.theta = theta;
    row.schedule = compile(source, problem, options.T, copt);
    row.t_A_r = row.schedule.metadata.total_analog_time;
    row.t_A = row.t_A_r + row.schedule.metadata.discarded_time;
    row.gate_count = gate_count(row.schedule);
    row.block_count = static_cast<int>(row.schedule.blocks.size());
    const QuantumState reference = ideal_evolution(problem, options.T, ghz);
    row.fidelity_bdaqc = state_fidelity(reference, run_bdaqc(row.schedule, source, options.noise, ghz_rho, &cache));
    row.fidelity_dqc = state_fidelity(reference, run_digital(options.n, theta, options.T, options.noise, ghz_rho));
    rows[k] = std::move(row);
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(rows.size())));
  if (threads <= 1) {
    for (std::size_t k = 0; k < rows.size(); ++k) run_point(k);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k; (k = next++) < rows.size();) run_point(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kSweepHeader) + "\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%d,%d\n", r.theta, r.t_A, r.t_A_r, r.fidelity_bdaqc,
                  r.fidelity_dqc, r.gate_count, r.block_count);
    out += buf;
  }
  return out;
}

}  // namespace daqc
