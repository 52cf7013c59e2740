#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "daqc/schedule.hpp"

namespace daqc {

/// Largest dimension for density-matrix runs and for pure-state runs.
inline constexpr std::size_t kDensityCap = 729;
inline constexpr std::size_t kPureCap = std::size_t(1) << 14;

/// Pure amplitude vector or density matrix of n qudits; site 0 is the most significant digit.
class QuantumState {
 public:
  static QuantumState pure(int d, int n, VectorXc psi);
  static QuantumState mixed(int d, int n, MatrixXc rho);
  /// |k_0 k_1 ... k_{n-1}>.
  static QuantumState basis(int d, const std::vector<int>& digits);

  int d() const { return d_; }
  int n() const { return n_; }
  Eigen::Index dimension() const;
  bool is_pure() const { return std::holds_alternative<VectorXc>(data_); }

  const VectorXc& vector() const { return std::get<VectorXc>(data_); }
  VectorXc& vector() { return std::get<VectorXc>(data_); }
  const MatrixXc& density() const { return std::get<MatrixXc>(data_); }
  MatrixXc& density() { return std::get<MatrixXc>(data_); }

  /// Switches to the density-matrix representation in place.
  QuantumState& promote();
  /// Density matrix, built on the fly for pure states.
  MatrixXc density_matrix() const;

  double trace() const;
  /// Smallest eigenvalue of the density matrix (0 for pure states).
  double min_eigenvalue() const;

 private:
  QuantumState(int d, int n, std::variant<VectorXc, MatrixXc> data);

  int d_ = 2;
  int n_ = 0;
  std::variant<VectorXc, MatrixXc> data_;
};

/// Gate and decoherence parameters. t1 may be infinite (no decay).
struct NoiseModel {
  double t1 = std::numeric_limits<double>::infinity();
  double single_gate_duration = 0.01;
  double single_gate_fidelity = 1.0;
  double two_gate_fidelity = 1.0;
  double two_gate_duration = 0.1;

  /// T1 = 100 T, gate 0.01 T at 99.4 %, two-qutrit gates 95 % lasting 10 single-gate durations.
  static NoiseModel reference(double T = 1.0);
  /// Perfect gates and no decay, keeping the given gate duration.
  static NoiseModel ideal(double delta_t);
  void validate() const;
};

QuantumState ghz_state(int d, int n, bool density = false);

/// Applies a d x d unitary on one site (pure or mixed).
void apply_local_unitary(QuantumState& s, int site, const MatrixXc& u);
/// Applies a d^2 x d^2 unitary on two sites, site_a as the more significant factor.
void apply_two_site_unitary(QuantumState& s, int site_a, int site_b, const MatrixXc& u);
/// Multiplies by diag(phases).
void apply_diagonal_unitary(QuantumState& s, const VectorXc& phases);
/// Applies a dense d^n x d^n unitary.
void apply_unitary(QuantumState& s, const MatrixXc& u);

/// Cascade amplitude damping for `duration`: level k decays to k-1 at rate 1/t1.
/// Column-major vectorization: vec(rho)[x + d y] = rho(x, y).
MatrixXc t1_superoperator(int d, double t1, double duration);
/// Applies a d^2 x d^2 superoperator to one site of a density matrix.
void apply_local_superoperator(MatrixXc& rho, int d, int n, int site, const MatrixXc& superop);

/// Amplitude damping on every qudit for `duration`; pure states are promoted.
void apply_t1(QuantumState& s, double duration, const NoiseModel& noise);
/// Depolarizing channel on one or two sites with average gate fidelity `fidelity`.
void apply_gate_noise(QuantumState& s, const std::vector<int>& sites, double fidelity);
/// Probability of a uniformly random non-identity Weyl error, p = (1-F)(D+1)/D.
double depolarizing_probability(double fidelity, int local_dim);

/// Uhlmann fidelity; <psi|rho|psi> when either state is pure.
double state_fidelity(const QuantumState& a, const QuantumState& b);

/// exp(-i t H) for a fixed Hamiltonian; diagonal Hamiltonians skip the eigendecomposition.
class Propagator {
 public:
  explicit Propagator(const QuditHamiltonian& h);
  void apply(QuantumState& s, double t) const;
  /// Left-multiplies an operator (columns are states).
  void apply_left(MatrixXc& m, double t) const;
  bool diagonal() const { return diagonal_; }
  /// Dense Hamiltonian matrix (built for non-diagonal ones, or on request).
  MatrixXc dense() const;

 private:
  QuditHamiltonian h_;
  bool diagonal_ = true;
  Eigen::VectorXd energies_;
  MatrixXc vectors_;
};

QuantumState ideal_evolution(const QuditHamiltonian& h, double T, const QuantumState& state);

/// Stepwise execution: gates with the source switched off, analog blocks in between.
QuantumState run_sdaqc(const Schedule& schedule, const QuditHamiltonian& source,
                       const std::optional<NoiseModel>& noise, const QuantumState& state);

/// Unitary of a noiseless stepwise execution.
MatrixXc sdaqc_unitary(const Schedule& schedule, const QuditHamiltonian& source);

/// Per-run cache of banged gate-layer unitaries, keyed by layer content and duration.
class BangCache {
 public:
  const MatrixXc& get(const std::string& key, const std::function<MatrixXc()>& build);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const MatrixXc>> entries_;
};

/// Principal generator H with exp(-i dt H) = u, eigenphases folded into (-pi, pi].
MatrixXc principal_generator(const MatrixXc& u, double dt);

/// Banged execution: each gate layer runs for one gate duration on top of the source,
/// taking that time from the adjacent block.
QuantumState run_bdaqc(const Schedule& schedule, const QuditHamiltonian& source, const NoiseModel& noise,
                       const QuantumState& state, BangCache* cache = nullptr);

/// exp(-i T h) on one bond of the digital circuit, h = cos S_zS_z + sin S_z'^2 S_z'^2.
MatrixXc digital_bond_unitary(double theta, double T);
/// Native two-qutrit gate: conjugating it by X^2 (x) X^2 before and X (x) X after gives the bond unitary.
MatrixXc digital_native_gate(double theta, double T);

struct DigitalCircuitStats {
  int two_qudit_gates = 0;
  int single_qudit_gates = 0;
};

/// Brick-wall circuit: even bonds, then odd bonds. Noise is optional.
QuantumState run_digital(int n, double theta, double T, const std::optional<NoiseModel>& noise,
                         const QuantumState& state, DigitalCircuitStats* stats = nullptr);

struct SweepOptions {
  int n = 6;
  double T = 1.0;
  std::vector<double> thetas;
  NoiseModel noise = NoiseModel::reference();
  double pruning_factor = 4.0;
  WordPolicy policy = WordPolicy::automatic;
  unsigned threads = 1;
};

struct SweepRow {
  double theta = 0.0;
  double t_A = 0.0;
  double t_A_r = 0.0;
  double fidelity_bdaqc = 0.0;
  double fidelity_dqc = 0.0;
  int gate_count = 0;
  int block_count = 0;
  Schedule schedule;
};

/// Evenly spaced grid on [lo, hi] with `points` entries.
std::vector<double> linear_grid(double lo, double hi, int points);

/// Compiles and runs the BLBQ two-body problem at every theta on a ZZ chain.
std::vector<SweepRow> sweep(const SweepOptions& options);

inline constexpr const char* kSweepHeader = "theta,t_A,t_A_r,fidelity_bdaqc,fidelity_dqc,gate_count,block_count";
std::string format_sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace daqc
