#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "daqc/phase_matrix.hpp"

namespace daqc {

/// Which gate-words the compiler offers the solver.
enum class WordPolicy { automatic, x_powers, z_powers, full };

std::string to_string(WordPolicy p);
WordPolicy parse_word_policy(const std::string& s);

/// How compiled blocks are ordered in time.
enum class BlockOrder { min_gates, descending_duration };

struct CompileOptions {
  WordPolicy policy = WordPolicy::automatic;
  int max_weight = -1;                 ///< < 0: no limit
  std::optional<double> delta_t;       ///< single-gate duration; enables pruning when set
  double pruning_factor = 4.0;
  int trotter_steps = 1;
  std::optional<double> theta;         ///< recorded in the metadata only
  BlockOrder order = BlockOrder::min_gates;
  std::size_t full_word_cap = 1000000; ///< largest word set the full policy may enumerate
};

/// r_q = T h_p / h_s on every row the source or problem touches.
struct TargetRatio {
  std::vector<CouplingKey> rows;
  VectorXc values;
};

/// Problem coupling on a site pair the source leaves uncoupled, or on a Weyl term the source lacks.
struct IncompatibleError : PreconditionError {
  using PreconditionError::PreconditionError;
};

/// No non-negative durations reproduce the target with the offered words.
struct InfeasibleError : std::runtime_error {
  InfeasibleError(const std::string& what, std::string policy_)
      : std::runtime_error(what), policy(std::move(policy_)) {}
  std::string policy;
};

/// Rows: source two-body and one-body keys plus problem two-body keys, sorted.
/// Source-only rows carry target 0 so their contribution cancels.
TargetRatio build_target(const QuditHamiltonian& source, const QuditHamiltonian& problem, double T);

struct SolveOutcome {
  bool feasible = false;
  Eigen::VectorXd durations;
  double residual = 0.0;  ///< |M t - r|_inf over the stacked real system
  std::string diagnostic;
};

/// Stacks [Re M; Im M] t = [Re r; Im r] and solves it with t >= 0.
SolveOutcome solve_times(const PhaseMatrix& m, const TargetRatio& target);

/// |M t - r|_inf over the stacked real system.
double stacked_residual(const PhaseMatrix& m, const Eigen::VectorXd& t, const TargetRatio& target);

/// Tolerance on stacked_residual for a solution to count as feasible.
double feasibility_tolerance(const TargetRatio& target);

/// Reduces a non-negative solution of A t = b to linearly independent support columns.
Eigen::VectorXd sparsify_real(const Eigen::MatrixXd& A, const Eigen::VectorXd& t, const Eigen::VectorXd& b);
Eigen::VectorXd sparsify(const PhaseMatrix& m, const Eigen::VectorXd& t, const TargetRatio& target);

struct PruneResult {
  Eigen::VectorXd durations;
  double discarded_time = 0.0;
};

/// Zeroes entries with 0 < t_i < factor * delta_t.
PruneResult prune_short_blocks(const Eigen::VectorXd& t, double delta_t, double factor = 4.0);

struct Block {
  GateWord word;
  double duration = 0.0;
};

struct LocalGate {
  int site = 0;
  MatrixXc unitary;
};

struct ScheduleMetadata {
  std::optional<double> theta;
  double pruning_threshold = 0.0;
  double total_analog_time = 0.0;
  double discarded_time = 0.0;
  double residual = 0.0;
};

struct Schedule {
  int d = 2;
  int n = 0;
  double T = 0.0;
  std::vector<Block> blocks;
  std::vector<LocalGate> final_local_layer;
  ScheduleMetadata metadata;
};

Schedule compile(const QuditHamiltonian& source, const QuditHamiltonian& problem, double T,
                 const CompileOptions& options = {});

/// Reorders blocks; min_gates minimizes the merged gate count (exact for up to 12 blocks).
std::vector<Block> order_blocks(std::vector<Block> blocks, BlockOrder order);

/// Single-qudit gates between consecutive blocks: layer q sits before block q and holds
/// W_{w_q} W_{w_{q-1}}^dag on every site where the labels differ; the last layer undoes the
/// final word. Identity words stand before the first and after the last block.
std::vector<std::vector<LocalGate>> gate_layers(const Schedule& s);

/// Number of sites whose labels differ between two words.
int label_distance(const GateWord& a, const GateWord& b);

/// Non-identity single-qudit gates, counted after merging each boundary into one gate per site,
/// plus the final local layer.
int gate_count(const Schedule& s);

/// Sum of durations.
double total_duration(const Schedule& s);

/// Re-evaluates sum_q t_q phase(row, word_q) against the target, inf-norm over complex rows.
double certificate_residual(const Schedule& s, const TargetRatio& target);

/// exp(-i T sum of one-body terms) per site, identity sites omitted.
std::vector<LocalGate> local_layer(const QuditHamiltonian& problem, double T);

struct SpinBlock {
  SpinWord word;
  double duration = 0.0;
};

struct SpinSchedule {
  int d = 2;
  int n = 0;
  double T = 0.0;
  std::vector<SpinCouplingKey> rows;
  std::vector<SpinBlock> blocks;
  double residual = 0.0;
};

/// Compiles a spin-basis problem onto a spin-basis source with words of pi rotations,
/// whose sign matrix is the qubit one for every d.
SpinSchedule compile_spin(const SpinHamiltonian& source, const SpinHamiltonian& problem, double T);

/// sum_q t_q G_q^dag H_S G_q as a dense matrix.
MatrixXc spin_schedule_generator(const SpinSchedule& s, const SpinHamiltonian& source);

}  // namespace daqc
