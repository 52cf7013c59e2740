#include "daqc/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "daqc/nnls.hpp"

namespace daqc {

std::string to_string(WordPolicy p) {
  switch (p) {
    case WordPolicy::automatic: return "auto";
    case WordPolicy::x_powers: return "x_powers";
    case WordPolicy::z_powers: return "z_powers";
    case WordPolicy::full: return "full";
  }
  return "?";
}

WordPolicy parse_word_policy(const std::string& s) {
  if (s == "auto") return WordPolicy::automatic;
  if (s == "x_powers") return WordPolicy::x_powers;
  if (s == "z_powers") return WordPolicy::z_powers;
  if (s == "full") return WordPolicy::full;
  throw PreconditionError("unknown word-set policy '" + s + "' (auto, x_powers, z_powers, full)");
}

TargetRatio build_target(const QuditHamiltonian& source, const QuditHamiltonian& problem, double T) {
  if (source.d() != problem.d() || source.n() != problem.n())
    throw DimensionError("source and problem differ in d or n");
  const auto compat = check_compatibility(source, problem);
  if (!compat.compatible()) {
    std::string pairs;
    for (auto [i, j] : compat.violations) pairs += " (" + std::to_string(i) + "," + std::to_string(j) + ")";
    throw IncompatibleError("source does not couple problem site pairs:" + pairs);
  }
  std::set<CouplingKey> keys;
  for (const auto& t : source.two_body()) keys.insert(t.key());
  for (const auto& t : source.one_body()) keys.insert(t.key());
  for (const auto& t : problem.two_body()) {
    if (source.coefficient(t.key()) == cplx(0))
      throw IncompatibleError("problem term " + to_string(t.key()) + " has no source counterpart (h_s = 0)");
    keys.insert(t.key());
  }
  TargetRatio target;
  target.rows.assign(keys.begin(), keys.end());
  target.values.resize(static_cast<Eigen::Index>(target.rows.size()));
  for (std::size_t r = 0; r < target.rows.size(); ++r) {
    const auto& key = target.rows[r];
    const cplx hp = key.is_local() ? cplx(0) : problem.coefficient(key);
    target.values(static_cast<Eigen::Index>(r)) = T * hp / source.coefficient(key);
  }
  return target;
}

namespace {

Eigen::MatrixXd stack(const MatrixXc& m) {
  Eigen::MatrixXd out(2 * m.rows(), m.cols());
  out << m.real(), m.imag();
  return out;
}

Eigen::VectorXd stack(const VectorXc& v) {
  Eigen::VectorXd out(2 * v.size());
  out << v.real(), v.imag();
  return out;
}

void check_rows(const PhaseMatrix& m, const TargetRatio& target) {
  if (m.rows != target.rows) throw DimensionError("phase matrix rows do not match the target rows");
}

}  // namespace

double feasibility_tolerance(const TargetRatio& target) {
  const double rmax = target.values.size() ? target.values.cwiseAbs().maxCoeff() : 0.0;
  return 1e-8 * std::max(1.0, rmax);
}

double stacked_residual(const PhaseMatrix& m, const Eigen::VectorXd& t, const TargetRatio& target) {
  check_rows(m, target);
  if (m.rows.empty()) return 0.0;
  return (stack(m.entries) * t - stack(target.values)).cwiseAbs().maxCoeff();
}

SolveOutcome solve_times(const PhaseMatrix& m, const TargetRatio& target) {
  check_rows(m, target);
  SolveOutcome out;
  if (m.columns.empty()) {
    out.durations = Eigen::VectorXd();
    out.feasible = target.values.size() == 0 || target.values.cwiseAbs().maxCoeff() == 0.0;
    out.diagnostic = "no gate-words offered";
    return out;
  }
  const NnlsResult r = nnls(stack(m.entries), stack(target.values));
  out.durations = r.x;
  out.residual = stacked_residual(m, r.x, target);
  out.feasible = out.residual < feasibility_tolerance(target);
  if (!out.feasible)
    out.diagnostic = "least-squares residual " + std::to_string(out.residual) + " over " +
                     std::to_string(m.columns.size()) + " words";
  return out;
}

Eigen::VectorXd sparsify_real(const Eigen::MatrixXd& A, const Eigen::VectorXd& t_in, const Eigen::VectorXd& b) {
  Eigen::VectorXd t = t_in.cwiseMax(0.0);
  while (true) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < t.size(); ++j)
      if (t(j) > 0) support.push_back(j);
    if (support.empty()) break;
    Eigen::MatrixXd As(A.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) As.col(k) = A.col(support[k]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) rank += sv(k) > cutoff;
    if (rank == static_cast<Eigen::Index>(support.size())) break;

    Eigen::VectorXd v = svd.matrixV().col(static_cast<Eigen::Index>(support.size()) - 1);
    const double vtol = 1e-12;
    if ((v.array() > vtol).count() == 0) v = -v;
    // Step along the null direction until the first coordinate hits zero; among ties the
    // highest column index leaves, keeping the lower indices.
    double alpha = std::numeric_limits<double>::infinity();
    std::size_t leave = 0;
    for (std::size_t k = 0; k < support.size(); ++k) {
      const double vk = v(static_cast<Eigen::Index>(k));
      if (vk <= vtol) continue;
      const double ratio = t(support[k]) / vk;
      if (ratio <= alpha * (1 + 1e-12)) {
        alpha = std::min(alpha, ratio);
        leave = k;
      }
    }
    for (std::size_t k = 0; k < support.size(); ++k) {
      double& x = t(support[k]);
      x -= alpha * v(static_cast<Eigen::Index>(k));
      if (x < 1e-15) x = 0.0;
    }
    t(support[leave]) = 0.0;
  }

  // Polish on the final support: exact least squares restores the digits lost along the way.
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < t.size(); ++j)
    if (t(j) > 0) support.push_back(j);
  if (!support.empty()) {
    Eigen::MatrixXd As(A.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) As.col(k) = A.col(support[k]);
    const NnlsResult polished = nnls(As, b);
    const double before = (A * t - b).cwiseAbs().maxCoeff();
    const double after = (As * polished.x - b).cwiseAbs().maxCoeff();
    if (after <= before) {
      t.setZero();
      for (std::size_t k = 0; k < support.size(); ++k) t(support[k]) = polished.x(static_cast<Eigen::Index>(k));
    }
  }
  return t;
}

Eigen::VectorXd sparsify(const PhaseMatrix& m, const Eigen::VectorXd& t, const TargetRatio& target) {
  check_rows(m, target);
  return sparsify_real(stack(m.entries), t, stack(target.values));
}

PruneResult prune_short_blocks(const Eigen::VectorXd& t, double delta_t, double factor) {
  if (delta_t < 0) throw PreconditionError("delta_t must be >= 0");
  PruneResult out{t, 0.0};
  const double threshold = factor * delta_t;
  for (Eigen::Index j = 0; j < t.size(); ++j)
    if (t(j) > 0 && t(j) < threshold) {
      out.discarded_time += t(j);
      out.durations(j) = 0.0;
    }
  return out;
}

int label_distance(const GateWord& a, const GateWord& b) {
  int dist = 0;
  for (std::size_t s = 0; s < a.labels.size(); ++s) dist += !(a.labels[s] == b.labels[s]);
  return dist;
}

std::vector<Block> order_blocks(std::vector<Block> blocks, BlockOrder order) {
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const Block& x, const Block& y) { return x.duration > y.duration; });
  if (order == BlockOrder::descending_duration || blocks.size() < 2) return blocks;

  const int k = static_cast<int>(blocks.size());
  const GateWord identity(blocks[0].word.d, blocks[0].word.n());
  std::vector<int> from_id(k), to_id(k);
  std::vector<std::vector<int>> dist(k, std::vector<int>(k));
  for (int a = 0; a < k; ++a) {
    from_id[a] = label_distance(identity, blocks[a].word);
    to_id[a] = label_distance(blocks[a].word, identity);
    for (int b = 0; b < k; ++b) dist[a][b] = label_distance(blocks[a].word, blocks[b].word);
  }

  std::vector<int> path;
  if (k <= 12) {
    // Held-Karp over subsets; strict improvement keeps the first optimum in duration order.
    const int full = (1 << k) - 1;
    const int inf = std::numeric_limits<int>::max() / 2;
    std::vector<std::vector<int>> cost(1 << k, std::vector<int>(k, inf));
    std::vector<std::vector<int>> prev(1 << k, std::vector<int>(k, -1));
    for (int a = 0; a < k; ++a) cost[1 << a][a] = from_id[a];
    for (int mask = 1; mask <= full; ++mask)
      for (int last = 0; last < k; ++last) {
        if (!(mask & (1 << last)) || cost[mask][last] >= inf) continue;
        for (int next = 0; next < k; ++next) {
          if (mask & (1 << next)) continue;
          const int nm = mask | (1 << next);
          const int c = cost[mask][last] + dist[last][next];
          if (c < cost[nm][next]) {
            cost[nm][next] = c;
            prev[nm][next] = last;
          }
        }
      }
    int best = inf, last = -1;
    for (int a = 0; a < k; ++a)
      if (cost[full][a] + to_id[a] < best) {
        best = cost[full][a] + to_id[a];
        last = a;
      }
    for (int mask = full; last >= 0;) {
      path.push_back(last);
      const int p = prev[mask][last];
      mask &= ~(1 << last);
      last = p;
    }
    std::reverse(path.begin(), path.end());
  } else {
    std::vector<bool> used(k, false);
    int cur = -1;
    for (int step = 0; step < k; ++step) {
      int pick = -1, best = std::numeric_limits<int>::max();
      for (int a = 0; a < k; ++a) {
        if (used[a]) continue;
        const int c = cur < 0 ? from_id[a] : dist[cur][a];
        if (c < best) {
          best = c;
          pick = a;
        }
      }
      used[pick] = true;
      path.push_back(pick);
      cur = pick;
    }
  }
  std::vector<Block> out;
  out.reserve(blocks.size());
  for (int a : path) out.push_back(std::move(blocks[a]));
  return out;
}

std::vector<LocalGate> local_layer(const QuditHamiltonian& problem, double T) {
  const int d = problem.d();
  std::map<int, MatrixXc> per_site;
  for (const auto& t : problem.one_body()) {
    auto [it, inserted] = per_site.try_emplace(t.site, MatrixXc::Zero(d, d));
    it->second += t.coefficient * weyl_operator(d, t.label);
  }
  std::vector<LocalGate> out;
  for (auto& [site, h] : per_site) {
    const MatrixXc herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(herm);
    const VectorXc phases = (cplx(0, -T) * es.eigenvalues().cast<cplx>()).array().exp().matrix();
    out.push_back({site, es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint()});
  }
  return out;
}

Schedule compile(const QuditHamiltonian& source, const QuditHamiltonian& problem, double T,
                 const CompileOptions& options) {
  if (!(T >= 0)) throw PreconditionError("total time T must be >= 0");
  if (options.trotter_steps < 1) throw PreconditionError("trotter_steps must be >= 1");
  const int d = source.d(), n = source.n();
  const TargetRatio target = build_target(source, problem, T);

  std::vector<WordPolicy> attempts;
  switch (options.policy) {
    case WordPolicy::automatic:
      if (source.is_diagonal()) attempts = {WordPolicy::x_powers, WordPolicy::full};
      else if (source.is_x_type()) attempts = {WordPolicy::z_powers, WordPolicy::full};
      else attempts = {WordPolicy::full};
      break;
    default: attempts = {options.policy};
  }

  PhaseMatrix m;
  SolveOutcome outcome;
  std::string failures;
  for (std::size_t a = 0; a < attempts.size(); ++a) {
    const LabelSet set = attempts[a] == WordPolicy::x_powers   ? LabelSet::x_powers
                         : attempts[a] == WordPolicy::z_powers ? LabelSet::z_powers
                                                               : LabelSet::all;
    if (count_words(d, n, options.max_weight, set, options.full_word_cap) > options.full_word_cap) {
      failures += " " + to_string(attempts[a]) + ": word set exceeds cap;";
      continue;
    }
    m = deduplicate_columns(build_matrix(d, n, target.rows, enumerate_words(d, n, options.max_weight, set)));
    outcome = solve_times(m, target);
    if (outcome.feasible) break;
    failures += " " + to_string(attempts[a]) + ": " + outcome.diagnostic + ";";
  }
  if (!outcome.feasible)
    throw InfeasibleError("no non-negative schedule found (policy " + to_string(options.policy) + "):" + failures,
                          to_string(options.policy));

  Eigen::VectorXd t = sparsify(m, outcome.durations, target);
  const double residual = stacked_residual(m, t, target);

  Schedule s;
  s.d = d;
  s.n = n;
  s.T = T;
  s.metadata.theta = options.theta;
  s.metadata.residual = residual;
  if (options.delta_t) {
    s.metadata.pruning_threshold = options.pruning_factor * *options.delta_t;
    auto pruned = prune_short_blocks(t, *options.delta_t, options.pruning_factor);
    t = pruned.durations;
    s.metadata.discarded_time = pruned.discarded_time;
  }

  std::vector<Block> blocks;
  for (Eigen::Index j = 0; j < t.size(); ++j)
    if (t(j) > 0) blocks.push_back({m.columns[static_cast<std::size_t>(j)], t(j)});
  blocks = order_blocks(std::move(blocks), options.order);
  const int r = options.trotter_steps;
  for (int rep = 0; rep < r; ++rep)
    for (const auto& b : blocks) s.blocks.push_back({b.word, b.duration / r});
  s.final_local_layer = local_layer(problem, T);
  s.metadata.total_analog_time = total_duration(s);
  return s;
}

std::vector<std::vector<LocalGate>> gate_layers(const Schedule& s) {
  std::vector<std::vector<LocalGate>> layers;
  const GateWord identity(s.d, s.n);
  const GateWord* prev = &identity;
  auto boundary = [&](const GateWord& next) {
    std::vector<LocalGate> layer;
    for (int site = 0; site < s.n; ++site) {
      const WeylLabel& from = prev->labels[site];
      const WeylLabel& to = next.labels[site];
      if (from == to) continue;
      layer.push_back({site, weyl_operator(s.d, to) * weyl_operator(s.d, from).adjoint()});
    }
    layers.push_back(std::move(layer));
  };
  for (const auto& b : s.blocks) {
    boundary(b.word);
    prev = &b.word;
  }
  boundary(identity);
  return layers;
}

int gate_count(const Schedule& s) {
  int count = 0;
  for (const auto& layer : gate_layers(s)) count += static_cast<int>(layer.size());
  for (const auto& g : s.final_local_layer)
    if (!g.unitary.isApprox(g.unitary(0, 0) * MatrixXc::Identity(s.d, s.d), 1e-12)) ++count;
  return count;
}

double total_duration(const Schedule& s) {
  double total = 0;
  for (const auto& b : s.blocks) total += b.duration;
  return total;
}

double certificate_residual(const Schedule& s, const TargetRatio& target) {
  double worst = 0;
  for (std::size_t r = 0; r < target.rows.size(); ++r) {
    cplx acc = 0;
    for (const auto& b : s.blocks) acc += b.duration * coupling_phase(s.d, target.rows[r], b.word);
    worst = std::max(worst, std::abs(acc - target.values(static_cast<Eigen::Index>(r))));
  }
  return worst;
}

namespace {

SpinCouplingKey normalized(const SpinCoupling& c) {
  if (c.site_i < c.site_j) return {c.site_i, c.site_j, c.mu, c.nu};
  return {c.site_j, c.site_i, c.nu, c.mu};
}

}  // namespace

SpinSchedule compile_spin(const SpinHamiltonian& source, const SpinHamiltonian& problem, double T) {
  if (source.d != problem.d || source.n != problem.n) throw DimensionError("source and problem differ in d or n");
  std::set<SpinCouplingKey> keys;
  for (const auto& c : source.terms) keys.insert(normalized(c));
  for (const auto& c : problem.terms) keys.insert(normalized(c));
  SpinSchedule out;
  out.d = source.d;
  out.n = source.n;
  out.T = T;
  Eigen::VectorXd target(static_cast<Eigen::Index>(keys.size()));
  Eigen::Index r = 0;
  for (const auto& k : keys) {
    const double hs = source.coefficient(k.site_i, k.site_j, k.mu, k.nu);
    const double hp = problem.coefficient(k.site_i, k.site_j, k.mu, k.nu);
    if (hs == 0.0) {
      if (hp == 0.0) continue;
      throw IncompatibleError("problem spin coupling on (" + std::to_string(k.site_i) + "," +
                              std::to_string(k.site_j) + ") has no source counterpart");
    }
    out.rows.push_back(k);
    target(r++) = T * hp / hs;
  }
  target.conservativeResize(r);

  const auto words = enumerate_spin_words(source.n);
  const Eigen::MatrixXd A = build_spin_sign_matrix(out.rows, words);
  const NnlsResult sol = nnls(A, target);
  const Eigen::VectorXd t = sparsify_real(A, sol.x, target);
  out.residual = r ? (A * t - target).cwiseAbs().maxCoeff() : 0.0;
  if (!(out.residual < 1e-8 * std::max(1.0, target.size() ? target.cwiseAbs().maxCoeff() : 0.0)))
    throw InfeasibleError("spin-basis system has no non-negative solution, residual " + std::to_string(out.residual),
                          "spin_words");
  for (Eigen::Index j = 0; j < t.size(); ++j)
    if (t(j) > 0) out.blocks.push_back({words[static_cast<std::size_t>(j)], t(j)});
  return out;
}

MatrixXc spin_schedule_generator(const SpinSchedule& s, const SpinHamiltonian& source) {
  const MatrixXc hs = materialize(source);
  MatrixXc acc = MatrixXc::Zero(hs.rows(), hs.cols());
  for (const auto& b : s.blocks) {
    const MatrixXc g = spin_word_unitary(s.d, b.word);
    acc += b.duration * (g.adjoint() * hs * g);
  }
  return acc;
}

}  // namespace daqc
