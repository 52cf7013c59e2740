// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "daqc/io.hpp"
#include "oracles.hpp"

using namespace daqc;
using oracle::Mat;

namespace {

// pinned tolerances
constexpr double kIdentityTol = 1e-9;
constexpr double kEigenTol = 1e-7;
constexpr double kRowSumRel = 1e-8;
constexpr double kDetSeconds = 10.0;
constexpr double kExactFidelity = 1e-8;
constexpr double kSpinTol = 1e-10;
constexpr double kSpinResidual = 1e-8;
constexpr double kT1Tol = 1e-10;
constexpr double kDepolTol = 2e-3;
constexpr double kSweepSeconds = 600.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

void criterion1() {
  bool ok = true;
  double worst_identity = 0, worst_eig = 0;
  for (int d : {2, 3, 4, 5})
    for (const auto& c : verify_properties(d).checks) {
      worst_identity = std::max(worst_identity, c.residual);
      ok = ok && c.passed && c.residual < kIdentityTol;
    }
  for (int d : {2, 3, 4})
    for (const auto& c : verify_eigenvalues(d).checks) {
      worst_eig = std::max(worst_eig, c.residual);
      ok = ok && c.passed && c.residual < kEigenTol;
    }
  report(1, ok, "S1-S6 d=2..5 worst " + fmt("%.2e", worst_identity) + ", spectra d=2..4 worst " + fmt("%.2e", worst_eig));
}

void criterion2() {
  bool ok = true;
  std::string detail;
  for (auto [d, n] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}, std::pair{3, 3}}) {
    const auto r = verify_row_sums(d, n);
    const double words = std::pow(double(d), 2 * n);
    for (const auto& c : r.checks) ok = ok && c.passed && c.residual < kRowSumRel * words;
    detail += "(" + std::to_string(d) + "," + std::to_string(n) + ") " + fmt("%.1e", r.checks.front().residual) + " ";
  }
  report(2, ok, "max |row sum| " + detail);
}

void criterion3() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (int d : {2, 3}) {
    const auto info = determinant_m2(d);
    const int side = (d * d - 1) * (d * d - 1);
    ok = ok && info.rank == side && info.exact_available && info.exact_decimal != "0" && info.mod_d2m1 != 0;
    detail += "d=" + std::to_string(d) + " rank " + std::to_string(info.rank) + "/" + std::to_string(side) +
              " log10|det| " + fmt("%.4f", info.log10_abs) + " mod " + std::to_string(info.mod_d2m1) + "; ";
  }
  const double s = seconds_since(t0);
  report(3, ok && s < kDetSeconds, detail + fmt("%.2f s", s));
}

void criterion4() {
  bool ok = true;
  double worst = 0;
  int worst_support_slack = 1 << 30;
  for (int n = 2; n <= 6; ++n) {
    const auto source = zz_source(n, 3);
    const auto ghz = ghz_state(3, n);
    for (double theta : linear_grid(0.0, M_PI, 9)) {
      const auto problem = blbq_problem(n, theta).two_body_part();
      const auto s = compile(source, problem, 1.0);
      const auto target = build_target(source, problem, 1.0);
      const auto out = run_sdaqc(s, source, std::nullopt, ghz);
      const double infid = 1.0 - state_fidelity(out, ideal_evolution(problem, 1.0, ghz));
      worst = std::max(worst, infid);
      const int bound = 2 * static_cast<int>(target.rows.size());
      worst_support_slack = std::min(worst_support_slack, bound - static_cast<int>(s.blocks.size()));
      ok = ok && infid <= kExactFidelity && static_cast<int>(s.blocks.size()) <= bound;
    }
  }
  report(4, ok, "n=2..6 x 9 angles: worst infidelity " + fmt("%.2e", worst) + ", min support slack " +
                    std::to_string(worst_support_slack));
}

void criterion5() {
  const auto source = zz_source(6, 3);
  CompileOptions o;
  o.delta_t = 0.01;
  const auto zero = compile(source, blbq_problem(6, 0.0).two_body_part(), 1.0, o);
  const bool zero_ok = zero.blocks.size() == 1 && gate_count(zero) == 0;
  const auto half = compile(source, blbq_problem(6, M_PI / 2).two_body_part(), 1.0, o);
  bool x_only = true;
  for (const auto& b : half.blocks)
    for (const auto& l : b.word.labels) x_only = x_only && l.a == 0;
  report(5, zero_ok && x_only,
         "theta=0: " + std::to_string(zero.blocks.size()) + " block, " + std::to_string(gate_count(zero)) +
             " gates; theta=pi/2: " + std::to_string(half.blocks.size()) + " blocks, X-power words only: " +
             (x_only ? "yes" : "no"));
}

void criterion6() {
  SweepOptions o;
  o.n = 6;
  o.T = 1.0;
  o.thetas = linear_grid(0.0, M_PI, 33);
  o.noise = NoiseModel::reference(1.0);
  o.pruning_factor = 4.0;
  const auto t0 = Clock::now();
  const auto rows = sweep(o);
  const double secs = seconds_since(t0);
  {
    std::ofstream csv("acceptance_sweep.csv");
    csv << format_sweep_csv(rows);
  }
  for (const auto& r : rows)
    std::printf("  theta %.4f  t_A %.4f  t_A_r %.4f  F_bdaqc %.4f  F_dqc %.4f  gates %2d  blocks %d\n", r.theta, r.t_A,
                r.t_A_r, r.fidelity_bdaqc, r.fidelity_dqc, r.gate_count, r.block_count);

  // (a) pruning only removes time, with strict drops near both ends
  const std::size_t m = rows.size();
  bool a_ok = true, drop_low = false, drop_high = false;
  for (std::size_t k = 0; k < m; ++k) {
    a_ok = a_ok && rows[k].t_A_r <= rows[k].t_A + 1e-12;
    if (rows[k].t_A_r < rows[k].t_A - 1e-12) {
      if (rows[k].theta < M_PI / 4) drop_low = true;
      if (rows[k].theta > 3 * M_PI / 4) drop_high = true;
    }
  }
  a_ok = a_ok && drop_low && drop_high;

  // (b) bDAQC ahead of the digital baseline somewhere inside (0, pi/2)
  int ahead = 0;
  for (const auto& r : rows)
    if (r.theta > 0 && r.theta < M_PI / 2 && r.fidelity_bdaqc > r.fidelity_dqc) ++ahead;
  const bool b_ok = ahead > 0;

  // (c) four contiguous gate-count regimes
  struct Regime {
    int count;
    std::size_t first, last;
  };
  std::vector<Regime> regimes;
  for (std::size_t k = 0; k < m; ++k) {
    if (regimes.empty() || regimes.back().count != rows[k].gate_count) regimes.push_back({rows[k].gate_count, k, k});
    else regimes.back().last = k;
  }
  std::string counts;
  for (const auto& g : regimes) counts += (counts.empty() ? "" : ",") + std::to_string(g.count);
  const bool exact_counts = counts == "0,18,27,9";
  bool c_ok = regimes.size() == 4;
  if (c_ok && !exact_counts) {
    // fallback: fidelity drops across every boundary where the count rises
    for (std::size_t g = 0; g + 1 < regimes.size(); ++g) {
      if (regimes[g + 1].count <= regimes[g].count) continue;
      auto mean = [&](const Regime& r) {
        double acc = 0;
        for (std::size_t k = r.first; k <= r.last; ++k) acc += rows[k].fidelity_bdaqc;
        return acc / double(r.last - r.first + 1);
      };
      c_ok = c_ok && rows[regimes[g + 1].first].fidelity_bdaqc < rows[regimes[g].last].fidelity_bdaqc &&
             mean(regimes[g + 1]) < mean(regimes[g]);
    }
  }
  const bool time_ok = secs <= kSweepSeconds;
  report(6, a_ok && b_ok && c_ok && time_ok,
         std::string("(a) ") + (a_ok ? "ok" : "fail") + " (b) " + std::to_string(ahead) + " angles ahead (c) regimes {" +
             counts + "}" + (exact_counts ? " match" : " vs {0,18,27,9}, partition fallback") + (c_ok ? " ok" : " fail") +
             "; " + fmt("%.1f s", secs));
}

void criterion7() {
  const char names[] = {'x', 'y', 'z'};
  double worst = 0;
  for (int d : {2, 3, 4, 5})
    for (int nu = 0; nu < 3; ++nu) {
      const Mat u = oracle::expm(cplx(0, -M_PI) * oracle::spin(d, names[nu]));
      for (int mu = 0; mu < 3; ++mu) {
        if (mu == nu) continue;
        const Mat s = oracle::spin(d, names[mu]);
        worst = std::max(worst, (u.adjoint() * s * u + s).cwiseAbs().maxCoeff());
      }
    }
  const auto source = heisenberg_chain(3, 3, 1.0, 1.0, 1.0);
  const auto problem = heisenberg_chain(3, 3, 0.7, -0.4, 1.2);
  const auto s = compile_spin(source, problem, 1.0);
  const double gen = (spin_schedule_generator(s, source) - materialize(problem)).cwiseAbs().maxCoeff();
  report(7, worst < kSpinTol && s.residual < kSpinResidual && gen < kSpinResidual,
         "pi-rotation worst " + fmt("%.2e", worst) + ", d=3 Heisenberg toy residual " + fmt("%.2e", s.residual) +
             ", generator error " + fmt("%.2e", gen) + ", " + std::to_string(s.blocks.size()) + " blocks");
}

void criterion8() {
  double worst_t1 = 0;
  NoiseModel noise;
  noise.t1 = 100.0;
  for (double t : {1.0, 25.0, 100.0, 250.0}) {
    auto s = QuantumState::basis(2, {1});
    apply_t1(s, t, noise);
    worst_t1 = std::max(worst_t1, std::abs(s.density()(1, 1).real() - std::exp(-t / noise.t1)));
  }
  std::mt19937 rng(12345);
  double acc = 0;
  const int samples = 10000;
  for (int k = 0; k < samples; ++k) {
    const auto psi = oracle::random_state(3, rng);
    auto s = QuantumState::mixed(3, 1, psi * psi.adjoint());
    apply_gate_noise(s, {0}, 0.994);
    acc += (psi.adjoint() * s.density() * psi)(0, 0).real();
  }
  const double gap = std::abs(acc / samples - 0.994);
  report(8, worst_t1 < kT1Tol && gap < kDepolTol,
         "T1 worst " + fmt("%.2e", worst_t1) + ", depolarizing average-fidelity gap " + fmt("%.2e", gap));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion7();
  criterion8();
  criterion6();
  std::printf("%d failed, %.1f s total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
