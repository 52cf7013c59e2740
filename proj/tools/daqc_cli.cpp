// daqc: verify the phase-matrix algebra, compile DAQC schedules, run sweeps and simulations.
//
// Exit codes: 0 ok, 1 internal error or failed verification, 2 usage, 3 infeasible or incompatible.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "daqc/io.hpp"

using namespace daqc;

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kInfeasible = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<int> parse_d_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int d = 0;
    try {
      d = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw UsageError("malformed --d entry '" + item + "'");
    }
    if (used != item.size() || d < 2 || d > 5) throw UsageError("--d entries must be integers in [2, 5], got '" + item + "'");
    out.push_back(d);
  }
  if (out.empty()) throw UsageError("--d needs at least one dimension");
  return out;
}

std::string normalize_property(std::string p) {
  std::string out;
  for (char c : p)
    if (c != '.' && c != '(' && c != ')') out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool matches(const std::string& filter, const std::string& name) {
  if (filter.empty()) return true;
  return normalize_property(name).rfind(filter, 0) == 0;
}

RunConfig load_config(const std::string& path) {
  RunConfig c = path.empty() ? RunConfig{} : config_from_json(read_json_file(path));
  return c;
}

void print_report(const PropertyReport& r) {
  for (const auto& c : r.checks)
    std::printf("%-4s %-12s d=%d residual=%.3e tol=%.1e  %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.d,
                c.residual, c.tolerance, c.detail.c_str());
}

// ---- verify ----

struct VerifyArgs {
  std::string d_list = "2,3";
  std::string property;
  std::string report;
};

int cmd_verify(const VerifyArgs& a) {
  const auto dims = parse_d_list(a.d_list);
  const std::string filter = normalize_property(a.property);
  auto wants = [&](std::initializer_list<const char*> names) {
    for (const char* n : names)
      if (filter.empty() || normalize_property(n).rfind(filter, 0) == 0 || filter.rfind(normalize_property(n), 0) == 0)
        return true;
    return false;
  };
  PropertyReport all;
  for (int d : dims) {
    if (wants({"S1", "S2", "S3", "S4", "S5", "S6"})) all.append(verify_properties(d));
    if (d <= 4 && wants({"eig_M2", "eig_M11", "eig_M12", "eig_M0"})) all.append(verify_eigenvalues(d));
    if (wants({"row_sums"}))
      for (int n : {2, 3})
        if (count_words(d, n, -1, LabelSet::all, 1000000) <= 1000000) all.append(verify_row_sums(d, n));
    if (d <= 3 && wants({"det_rank", "det_nonzero", "det_mod"})) all.append(verify_determinant(d));
  }
  PropertyReport selected;
  for (const auto& c : all.checks)
    if (matches(filter, c.name)) selected.checks.push_back(c);
  if (selected.checks.empty()) throw UsageError("no check matches --property '" + a.property + "'");
  print_report(selected);
  if (!a.report.empty()) write_text_file(a.report, to_json(selected).dump(2) + "\n");
  std::printf("%s: %zu checks\n", selected.all_passed() ? "all passed" : "FAILURES", selected.checks.size());
  return selected.all_passed() ? kOk : kInternal;
}

// ---- compile ----

struct ProblemArgs {
  std::string config;
  std::string source;
  std::string problem;
  std::optional<double> theta;
  std::optional<int> n;
  std::optional<double> T;
};

struct Inputs {
  RunConfig config;
  QuditHamiltonian source;
  QuditHamiltonian problem;
};

Inputs load_inputs(const ProblemArgs& a) {
  Inputs in;
  in.config = load_config(a.config);
  if (a.n) in.config.n = *a.n;
  if (a.T) in.config.T = *a.T;
  if (a.theta) in.config.theta = *a.theta;
  in.config.validate();

  if (!a.problem.empty()) {
    in.problem = hamiltonian_from_json(read_json_file(a.problem));
    in.config.d = in.problem.d();
    in.config.n = in.problem.n();
  } else {
    if (!in.config.theta) throw UsageError("give --problem or --theta (builtin BLBQ chain)");
    if (in.config.d != 3) throw UsageError("the builtin BLBQ chain is a qutrit model; set d = 3");
    in.problem = blbq_problem(in.config.n, *in.config.theta).two_body_part();
  }
  in.source = a.source.empty() ? zz_source(in.config.n, in.config.d) : hamiltonian_from_json(read_json_file(a.source));
  return in;
}

struct CompileArgs {
  ProblemArgs problem;
  std::string out;
  std::string policy;
  bool no_prune = false;
  int trotter = 1;
};

int cmd_compile(const CompileArgs& a) {
  Inputs in = load_inputs(a.problem);
  CompileOptions opt;
  opt.policy = parse_word_policy(a.policy.empty() ? in.config.word_set_policy : a.policy);
  opt.pruning_factor = in.config.pruning_factor;
  if (!a.no_prune) opt.delta_t = in.config.delta_t_over_T * in.config.T;
  opt.theta = in.config.theta;
  opt.trotter_steps = a.trotter;
  const Schedule s = compile(in.source, in.problem, in.config.T, opt);
  const std::string out = a.out.empty() ? in.config.schedule_out : a.out;
  if (!out.empty()) write_text_file(out, to_json(s).dump(2) + "\n");
  else std::cout << to_json(s).dump(2) << "\n";
  std::fprintf(stderr, "residual %.3e  blocks %zu  gates %d  analog time %.6g  discarded %.6g\n", s.metadata.residual,
               s.blocks.size(), gate_count(s), s.metadata.total_analog_time, s.metadata.discarded_time);
  return kOk;
}

// ---- sweep ----

struct SweepArgs {
  std::string config;
  std::optional<int> n;
  std::optional<int> points;
  std::string out;
  std::string schedule_dir;
  std::optional<unsigned> threads;
};

int cmd_sweep(const SweepArgs& a) {
  RunConfig c = load_config(a.config);
  if (a.n) c.n = *a.n;
  if (a.threads) c.threads = *a.threads;
  if (!a.out.empty()) c.results_out = a.out;
  if (!a.schedule_dir.empty()) c.schedule_dir = a.schedule_dir;
  if (a.points) {
    if (*a.points < 1) throw UsageError("--points must be >= 1");
    c.theta_grid = linear_grid(0.0, M_PI, *a.points);
  }
  c.validate();
  if (c.d != 3) throw UsageError("the sweep runs the qutrit BLBQ chain; set d = 3");

  SweepOptions opt;
  opt.n = c.n;
  opt.T = c.T;
  opt.thetas = c.thetas();
  opt.noise = c.noise();
  opt.pruning_factor = c.pruning_factor;
  opt.policy = parse_word_policy(c.word_set_policy);
  opt.threads = c.threads;
  const auto rows = sweep(opt);

  const std::string csv = format_sweep_csv(rows);
  if (c.results_out.empty()) std::cout << csv;
  else write_text_file(c.results_out, csv);
  if (!c.schedule_dir.empty()) {
    std::filesystem::create_directories(c.schedule_dir);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "schedule_%03zu.json", k);
      write_text_file((std::filesystem::path(c.schedule_dir) / name).string(), to_json(rows[k].schedule).dump(2) + "\n");
    }
  }
  return kOk;
}

// ---- simulate ----

struct SimulateArgs {
  ProblemArgs problem;
  std::string schedule;
  std::string mode = "sdaqc";
  bool noisy = false;
};

int cmd_simulate(const SimulateArgs& a) {
  const Schedule s = schedule_from_json(read_json_file(a.schedule));
  ProblemArgs pa = a.problem;
  if (!pa.n) pa.n = s.n;
  if (!pa.T) pa.T = s.T;
  if (!pa.theta && pa.problem.empty() && s.metadata.theta) pa.theta = s.metadata.theta;
  const Inputs in = load_inputs(pa);
  if (in.source.d() != s.d || in.source.n() != s.n) throw UsageError("schedule and Hamiltonians differ in d or n");

  const QuantumState ghz = ghz_state(s.d, s.n);
  const QuantumState reference = ideal_evolution(in.problem, s.T, ghz);
  const NoiseModel noise = a.noisy ? in.config.noise() : NoiseModel::ideal(in.config.delta_t_over_T * in.config.T);
  QuantumState out = ghz;
  if (a.mode == "sdaqc") {
    out = run_sdaqc(s, in.source, a.noisy ? std::optional<NoiseModel>(noise) : std::nullopt,
                    a.noisy ? ghz_state(s.d, s.n, true) : ghz);
  } else if (a.mode == "bdaqc") {
    out = run_bdaqc(s, in.source, noise, a.noisy ? ghz_state(s.d, s.n, true) : ghz);
  } else {
    throw UsageError("--mode must be sdaqc or bdaqc");
  }
  std::printf("mode %s  noise %s  blocks %zu  gates %d  fidelity %.12f\n", a.mode.c_str(), a.noisy ? "on" : "off",
              s.blocks.size(), gate_count(s), state_fidelity(reference, out));
  return kOk;
}

void add_problem_options(CLI::App* cmd, ProblemArgs& p) {
  cmd->add_option("--config", p.config, "run configuration (JSON)");
  cmd->add_option("--source", p.source, "source Hamiltonian (JSON); default ZZ chain");
  cmd->add_option("--problem", p.problem, "problem Hamiltonian (JSON)");
  cmd->add_option("--theta", p.theta, "builtin BLBQ problem angle");
  cmd->add_option("--n", p.n, "number of qudits")->check(CLI::PositiveNumber);
  cmd->add_option("--T", p.T, "total simulated time")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital-analog compilation for qudits"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "check the phase-matrix identities");
  verify->add_option("--d", va.d_list, "comma-separated dimensions");
  verify->add_option("--property", va.property, "run only checks whose name starts with this");
  verify->add_option("--report", va.report, "write the JSON report here");

  CompileArgs ca;
  auto* comp = app.add_subcommand("compile", "solve for block durations and write a schedule");
  add_problem_options(comp, ca.problem);
  comp->add_option("--out", ca.out, "schedule file");
  comp->add_option("--policy", ca.policy, "word set: auto, x_powers, z_powers, full");
  comp->add_flag("--no-prune", ca.no_prune, "keep blocks shorter than the pruning threshold");
  comp->add_option("--trotter", ca.trotter, "Trotter repetitions")->check(CLI::PositiveNumber);

  SweepArgs sa;
  auto* sw = app.add_subcommand("sweep", "bDAQC vs digital fidelity over a theta grid");
  sw->add_option("--config", sa.config, "run configuration (JSON)");
  sw->add_option("--n", sa.n, "number of qutrits")->check(CLI::PositiveNumber);
  sw->add_option("--points", sa.points, "theta grid points on [0, pi]");
  sw->add_option("--out", sa.out, "result table (CSV)");
  sw->add_option("--schedule-dir", sa.schedule_dir, "dump each compiled schedule here");
  sw->add_option("--threads", sa.threads, "worker threads");

  SimulateArgs sim;
  auto* simc = app.add_subcommand("simulate", "run a schedule on a GHZ state");
  add_problem_options(simc, sim.problem);
  simc->add_option("--schedule", sim.schedule, "schedule file")->required();
  simc->add_option("--mode", sim.mode, "sdaqc or bdaqc");
  simc->add_flag("--noisy", sim.noisy, "apply T1 and gate noise from the configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*verify) return cmd_verify(va);
    if (*comp) return cmd_compile(ca);
    if (*sw) return cmd_sweep(sa);
    if (*simc) return cmd_simulate(sim);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const IncompatibleError& e) {
    std::fprintf(stderr, "incompatible: %s\n", e.what());
    return kInfeasible;
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "infeasible (word set %s): %s\n", e.policy.c_str(), e.what());
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternal;
  }
  return kInternal;
}
