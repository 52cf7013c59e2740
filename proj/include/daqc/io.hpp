#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "daqc/simulator.hpp"

namespace daqc {

using json = nlohmann::json;

json to_json(const QuditHamiltonian& h);
QuditHamiltonian hamiltonian_from_json(const json& j);

json to_json(const Schedule& s);
Schedule schedule_from_json(const json& j);

json to_json(const PropertyReport& r);

/// Parameters of one CLI run. Defaults reproduce the reference six-qutrit experiment.
struct RunConfig {
  int d = 3;
  int n = 6;
  double T = 1.0;
  std::optional<double> theta;
  std::vector<double> theta_grid;   ///< empty: 33 points on [0, pi]
  double t1_over_T = 100.0;
  double delta_t_over_T = 0.01;
  double single_gate_fidelity = 0.994;
  double two_gate_fidelity = 0.95;
  double two_gate_duration_over_T = 0.1;
  double pruning_factor = 4.0;
  std::string word_set_policy = "auto";
  std::string schedule_out;
  std::string results_out;
  std::string schedule_dir;
  unsigned long long seed = 0;
  unsigned threads = 1;

  NoiseModel noise() const;
  std::vector<double> thetas() const;
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

json to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const json& j);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace daqc
