#include "daqc/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace daqc {

namespace {

WeylLabel label_from(const json& j, std::size_t offset, int d) {
  return WeylLabel::make(j.at(offset).get<long long>(), j.at(offset + 1).get<long long>(), d);
}

json matrix_part(const MatrixXc& m, bool imaginary) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(imaginary ? m(r, c).imag() : m(r, c).real());
    rows.push_back(row);
  }
  return rows;
}

MatrixXc matrix_from(const json& re, const json& im) {
  const auto rows = static_cast<Eigen::Index>(re.size());
  if (rows == 0 || im.size() != re.size()) throw PreconditionError("malformed matrix");
  const auto cols = static_cast<Eigen::Index>(re.at(0).size());
  MatrixXc m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(re.at(r).size()) != cols || static_cast<Eigen::Index>(im.at(r).size()) != cols)
      throw PreconditionError("malformed matrix row");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = cplx(re.at(r).at(c).get<double>(), im.at(r).at(c).get<double>());
  }
  return m;
}

}  // namespace

json to_json(const QuditHamiltonian& h) {
  json two = json::array(), one = json::array();
  for (const auto& t : h.two_body())
    two.push_back({{"i", t.site_i},
                   {"j", t.site_j},
                   {"l", {t.left.a, t.left.b, t.right.a, t.right.b}},
                   {"re", t.coefficient.real()},
                   {"im", t.coefficient.imag()}});
  for (const auto& t : h.one_body())
    one.push_back({{"site", t.site}, {"l", {t.label.a, t.label.b}}, {"re", t.coefficient.real()}, {"im", t.coefficient.imag()}});
  return {{"d", h.d()}, {"n", h.n()}, {"two_body", two}, {"one_body", one}, {"identity_offset", h.identity_offset()}};
}

QuditHamiltonian hamiltonian_from_json(const json& j) {
  const int d = j.at("d").get<int>();
  QuditHamiltonian h(d, j.at("n").get<int>());
  if (j.contains("two_body"))
    for (const auto& t : j.at("two_body")) {
      const json& l = t.at("l");
      if (l.size() != 4) throw PreconditionError("two_body label needs four entries");
      h.add_coupling(t.at("i").get<int>(), t.at("j").get<int>(), label_from(l, 0, d), label_from(l, 2, d),
                     cplx(t.at("re").get<double>(), t.value("im", 0.0)));
    }
  if (j.contains("one_body"))
    for (const auto& t : j.at("one_body")) {
      const json& l = t.at("l");
      if (l.size() != 2) throw PreconditionError("one_body label needs two entries");
      h.add_local(t.at("site").get<int>(), label_from(l, 0, d), cplx(t.at("re").get<double>(), t.value("im", 0.0)));
    }
  h.add_identity(j.value("identity_offset", 0.0));
  return h;
}

json to_json(const Schedule& s) {
  json blocks = json::array();
  for (const auto& b : s.blocks) {
    json gates = json::object();
    for (int site = 0; site < b.word.n(); ++site)
      if (!b.word.labels[site].is_identity())
        gates[std::to_string(site)] = {b.word.labels[site].a, b.word.labels[site].b};
    blocks.push_back({{"gates", gates}, {"duration", b.duration}});
  }
  json local = json::array();
  for (const auto& g : s.final_local_layer)
    local.push_back({{"site", g.site}, {"re", matrix_part(g.unitary, false)}, {"im", matrix_part(g.unitary, true)}});
  json meta = {{"theta", s.metadata.theta ? json(*s.metadata.theta) : json(nullptr)},
               {"pruning_threshold", s.metadata.pruning_threshold},
               {"total_analog_time", s.metadata.total_analog_time},
               {"discarded_time", s.metadata.discarded_time},
               {"residual", s.metadata.residual}};
  return {{"d", s.d}, {"n", s.n}, {"T", s.T}, {"blocks", blocks}, {"final_local_layer", local}, {"metadata", meta}};
}

Schedule schedule_from_json(const json& j) {
  Schedule s;
  s.d = j.at("d").get<int>();
  s.n = j.at("n").get<int>();
  check_dimension(s.d);
  if (s.n < 1) throw DimensionError("schedule needs n >= 1");
  s.T = j.at("T").get<double>();
  for (const auto& b : j.at("blocks")) {
    Block block{GateWord(s.d, s.n), b.at("duration").get<double>()};
    if (block.duration < 0) throw PreconditionError("negative block duration in schedule");
    for (const auto& [site, label] : b.at("gates").items()) block.word.set(std::stoi(site), label_from(label, 0, s.d));
    s.blocks.push_back(std::move(block));
  }
  if (j.contains("final_local_layer"))
    for (const auto& g : j.at("final_local_layer")) {
      LocalGate gate{g.at("site").get<int>(), matrix_from(g.at("re"), g.at("im"))};
      if (gate.unitary.rows() != s.d || gate.unitary.cols() != s.d) throw DimensionError("local gate has the wrong size");
      s.final_local_layer.push_back(std::move(gate));
    }
  if (j.contains("metadata")) {
    const json& m = j.at("metadata");
    if (m.contains("theta") && !m.at("theta").is_null()) s.metadata.theta = m.at("theta").get<double>();
    s.metadata.pruning_threshold = m.value("pruning_threshold", 0.0);
    s.metadata.total_analog_time = m.value("total_analog_time", total_duration(s));
    s.metadata.discarded_time = m.value("discarded_time", 0.0);
    s.metadata.residual = m.value("residual", 0.0);
  } else {
    s.metadata.total_analog_time = total_duration(s);
  }
  return s;
}

json to_json(const PropertyReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"property", c.name},
                      {"d", c.d},
                      {"residual", c.residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.passed},
                      {"detail", c.detail}});
  return {{"all_passed", r.all_passed()}, {"checks", checks}};
}

NoiseModel RunConfig::noise() const {
  NoiseModel m{t1_over_T * T, delta_t_over_T * T, single_gate_fidelity, two_gate_fidelity, two_gate_duration_over_T * T};
  m.validate();
  return m;
}

std::vector<double> RunConfig::thetas() const {
  if (!theta_grid.empty()) return theta_grid;
  if (theta) return {*theta};
  return linear_grid(0.0, M_PI, 33);
}

void RunConfig::validate() const {
  check_dimension(d);
  if (n < 2) throw DimensionError("n must be >= 2");
  if (!(T > 0)) throw PreconditionError("T must be positive");
  if (!(pruning_factor >= 0)) throw PreconditionError("pruning_factor must be >= 0");
  parse_word_policy(word_set_policy);
  noise();
}

json to_json(const RunConfig& c) {
  return {{"d", c.d},
          {"n", c.n},
          {"T", c.T},
          {"theta", c.theta ? json(*c.theta) : json(nullptr)},
          {"theta_grid", c.theta_grid},
          {"t1_over_T", c.t1_over_T},
          {"delta_t_over_T", c.delta_t_over_T},
          {"single_gate_fidelity", c.single_gate_fidelity},
          {"two_gate_fidelity", c.two_gate_fidelity},
          {"two_gate_duration_over_T", c.two_gate_duration_over_T},
          {"pruning_factor", c.pruning_factor},
          {"word_set_policy", c.word_set_policy},
          {"schedule_out", c.schedule_out},
          {"results_out", c.results_out},
          {"schedule_dir", c.schedule_dir},
          {"seed", c.seed},
          {"threads", c.threads}};
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw PreconditionError("config must be a JSON object");
  static const std::set<std::string> known{"d", "n", "T", "theta", "theta_grid", "t1_over_T", "delta_t_over_T",
                                           "single_gate_fidelity", "two_gate_fidelity", "two_gate_duration_over_T",
                                           "pruning_factor", "word_set_policy", "schedule_out", "results_out",
                                           "schedule_dir", "seed", "threads"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw PreconditionError("unknown config key '" + key + "'");
  RunConfig c;
  c.d = j.value("d", c.d);
  c.n = j.value("n", c.n);
  c.T = j.value("T", c.T);
  if (j.contains("theta") && !j.at("theta").is_null()) c.theta = j.at("theta").get<double>();
  if (j.contains("theta_grid")) c.theta_grid = j.at("theta_grid").get<std::vector<double>>();
  c.t1_over_T = j.value("t1_over_T", c.t1_over_T);
  c.delta_t_over_T = j.value("delta_t_over_T", c.delta_t_over_T);
  c.single_gate_fidelity = j.value("single_gate_fidelity", c.single_gate_fidelity);
  c.two_gate_fidelity = j.value("two_gate_fidelity", c.two_gate_fidelity);
  c.two_gate_duration_over_T = j.value("two_gate_duration_over_T", c.two_gate_duration_over_T);
  c.pruning_factor = j.value("pruning_factor", c.pruning_factor);
  c.word_set_policy = j.value("word_set_policy", c.word_set_policy);
  c.schedule_out = j.value("schedule_out", c.schedule_out);
  c.results_out = j.value("results_out", c.results_out);
  c.schedule_dir = j.value("schedule_dir", c.schedule_dir);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw PreconditionError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace daqc
