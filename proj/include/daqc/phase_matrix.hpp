#pragma once

#include <optional>
#include <string>
#include <vector>

#include "daqc/hamiltonian.hpp"

namespace daqc {

/// One conjugating gate-word: a Weyl label per site, identity where nothing is applied.
struct GateWord {
  int d = 2;
  std::vector<WeylLabel> labels;

  GateWord() = default;
  GateWord(int d_, int n) : d(d_), labels(static_cast<std::size_t>(n)) {}

  int n() const { return static_cast<int>(labels.size()); }
  int weight() const;
  bool is_identity() const { return weight() == 0; }
  GateWord& set(int site, const WeylLabel& l);

  friend bool operator==(const GateWord&, const GateWord&) = default;
};

std::string to_string(const GateWord& w);

/// Exponent e with phase w^e picked up by a coupling row under a gate-word.
int coupling_exponent(int d, const CouplingKey& row, const GateWord& word);
cplx coupling_phase(int d, const CouplingKey& row, const GateWord& word);
inline cplx coupling_phase(const CouplingTerm& term, const GateWord& word) {
  return coupling_phase(word.d, term.key(), word);
}

/// Labels each site may carry in an enumeration.
enum class LabelSet { all, x_powers, z_powers };

std::string to_string(LabelSet s);

/// Non-identity labels of a set, in (a, b) lexicographic order.
std::vector<WeylLabel> allowed_labels(int d, LabelSet set);

/// Words in lexicographic order (site 0 most significant, identity label first).
/// max_weight < 0 means no limit.
std::vector<GateWord> enumerate_words(int d, int n, int max_weight = -1, LabelSet set = LabelSet::all);

/// Number of words enumerate_words would return; saturates at `cap` + 1.
std::size_t count_words(int d, int n, int max_weight, LabelSet set, std::size_t cap);

struct PhaseMatrix {
  int d = 2;
  int n = 0;
  std::vector<CouplingKey> rows;
  std::vector<GateWord> columns;
  Eigen::MatrixXi exponents;
  MatrixXc entries;
};

PhaseMatrix build_matrix(int d, int n, const std::vector<CouplingKey>& rows, const std::vector<GateWord>& words);

/// Drops columns whose phase pattern repeats an earlier column.
PhaseMatrix deduplicate_columns(const PhaseMatrix& m);

/// Non-identity label quartet (l1, l2, l3, l4) of one row of the two-qudit blocks.
struct Quartet {
  WeylLabel first;
  WeylLabel second;
  friend bool operator==(const Quartet&, const Quartet&) = default;
};

/// 1-based row index i -> quartet, via the closed floor-function formulas.
Quartet quartet_from_index(int d, int i);
/// Inverse of quartet_from_index.
int index_from_quartet(int d, const Quartet& q);

struct SubmatrixSet {
  MatrixXc m2;   ///< phases on both qudits
  MatrixXc m11;  ///< phase from the first qudit only
  MatrixXc m12;  ///< phase from the second qudit only
  MatrixXc m0;   ///< no phase
};

SubmatrixSet submatrices(int d);

/// M_[2] for a chain of n qudits with all site pairs: N x N blocks of side (d^2-1)^2, N = n(n-1)/2.
/// Row block (p, q) holds couplings on sites p < q; column block (r, s) holds words on sites r < s.
PhaseMatrix m2_block(int d, int n);

struct PropertyCheck {
  std::string name;
  int d = 0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;

  bool all_passed() const;
  void append(const PropertyReport& other);
};

/// The six product identities (checks S1-S6) between the four submatrices; residuals are Frobenius norms
/// relative to max(1, |rhs|).
PropertyReport verify_properties(int d);
/// Spectra of the four submatrices against their allowed sets.
PropertyReport verify_eigenvalues(int d);
/// Row sums over every gate-word; rows default to all non-identity quartets on each site pair.
PropertyReport verify_row_sums(int d, int n, std::optional<std::vector<CouplingKey>> rows = std::nullopt);
/// Rank and determinant of M_[2] with an exact integer cross-check.
PropertyReport verify_determinant(int d, int n = 2);

struct DeterminantInfo {
  int size = 0;
  int rank = 0;
  double log10_abs = 0.0;         ///< from the floating-point LU factorization
  cplx floating_det{0.0, 0.0};    ///< zero when it under- or overflows double range
  bool exact_available = false;   ///< determinant proven to be a rational integer
  std::string exact_decimal;      ///< exact determinant, when available
  long long mod_d2m1 = -1;        ///< exact determinant reduced mod (d^2 - 1), in [0, d^2 - 2]
  double exact_relative_gap = 0;  ///< |floating - exact| / |exact| from log magnitudes and sign
};

DeterminantInfo determinant_m2(int d, int n = 2);

/// Spin-basis word: per site 0 for no gate, or exp(-i pi S_axis).
struct SpinWord {
  std::vector<int> axes;  ///< 0 = none, 1 = x, 2 = y, 3 = z
  int weight() const;
};

struct SpinCouplingKey {
  int site_i = 0;
  int site_j = 1;
  SpinAxis mu = SpinAxis::z;
  SpinAxis nu = SpinAxis::z;
  friend auto operator<=>(const SpinCouplingKey&, const SpinCouplingKey&) = default;
};

/// Sign of S_mu under conjugation by exp(-i pi S_nu): +1 if no gate or nu == mu, else -1.
int spin_sign(SpinAxis mu, int conjugator_axis);

std::vector<SpinWord> enumerate_spin_words(int n);

/// Sign matrix of spin couplings under spin words.
Eigen::MatrixXd build_spin_sign_matrix(const std::vector<SpinCouplingKey>& rows, const std::vector<SpinWord>& words);

/// Dense exp(-i pi S_axis) on each site of the word.
MatrixXc spin_word_unitary(int d, const SpinWord& word);

}  // namespace daqc
