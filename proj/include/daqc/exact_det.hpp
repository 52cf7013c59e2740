#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

namespace daqc {

/// Exact determinant of the matrix with entries w^{e_ij}, w = exp(2 pi i / d), when that
/// determinant is a rational integer. Computed by elimination over prime fields F_p with
/// p = 1 mod d under every embedding of w, then combined by Chinese remaindering up to the
/// Hadamard bound. Returns the decimal string, or nullopt when the embeddings disagree
/// (the determinant is not rational).
std::optional<std::string> integer_determinant(const Eigen::MatrixXi& exponents, int d);

/// Remainder of a signed decimal integer modulo m, in [0, m).
long long decimal_mod(const std::string& decimal, long long m);

/// log10 of |x| for a decimal integer string; -inf for zero.
double decimal_log10_abs(const std::string& decimal);

}  // namespace daqc
