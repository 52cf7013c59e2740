#include "daqc/exact_det.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace daqc {

namespace {

using u64 = std::uint64_t;
using boost::multiprecision::cpp_int;

u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p); }

u64 powmod(u64 base, u64 e, u64 p) {
  u64 r = 1;
  base %= p;
  while (e) {
    if (e & 1) r = mulmod(r, base, p);
    base = mulmod(base, base, p);
    e >>= 1;
  }
  return r;
}

bool is_prime(u64 x) {
  if (x < 2) return false;
  for (u64 q = 2; q * q <= x; ++q)
    if (x % q == 0) return false;
  return true;
}

std::vector<int> prime_factors(int d) {
  std::vector<int> out;
  for (int q = 2; q <= d; ++q)
    if (d % q == 0) {
      out.push_back(q);
      while (d % q == 0) d /= q;
    }
  return out;
}

// Element of multiplicative order exactly d in F_p, p = 1 mod d.
u64 root_of_order(int d, u64 p) {
  const auto factors = prime_factors(d);
  for (u64 x = 2; x < p; ++x) {
    const u64 r = powmod(x, (p - 1) / d, p);
    bool exact = r != 1 || d == 1;
    for (int q : factors)
      if (powmod(r, d / q, p) == 1) exact = false;
    if (exact) return r;
  }
  return 0;
}

u64 det_mod_p(const Eigen::MatrixXi& exponents, int d, u64 root, u64 p) {
  const Eigen::Index n = exponents.rows();
  std::vector<u64> powers(d);
  for (int e = 0; e < d; ++e) powers[e] = powmod(root, e, p);
  std::vector<u64> a(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      int e = exponents(i, j) % d;
      if (e < 0) e += d;
      a[i * n + j] = powers[e];
    }
  u64 det = 1;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = c;
    while (piv < n && a[piv * n + c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (Eigen::Index k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      det = (p - det) % p;
    }
    const u64 pivot = a[c * n + c];
    det = mulmod(det, pivot, p);
    const u64 inv = powmod(pivot, p - 2, p);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const u64 f = mulmod(a[r * n + c], inv, p);
      if (f == 0) continue;
      for (Eigen::Index k = c; k < n; ++k) a[r * n + k] = (a[r * n + k] + p - mulmod(f, a[c * n + k], p)) % p;
    }
  }
  return det;
}

}  // namespace

std::optional<std::string> integer_determinant(const Eigen::MatrixXi& exponents, int d) {
  const Eigen::Index n = exponents.rows();
  if (n != exponents.cols()) return std::nullopt;
  if (n == 0) return std::string("1");
  // Hadamard: |det| <= n^{n/2} for unit-modulus entries.
  const double bound_bits = 0.5 * static_cast<double>(n) * std::log2(static_cast<double>(n)) + 2.0;

  std::vector<int> units;
  for (int j = 1; j <= d; ++j)
    if (std::gcd(j, d) == 1) units.push_back(j % d);

  cpp_int modulus = 1, value = 0;
  double bits = 0;
  u64 candidate = ((u64(1) << 31) - 1) / d * d + 1;
  while (bits < bound_bits) {
    while (candidate > static_cast<u64>(d) && !is_prime(candidate)) candidate -= d;
    if (candidate <= static_cast<u64>(d)) return std::nullopt;
    const u64 p = candidate;
    candidate -= d;

    const u64 root = root_of_order(d, p);
    const u64 r0 = det_mod_p(exponents, d, root, p);
    for (int j : units)
      if (det_mod_p(exponents, d, powmod(root, j, p), p) != r0) return std::nullopt;

    // value := x with x = value mod modulus, x = r0 mod p
    const cpp_int pm(p);
    const cpp_int current = value % pm;
    const u64 cur = static_cast<u64>(current);
    const u64 inv = powmod(static_cast<u64>(modulus % pm), p - 2, p);
    const u64 t = mulmod((r0 + p - cur) % p, inv, p);
    value += modulus * t;
    modulus *= pm;
    bits += std::log2(static_cast<double>(p));
  }
  if (value > modulus / 2) value -= modulus;
  return value.str();
}

long long decimal_mod(const std::string& decimal, long long m) {
  bool negative = !decimal.empty() && decimal[0] == '-';
  long long r = 0;
  for (char c : decimal) {
    if (c < '0' || c > '9') continue;
    r = (r * 10 + (c - '0')) % m;
  }
  if (negative) r = (m - r) % m;
  return r;
}

double decimal_log10_abs(const std::string& decimal) {
  std::string digits;
  for (char c : decimal)
    if (c >= '0' && c <= '9') digits += c;
  const auto first = digits.find_first_not_of('0');
  if (first == std::string::npos) return -std::numeric_limits<double>::infinity();
  digits = digits.substr(first);
  const std::size_t lead = std::min<std::size_t>(digits.size(), 15);
  const double mantissa = std::stod(digits.substr(0, lead));
  return std::log10(mantissa) + static_cast<double>(digits.size() - lead);
}

}  // namespace daqc
