#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "daqc/hamiltonian.hpp"
#include "oracles.hpp"

using namespace daqc;
using oracle::Mat;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

const cplx w = oracle::omega(3);
const cplx wi = std::conj(w);
const cplx wi2 = std::conj(w * w);
const WeylLabel Z{1, 0}, Z2{2, 0};

// Dense chain sum_i c * A_i B_{i+1} with the test-side Kronecker product.
Mat dense_chain(int n, const Mat& a, const Mat& b, double c) {
  const int d = static_cast<int>(a.rows());
  Mat out = Mat::Zero(Eigen::Index(std::pow(d, n)), Eigen::Index(std::pow(d, n)));
  for (int i = 0; i + 1 < n; ++i) out += c * oracle::embed(a, i, n) * oracle::embed(b, i + 1, n);
  return out;
}

}  // namespace

TEST_CASE("qutrit ZZ source coefficients") {
  const auto h = zz_source(2, 3);
  // the cross coefficient (1-w^-1)(1-w^-2)/9 = 1/3 in either convention
  CHECK(std::abs(h.coefficient({0, 1, Z, Z2}) - (1.0 - wi) * (1.0 - wi2) / 9.0) < 1e-12);
  CHECK(std::abs(h.coefficient({0, 1, Z, Z2}) - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(h.coefficient({0, 1, Z2, Z}) - 1.0 / 3.0) < 1e-12);
  // standard S_z = diag(1,0,-1) puts (1-w^-2)^2/9 on Z Z
  CHECK(std::abs(h.coefficient({0, 1, Z, Z}) - (1.0 - wi2) * (1.0 - wi2) / 9.0) < 1e-12);
  CHECK(std::abs(h.coefficient({0, 1, Z2, Z2}) - (1.0 - wi) * (1.0 - wi) / 9.0) < 1e-12);
  CHECK(h.two_body().size() == 4);
  CHECK(h.one_body().empty());
  CHECK(std::abs(h.identity_offset()) < 1e-14);
  CHECK(h.is_diagonal());
  CHECK(h.is_hermitian());
}

TEST_CASE("levels ordered (1,-1,0) swap the Z and Z^2 coefficients back") {
  Mat sz = Mat::Zero(3, 3), sq = Mat::Zero(3, 3);
  sz.diagonal() << 1, -1, 0;
  sq.diagonal() << 1.0 / 3, 1.0 / 3, -2.0 / 3;  // diag(1,1,0) - 2/3
  const auto zz = from_spin_terms(3, 2, {{0, 1, sz, sz, 1.0}});
  CHECK(std::abs(zz.coefficient({0, 1, Z, Z}) - (1.0 - wi) * (1.0 - wi) / 9.0) < 1e-12);
  CHECK(std::abs(zz.coefficient({0, 1, Z2, Z2}) - (1.0 - wi2) * (1.0 - wi2) / 9.0) < 1e-12);
  CHECK(std::abs(zz.coefficient({0, 1, Z, Z2}) - (1.0 - wi) * (1.0 - wi2) / 9.0) < 1e-12);

  const auto qq = from_spin_terms(3, 2, {{0, 1, sq, sq, 1.0}});
  CHECK(std::abs(qq.coefficient({0, 1, Z, Z}) - (1.0 + wi) * (1.0 + wi) / 9.0) < 1e-12);
  CHECK(std::abs(qq.coefficient({0, 1, Z2, Z2}) - (1.0 + wi2) * (1.0 + wi2) / 9.0) < 1e-12);
  CHECK(std::abs(qq.coefficient({0, 1, Z, Z2}) - (1.0 + wi) * (1.0 + wi2) / 9.0) < 1e-12);
  CHECK(qq.one_body().empty());
  CHECK(std::abs(qq.identity_offset()) < 1e-12);
}

TEST_CASE("blbq_problem coefficients") {
  for (double theta : {0.0, 0.4, M_PI / 2, 2.5}) {
    const int n = 4;
    const auto h = blbq_problem(n, theta);
    const double c = std::cos(theta), s = std::sin(theta);
    for (int i = 0; i + 1 < n; ++i) {
      CHECK(std::abs(h.coefficient({i, i + 1, Z, Z}) -
                     (c * (1.0 - wi2) * (1.0 - wi2) + s * (1.0 + wi2) * (1.0 + wi2)) / 9.0) < 1e-12);
      CHECK(std::abs(h.coefficient({i, i + 1, Z2, Z2}) -
                     (c * (1.0 - wi) * (1.0 - wi) + s * (1.0 + wi) * (1.0 + wi)) / 9.0) < 1e-12);
      CHECK(std::abs(h.coefficient({i, i + 1, Z, Z2}) - (c / 3.0 + s / 9.0)) < 1e-12);
      CHECK(std::abs(h.coefficient({i, i + 1, Z2, Z}) - (c / 3.0 + s / 9.0)) < 1e-12);
    }
    // S_z^2 S_z^2 = S'S' + 2/3 (S' (x) 1 + 1 (x) S') + 4/9
    for (int site = 0; site < n; ++site) {
      const double bonds = (site == 0 || site == n - 1) ? 1.0 : 2.0;
      CHECK(std::abs(h.coefficient({site, -1, Z, {}}) - bonds * s * 2.0 / 3.0 * (1.0 + wi2) / 3.0) < 1e-12);
    }
    CHECK(std::abs(h.identity_offset() - (n - 1) * s * 4.0 / 9.0) < 1e-12);
    CHECK(h.is_hermitian());
    CHECK(h.is_diagonal());

    const auto two = h.two_body_part();
    CHECK(two.one_body().empty());
    CHECK(two.identity_offset() == 0.0);
    CHECK(two.two_body().size() == h.two_body().size());
  }
}

TEST_CASE("materialize agrees with dense spin chains") {
  const Mat sz = oracle::spin(3, 'z');
  for (double theta : {0.0, 1.1, M_PI}) {
    const int n = 3;
    const Mat expected =
        dense_chain(n, sz, sz, std::cos(theta)) + dense_chain(n, sz * sz, sz * sz, std::sin(theta));
    const Mat got = materialize(blbq_problem(n, theta));
    CHECK(max_abs(got - expected) < 1e-12);

    // the two-body part drops the one-body terms and offset from S_z^2 = S_z'^2 + 2/3
    const Mat sq = sz * sz - 2.0 / 3.0 * Mat::Identity(3, 3);
    const Mat two = dense_chain(n, sz, sz, std::cos(theta)) + dense_chain(n, sq, sq, std::sin(theta));
    CHECK(max_abs(materialize(blbq_problem(n, theta).two_body_part()) - two) < 1e-12);
  }
  for (int d : {2, 3, 4, 5}) {
    const Mat szd = oracle::spin(d, 'z');
    CHECK(max_abs(materialize(zz_source(3, d)) - dense_chain(3, szd, szd, 1.0)) < 1e-12);
  }
}

TEST_CASE("diagonal_energies equals the materialized diagonal") {
  const auto h = blbq_problem(4, 0.7);
  const Mat m = materialize(h);
  const Eigen::VectorXd e = diagonal_energies(h);
  CHECK((m.diagonal().real() - e).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(max_abs(m - Mat(m.diagonal().asDiagonal())) < 1e-12);
}

TEST_CASE("weyl_string and embed_local against Kronecker products") {
  const std::vector<WeylLabel> labels{{1, 2}, {0, 0}, {2, 1}};
  const Mat expected = oracle::kron_all({oracle::weyl(3, 1, 2), Mat::Identity(3, 3), oracle::weyl(3, 2, 1)});
  CHECK(max_abs(weyl_string(3, labels) - expected) < 1e-12);

  std::mt19937 rng(7);
  const Mat op = oracle::random_hermitian(4, rng);
  for (int site = 0; site < 3; ++site) CHECK(max_abs(embed_local(4, 3, site, op) - oracle::embed(op, site, 3)) < 1e-12);
}

TEST_CASE("general Hermitian terms materialize to their dense sum") {
  std::mt19937 rng(11);
  for (int d : {2, 3, 5}) {
    const int n = 3;
    const Mat a = oracle::random_hermitian(d, rng), b = oracle::random_hermitian(d, rng);
    const auto h = from_spin_terms(d, n, {{0, 2, a, b, 0.8}, {1, 0, b, a, -0.3}});
    CHECK(h.is_hermitian());
    const Mat expected = 0.8 * oracle::embed(a, 0, n) * oracle::embed(b, 2, n) -
                         0.3 * oracle::embed(b, 1, n) * oracle::embed(a, 0, n);
    CHECK(max_abs(materialize(h) - expected) < 1e-10);
  }
}

TEST_CASE("term bookkeeping") {
  QuditHamiltonian h(3, 3);
  h.add_coupling(2, 0, {1, 0}, {0, 1}, {0.5, 0});
  CHECK(h.two_body().size() == 1);
  CHECK(h.two_body()[0].site_i == 0);
  CHECK(h.two_body()[0].left == WeylLabel(0, 1));
  CHECK(h.two_body()[0].right == WeylLabel(1, 0));
  h.add_coupling(0, 2, {0, 1}, {1, 0}, {-0.5, 0});
  CHECK(h.two_body().empty());

  CHECK_THROWS_AS(h.add_coupling(0, 0, {1, 0}, {1, 0}, 1.0), PreconditionError);
  CHECK_THROWS_AS(h.add_coupling(0, 1, {0, 0}, {1, 0}, 1.0), PreconditionError);
  CHECK_THROWS_AS(h.add_coupling(0, 3, {1, 0}, {1, 0}, 1.0), PreconditionError);
  CHECK_THROWS_AS(h.add_local(0, {0, 0}, 1.0), PreconditionError);
  CHECK_THROWS_AS(QuditHamiltonian(1, 2), DimensionError);

  h.add_local(1, {1, 1}, {0, 1});
  CHECK_FALSE(h.is_hermitian());
  CHECK_FALSE(h.is_diagonal());
  CHECK_FALSE(h.is_x_type());
}

TEST_CASE("compatibility") {
  const auto source = zz_source(4, 3);
  CHECK(check_compatibility(source, blbq_problem(4, 0.3)).compatible());

  QuditHamiltonian problem(3, 4);
  problem.add_coupling(0, 2, {1, 0}, {1, 0}, 1.0).add_coupling(0, 2, {2, 0}, {2, 0}, 1.0);
  const auto report = check_compatibility(source, problem);
  CHECK_FALSE(report.compatible());
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0] == std::pair<int, int>{0, 2});
  CHECK_THROWS_AS(check_compatibility(source, blbq_problem(5, 0.3)), DimensionError);
}

TEST_CASE("materialize size cap") {
  CHECK_THROWS_AS(materialize(zz_source(9, 3)), DimensionError);
  CHECK_NOTHROW(diagonal_energies(zz_source(9, 3)));
}

TEST_CASE("spin Hamiltonian") {
  const auto h = heisenberg_chain(3, 3, 1.0, 0.5, -0.25);
  CHECK(h.coefficient(1, 0, SpinAxis::y, SpinAxis::y) == 0.5);
  CHECK(h.coefficient(0, 2, SpinAxis::z, SpinAxis::z) == 0.0);
  Mat expected = Mat::Zero(27, 27);
  for (char a : {'x', 'y', 'z'}) {
    const double j = a == 'x' ? 1.0 : a == 'y' ? 0.5 : -0.25;
    expected += dense_chain(3, oracle::spin(3, a), oracle::spin(3, a), j);
  }
  CHECK(max_abs(materialize(h) - expected) < 1e-12);
}
