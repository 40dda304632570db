#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <vector>

#include "homflow/liealg.hpp"

using namespace homflow;

namespace {

Mat mat(int n, std::vector<double> entries) {
  REQUIRE(int(entries.size()) == n * n);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = entries[std::size_t(i * n + j)];
  return m;
}

AlgebraElement sl(int n, std::vector<double> entries) { return make_sl(n, mat(n, entries)); }

// Random trace-free matrix with entries of order 1.
AlgebraElement random_sl(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  m -= (m.trace() / n) * Mat::Identity(n, n);
  return make_sl(n, m);
}

// Adjoint action of g computed the slow way, by conjugating basis elements.
Mat conjugation_ad(int n, const Mat& g) {
  const Mat ginv = g.inverse();
  Mat out(sl_dim(n), sl_dim(n));
  for (int j = 0; j < sl_dim(n); ++j)
    out.col(j) = sl_coordinates(g * sl_basis_element(n, j) * ginv);
  return out;
}

}  // namespace

TEST_CASE("basis spans trace-free matrices and coordinates round-trip") {
  for (int n : {2, 3, 4, 5}) {
    CHECK(sl_dim(n) == n * n - 1);
    for (int idx = 0; idx < sl_dim(n); ++idx) {
      Mat b = sl_basis_element(n, idx);
      CHECK(std::abs(b.trace()) == 0.0);
      Eigen::VectorXd c = sl_coordinates(b);
      for (int k = 0; k < sl_dim(n); ++k) CHECK(c(k) == (k == idx ? 1.0 : 0.0));
    }
    CHECK_THROWS_AS(sl_basis_element(n, sl_dim(n)), std::out_of_range);

    std::mt19937_64 rng(7);
    AlgebraElement x = random_sl(n, rng);
    Eigen::VectorXd c = sl_coordinates(x.entries);
    Mat rebuilt = Mat::Zero(n, n);
    for (int k = 0; k < sl_dim(n); ++k) rebuilt += c(k) * sl_basis_element(n, k);
    CHECK((rebuilt - x.entries).norm() < 1e-12);
  }
  // sl_2 ordering is (E_12, H, E_21).
  CHECK(sl_basis_element(2, 0)(0, 1) == 1.0);
  CHECK(sl_basis_element(2, 1)(0, 0) == 1.0);
  CHECK(sl_basis_element(2, 1)(1, 1) == -1.0);
  CHECK(sl_basis_element(2, 2)(1, 0) == 1.0);
}

TEST_CASE("make_sl validates shape and trace") {
  CHECK_THROWS_AS(make_sl(2, Mat::Identity(2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(make_sl(3, Mat::Zero(2, 2)), std::invalid_argument);
  CHECK_NOTHROW(make_sl(2, mat(2, {1, 0, 0, -1})));
}

TEST_CASE("ad matrix: zero element, sl2 golden columns, bracket reproduction") {
  AlgebraElement zero = sl(3, std::vector<double>(9, 0.0));
  CHECK(ad_matrix(zero).norm() == 0.0);

  // ad(E_12) on (E_12, H, E_21): [E_12,E_12]=0, [E_12,H]=-2E_12, [E_12,E_21]=H.
  AlgebraElement e12 = sl(2, {0, 1, 0, 0});
  Mat ad = ad_matrix(e12);
  Mat want = mat(3, {0, -2, 0, 0, 0, 1, 0, 0, 0});
  CHECK((ad - want).norm() == 0.0);

  std::mt19937_64 rng(11);
  for (int n : {2, 3, 4})
    for (int rep = 0; rep < 20; ++rep) {
      AlgebraElement x = random_sl(n, rng);
      AlgebraElement y = random_sl(n, rng);
      Eigen::VectorXd lhs = ad_matrix(x) * sl_coordinates(y.entries);
      Eigen::VectorXd rhs = sl_coordinates(x.entries * y.entries - y.entries * x.entries);
      CHECK((lhs - rhs).norm() < 1e-10 * std::max(1.0, rhs.norm()));
    }
}

TEST_CASE("nilpotency degrees of the standard examples") {
  AlgebraElement e12_sl2 = sl(2, {0, 1, 0, 0});
  CHECK(nilpotency_degree(ad_matrix(e12_sl2)) == 2);

  AlgebraElement e13 = sl(3, {0, 0, 1, 0, 0, 0, 0, 0, 0});
  Mat a = ad_matrix(e13);
  CHECK((a * a).norm() > 0.0);
  CHECK((a * a * a).norm() == 0.0);
  CHECK(nilpotency_degree(a) == 2);

  AlgebraElement reg3 = sl(3, {0, 2, 0, 0, 0, 2, 0, 0, 0});
  CHECK(nilpotency_degree(ad_matrix(reg3)) == 4);

  AlgebraElement reg4 = sl(4, {0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0});
  CHECK(nilpotency_degree(ad_matrix(reg4)) == 6);

  // Non-nilpotent and zero inputs are rejected.
  CHECK_THROWS_AS(nilpotency_degree(Mat::Zero(3, 3)), std::domain_error);
  CHECK_THROWS_AS(nilpotency_degree(Mat::Identity(3, 3)), std::domain_error);
  AlgebraElement h = sl(2, {1, 0, 0, -1});
  CHECK_THROWS_AS(nilpotency_degree(ad_matrix(h)), std::domain_error);
  // Same rejections through the float path (scale by an irrational factor).
  CHECK_THROWS_AS(nilpotency_degree(Mat::Identity(3, 3) * std::sqrt(2.0)), std::domain_error);
  CHECK(nilpotency_degree(ad_matrix(e13).eval() * std::sqrt(2.0)) == 2);
}

TEST_CASE("every nonzero element has ad square nonzero") {
  std::mt19937_64 rng(13);
  for (int n : {2, 3, 4})
    for (int rep = 0; rep < 200; ++rep) {
      AlgebraElement x = random_sl(n, rng);
      Mat a = ad_matrix(x);
      const double s1 = a.jacobiSvd().singularValues()(0);
      const double s2 = (a * a).jacobiSvd().singularValues()(0);
      CHECK(s2 > 1e-8 * s1 * s1);
    }
}

TEST_CASE("jordan split: pure cases") {
  auto close = [](const Mat& a, const Mat& b, double tol = 1e-9) {
    return (a - b).norm() <= tol * std::max(1.0, b.norm());
  };

  AlgebraElement nilp = sl(3, {0, 1, 2, 0, 0, 3, 0, 0, 0});
  JordanSplit s1 = jordan_split(nilp);
  CHECK(close(s1.nil.entries, nilp.entries));
  CHECK(s1.hyp.entries.norm() < 1e-9);
  CHECK(s1.ell.entries.norm() < 1e-9);

  AlgebraElement diag = sl(2, {1, 0, 0, -1});
  JordanSplit s2 = jordan_split(diag);
  CHECK(s2.nil.entries.norm() < 1e-9);
  CHECK(close(s2.hyp.entries, diag.entries));
  CHECK(s2.ell.entries.norm() < 1e-9);

  AlgebraElement rot = sl(2, {0, 1, -1, 0});
  JordanSplit s3 = jordan_split(rot);
  CHECK(s3.nil.entries.norm() < 1e-9);
  CHECK(s3.hyp.entries.norm() < 1e-9);
  CHECK(close(s3.ell.entries, rot.entries));

  // Distinct real eigenvalues: diagonalizable even though upper triangular.
  AlgebraElement tri = sl(2, {1, 1, 0, -1});
  JordanSplit s4 = jordan_split(tri);
  CHECK(s4.nil.entries.norm() < 1e-8);
  CHECK(close(s4.hyp.entries, tri.entries, 1e-8));

  AlgebraElement spiral = sl(2, {1, 2, -2, -1});  // eigenvalues +-i sqrt(3)
  JordanSplit s5 = jordan_split(spiral);
  CHECK(s5.nil.entries.norm() < 1e-8);
  CHECK(s5.hyp.entries.norm() < 1e-8);
  CHECK(close(s5.ell.entries, spiral.entries, 1e-8));
}

TEST_CASE("jordan split: mixed blocks recover all three parts") {
  AlgebraElement x = sl(4, {1, 1, 0, 0,  //
                            0, 1, 0, 0,  //
                            0, 0, -1, 2,  //
                            0, 0, -2, -1});
  JordanSplit s = jordan_split(x);
  Mat nil_want = Mat::Zero(4, 4);
  nil_want(0, 1) = 1;
  Mat hyp_want = Mat::Zero(4, 4);
  hyp_want.diagonal() << 1, 1, -1, -1;
  Mat ell_want = Mat::Zero(4, 4);
  ell_want(2, 3) = 2;
  ell_want(3, 2) = -2;
  CHECK((s.nil.entries - nil_want).norm() < 1e-7);
  CHECK((s.hyp.entries - hyp_want).norm() < 1e-7);
  CHECK((s.ell.entries - ell_want).norm() < 1e-7);
}

TEST_CASE("jordan split invariants on random elements") {
  std::mt19937_64 rng(17);
  for (int n : {2, 3, 4})
    for (int rep = 0; rep < 100; ++rep) {
      AlgebraElement x = random_sl(n, rng);
      const double scale = std::max(1.0, x.entries.norm());
      JordanSplit s = jordan_split(x);
      const Mat sum = s.nil.entries + s.hyp.entries + s.ell.entries;
      CHECK((x.entries - sum).norm() <= 1e-8 * scale);
      auto comm = [](const Mat& a, const Mat& b) { return (a * b - b * a).norm(); };
      CHECK(comm(s.nil.entries, s.hyp.entries) <= 1e-8 * scale * scale);
      CHECK(comm(s.nil.entries, s.ell.entries) <= 1e-8 * scale * scale);
      CHECK(comm(s.hyp.entries, s.ell.entries) <= 1e-8 * scale * scale);
    }
}

TEST_CASE("flow classification") {
  CHECK(classify_flow(sl(2, {1, 0, 0, -1})).kind == FlowKind::QuasiDiagonalizable);
  CHECK(classify_flow(sl(2, {0, 1, -1, 0})).kind == FlowKind::Bounded);
  CHECK(classify_flow(sl(3, std::vector<double>(9, 0.0))).kind == FlowKind::Bounded);

  FlowDescriptor e13 = classify_flow(sl(3, {0, 0, 1, 0, 0, 0, 0, 0, 0}));
  CHECK(e13.kind == FlowKind::QuasiUnipotent);
  CHECK(e13.l == 2);

  FlowDescriptor reg = classify_flow(sl(3, {0, 2, 0, 0, 0, 2, 0, 0, 0}));
  CHECK(reg.kind == FlowKind::QuasiUnipotent);
  CHECK(reg.l == 4);

  // Mixed: any nonzero hyperbolic part wins.
  AlgebraElement mixed = sl(4, {1, 1, 0, 0, 0, 1, 0, 0, 0, 0, -1, 1, 0, 0, 0, -1});
  CHECK(classify_flow(mixed).kind == FlowKind::QuasiDiagonalizable);

  CHECK(flow_kind_name(FlowKind::QuasiUnipotent) == "quasi_unipotent");
}

TEST_CASE("adjoint exponential agrees with conjugation for moderate t") {
  std::mt19937_64 rng(19);
  for (int n : {2, 3})
    for (double t : {0.3, 1.0, 5.0}) {
      AlgebraElement x = random_sl(n, rng);
      Mat lhs = (t * ad_matrix(x)).exp();
      Mat g = (t * x.entries).exp();
      Mat rhs = conjugation_ad(n, g);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, rhs.norm()));
    }
}

TEST_CASE("growth profile: exact linear case and overflow-free large t") {
  AlgebraElement h = sl(2, {1, 0, 0, -1});
  auto prof = lambda1_profile(h, {1, 10, 100, 1000});
  CHECK(std::abs(prof[0].lambda1 - 2.0) < 1e-6);
  CHECK(std::abs(prof[1].lambda1 - 20.0) < 1e-6);
  CHECK(std::abs(prof[2].lambda1 - 200.0) < 1e-5);
  CHECK(std::abs(prof[3].lambda1 - 2000.0) < 1e-4);
  // The exponential-rate estimate is stable between t = 100 and t = 1000.
  CHECK(std::abs(prof[2].lambda1 / 100.0 - prof[3].lambda1 / 1000.0) <
        0.01 * (prof[2].lambda1 / 100.0));

  // Triangular quasi-diagonalizable generator: same rate stability.
  AlgebraElement tri = sl(2, {1, 1, 0, -1});
  auto ptri = lambda1_profile(tri, {100, 1000});
  CHECK(std::abs(ptri[0].lambda1 / 100.0 - ptri[1].lambda1 / 1000.0) <
        0.01 * (ptri[0].lambda1 / 100.0));

  CHECK_THROWS_AS(lambda1_profile(h, {}), std::invalid_argument);
  CHECK_THROWS_AS(lambda1_profile(h, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(lambda1_profile(h, {-1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("growth profile slope equals the nilpotency degree") {
  struct Case {
    AlgebraElement x;
    int l;
  };
  std::vector<Case> cases;
  cases.push_back({sl(2, {0, 1, 0, 0}), 2});
  cases.push_back({sl(3, {0, 0, 1, 0, 0, 0, 0, 0, 0}), 2});
  cases.push_back({sl(3, {0, 2, 0, 0, 0, 2, 0, 0, 0}), 4});
  cases.push_back({sl(4, {0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0}), 6});
  for (auto& c : cases) {
    auto prof = lambda1_profile(c.x, {10, 100, 1000});
    CHECK(std::abs(profile_log_slope(prof) - double(c.l)) < 0.05);
    CHECK(nilpotency_degree(ad_matrix(c.x)) == c.l);
  }
}

TEST_CASE("profile agrees with a direct exponential where that is representable") {
  std::mt19937_64 rng(23);
  for (int n : {2, 3}) {
    AlgebraElement x = random_sl(n, rng);
    Mat a = ad_matrix(x);
    auto prof = lambda1_profile(x, {0.5, 1.0, 2.0});
    for (const auto& p : prof) {
      const double direct = std::log((p.t * a).exp().jacobiSvd().singularValues()(0));
      CHECK(std::abs(p.lambda1 - direct) < 1e-8 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("hilbert-schmidt norm") {
  CHECK(std::abs(hs_norm(Mat::Identity(3, 3)) - std::sqrt(3.0)) < 1e-12);
  AlgebraElement e12 = sl(2, {0, 1, 0, 0});
  Mat a = ad_matrix(e12);
  CHECK(std::abs(hs_norm((0.0 * a).exp()) - std::sqrt(3.0)) < 1e-12);
  // log hs_norm(exp(t ad E12)) grows with slope l = 2 in log t.
  std::vector<double> xs, ys;
  for (double t : {100.0, 1000.0, 10000.0}) {
    xs.push_back(std::log(t));
    ys.push_back(std::log(hs_norm((t * a).exp())));
  }
  CHECK(std::abs(least_squares_slope(xs, ys) - 2.0) < 0.05);
}

TEST_CASE("matrix JSON ingestion") {
  Mat m = parse_matrix_json("[[1, 2], [3, -4.5]]");
  CHECK(m.rows() == 2);
  CHECK(m(1, 1) == -4.5);
  CHECK_THROWS_AS(parse_matrix_json("[[1,2],[3]]"), std::invalid_argument);
  CHECK_THROWS_AS(parse_matrix_json("nonsense"), std::invalid_argument);
  CHECK_THROWS_AS(parse_matrix_json("[[1,\"x\"],[0,1]]"), std::invalid_argument);
  CHECK_THROWS_AS(parse_matrix_json("[]"), std::invalid_argument);
  CHECK_THROWS_AS(parse_matrix_json("[[],[]]"), std::invalid_argument);
}
