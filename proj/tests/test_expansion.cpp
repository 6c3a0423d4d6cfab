#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qamp/expansion.hpp"
#include "qamp/rng.hpp"
#include "qamp/synthetic.hpp"

using namespace qamp;

TEST_CASE("column_count matches the quadratic basis size") {
  CHECK(column_count(10) == 66);
  CHECK(column_count(100) == 5151);
  CHECK(column_count(1) == 3);  // dc + linear + square, no cross terms
  CHECK_THROWS_AS(column_count(0), std::invalid_argument);
}

TEST_CASE("column_count agrees with the generated group map for n in 1..200") {
  for (int n = 1; n <= 200; ++n) {
    const FeatureMatrix x = gen_features(2, n, static_cast<std::uint64_t>(n));
    const ExpandedDesign d = expand_quadratic(x);
    CHECK(d.cols() == column_count(n));
    CHECK(d.groups.size() == static_cast<std::size_t>(column_count(n)));
    // group sizes: 1 dc, n linear, n quadratic, n(n-1)/2 cross
    int counts[4] = {0, 0, 0, 0};
    for (const ColumnGroup& g : d.groups) ++counts[static_cast<int>(g.kind)];
    CHECK(counts[0] == 1);
    CHECK(counts[1] == n);
    CHECK(counts[2] == n);
    CHECK(counts[3] == n * (n - 1) / 2);
  }
}

TEST_CASE("expand_quadratic lays out dc, linear, squares, cross pairs") {
  FeatureMatrix x(1, 2);
  x << 1.0, 2.0;
  const ExpandedDesign d = expand_quadratic(x);
  Eigen::VectorXd expected(6);
  expected << 1, 1, 2, 1, 4, 2;
  CHECK((d.data.row(0).transpose() - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(d.normalized);
  CHECK(d.norms.isOnes());
}

TEST_CASE("expand_quadratic of an all-zero row keeps only the dc column") {
  const ExpandedDesign d = expand_quadratic(FeatureMatrix::Zero(1, 3));
  CHECK(d.data(0, 0) == 1.0);
  CHECK(d.data.row(0).tail(9).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("expansion at M=1000 N=10 has 66 columns") {
  const FeatureMatrix x = gen_features(1000, 10, 7);
  const ExpandedDesign d = expand_quadratic(x);
  CHECK(d.cols() == 66);
  CHECK(d.rows() == 1000);
}

TEST_CASE("cross columns follow lexicographic (i, j) order") {
  const ExpandedDesign d = expand_quadratic(gen_features(2, 4, 3));
  const std::size_t cross_start = 1 + 2 * 4;
  int expect_i[] = {0, 0, 0, 1, 1, 2};
  int expect_j[] = {1, 2, 3, 2, 3, 3};
  for (int k = 0; k < 6; ++k) {
    CHECK(d.groups[cross_start + k].kind == ColumnKind::Cross);
    CHECK(d.groups[cross_start + k].i == expect_i[k]);
    CHECK(d.groups[cross_start + k].j == expect_j[k]);
  }
}

TEST_CASE("expand_quadratic rejects bad input") {
  CHECK_THROWS_AS(expand_quadratic(FeatureMatrix()), std::invalid_argument);
  FeatureMatrix bad(1, 2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(expand_quadratic(bad), std::invalid_argument);
}

TEST_CASE("quadratic-group columns of a raw design are nonnegative") {
  const ExpandedDesign d = expand_quadratic(gen_features(60, 8, 11));
  for (Eigen::Index l = 0; l < d.cols(); ++l)
    if (d.groups[static_cast<std::size_t>(l)].kind == ColumnKind::Quadratic)
      CHECK(d.data.col(l).minCoeff() >= 0.0);
}

TEST_CASE("normalize_columns produces unit columns and keeps the norms") {
  SUBCASE("constant column") {
    ExpandedDesign d;
    d.data = Eigen::MatrixXd::Constant(4, 1, 2.0);
    d.groups = {{ColumnKind::Dc, -1, -1}};
    d.norms = Eigen::VectorXd::Ones(1);
    d.feature_count = 1;
    const ExpandedDesign n = normalize_columns(d);
    CHECK(n.data.col(0).isApproxToConstant(0.5));
    CHECK(n.norms(0) == doctest::Approx(4.0));
  }

  SUBCASE("dc column entries become 1/sqrt(M)") {
    const ExpandedDesign n = normalize_columns(expand_quadratic(gen_features(100, 3, 5)));
    CHECK(n.data.col(0).isApproxToConstant(0.1, 1e-15));
  }

  SUBCASE("every column has unit norm and the Frobenius identity holds") {
    const ExpandedDesign n = normalize_columns(expand_quadratic(gen_features(150, 7, 9)));
    for (Eigen::Index l = 0; l < n.cols(); ++l)
      CHECK(std::abs(n.data.col(l).norm() - 1.0) <= 1e-12);
    const double frob_sq = n.data.squaredNorm();
    CHECK(std::abs(frob_sq - static_cast<double>(n.cols())) <=
          1e-9 * static_cast<double>(n.cols()));
  }

  SUBCASE("renormalizing is a no-op and norms are preserved") {
    const ExpandedDesign once = normalize_columns(expand_quadratic(gen_features(40, 4, 2)));
    const ExpandedDesign twice = normalize_columns(once);
    CHECK((twice.data - once.data).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((twice.norms - once.norms).cwiseAbs().maxCoeff() <= 1e-12 * once.norms.maxCoeff());
  }

  SUBCASE("zero column is rejected with its name") {
    FeatureMatrix x(3, 2);
    x << 0, 1, 0, 2, 0, -1;  // feature 0 constant zero
    try {
      normalize_columns(expand_quadratic(x));
      FAIL("expected degenerate-column error");
    } catch (const std::domain_error& e) {
      CHECK(std::string(e.what()).find("linear(0)") != std::string::npos);
      CHECK(std::string(e.what()).find("column 1") != std::string::npos);
    }
  }
}

TEST_CASE("coefficient rescaling round-trips") {
  Rng rng(21);
  const int n = 6;
  GroupedCoefficients theta = GroupedCoefficients::zero(n);
  theta.dc = rng.normal();
  for (int i = 0; i < n; ++i) theta.linear(i) = rng.normal();
  for (int i = 0; i < n; ++i) theta.quadratic(i) = rng.normal();
  for (Eigen::Index i = 0; i < theta.cross.size(); ++i) theta.cross(i) = rng.normal();

  SUBCASE("unit norms are the identity") {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(theta.total_size());
    CHECK((rescale_coefficients_to_normalized(theta, ones).stacked() - theta.stacked())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((rescale_coefficients_to_original(theta, ones).stacked() - theta.stacked())
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }

  SUBCASE("single-entry scaling") {
    GroupedCoefficients t = GroupedCoefficients::zero(1);
    t.dc = 0.5;
    Eigen::VectorXd norms = Eigen::VectorXd::Ones(3);
    norms(0) = 4.0;
    CHECK(rescale_coefficients_to_normalized(t, norms).dc == doctest::Approx(2.0));
    t.dc = 2.0;
    CHECK(rescale_coefficients_to_original(t, norms).dc == doctest::Approx(0.5));
  }

  SUBCASE("normalized then original returns the input") {
    Eigen::VectorXd norms(theta.total_size());
    for (Eigen::Index i = 0; i < norms.size(); ++i) norms(i) = 0.5 + rng.uniform() * 10.0;
    const GroupedCoefficients back = rescale_coefficients_to_original(
        rescale_coefficients_to_normalized(theta, norms), norms);
    CHECK((back.stacked() - theta.stacked()).cwiseAbs().maxCoeff() <=
          1e-12 * theta.stacked().cwiseAbs().maxCoeff());
  }

  SUBCASE("length mismatch is rejected") {
    CHECK_THROWS_AS(rescale_coefficients_to_normalized(theta, Eigen::VectorXd::Ones(2)),
                    std::invalid_argument);
  }
}

TEST_CASE("predict matches the scalar double-loop evaluation") {
  const int n = 5, m = 12;
  const FeatureMatrix x = gen_features(m, n, 31);
  const ExpandedDesign d = expand_quadratic(x);

  Rng rng(32);
  GroupedCoefficients theta = GroupedCoefficients::zero(n);
  theta.dc = rng.normal();
  for (int i = 0; i < n; ++i) theta.linear(i) = rng.normal();
  for (int i = 0; i < n; ++i) theta.quadratic(i) = rng.normal();
  for (Eigen::Index i = 0; i < theta.cross.size(); ++i) theta.cross(i) = rng.normal();

  const Eigen::VectorXd y = predict(d, theta, CoeffScale::Original);
  for (int r = 0; r < m; ++r) {
    const double direct = test::naive_quadratic_eval(x.row(r).transpose(), theta);
    CHECK(std::abs(y(r) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("predict handles trivial coefficient vectors") {
  const ExpandedDesign d = expand_quadratic(gen_features(9, 4, 17));
  GroupedCoefficients zero = GroupedCoefficients::zero(4);
  CHECK(predict(d, zero, CoeffScale::Original).cwiseAbs().maxCoeff() == 0.0);

  GroupedCoefficients dc_only = GroupedCoefficients::zero(4);
  dc_only.dc = 3.25;
  CHECK(predict(d, dc_only, CoeffScale::Original).isApproxToConstant(3.25));
}

TEST_CASE("predict rejects a coefficient-scale mismatch") {
  const ExpandedDesign raw = expand_quadratic(gen_features(10, 3, 23));
  const ExpandedDesign normalized = normalize_columns(raw);
  const GroupedCoefficients theta = GroupedCoefficients::zero(3);
  CHECK_THROWS_AS(predict(raw, theta, CoeffScale::Normalized), std::invalid_argument);
  CHECK_THROWS_AS(predict(normalized, theta, CoeffScale::Original), std::invalid_argument);
}

TEST_CASE("grouped coefficients stack and unstack consistently") {
  Rng rng(41);
  Eigen::VectorXd v(column_count(7));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  const GroupedCoefficients g = GroupedCoefficients::from_stacked(v, 7);
  CHECK((g.stacked() - v).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(GroupedCoefficients::from_stacked(v, 6), std::invalid_argument);
}
