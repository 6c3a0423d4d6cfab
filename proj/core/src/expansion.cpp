#include "qamp/expansion.hpp"

#include <cmath>
#include <stdexcept>

namespace qamp {

std::string describe(const ColumnGroup& g) {
  switch (g.kind) {
    case ColumnKind::Dc:
      return "dc";
    case ColumnKind::Linear:
      return "linear(" + std::to_string(g.i) + ")";
    case ColumnKind::Quadratic:
      return "quadratic(" + std::to_string(g.i) + ")";
    case ColumnKind::Cross:
      return "cross(" + std::to_string(g.i) + "," + std::to_string(g.j) + ")";
  }
  return "?";
}

Eigen::VectorXd GroupedCoefficients::stacked() const {
  Eigen::VectorXd v(total_size());
  v(0) = dc;
  Eigen::Index at = 1;
  v.segment(at, linear.size()) = linear;
  at += linear.size();
  v.segment(at, quadratic.size()) = quadratic;
  at += quadratic.size();
  v.segment(at, cross.size()) = cross;
  return v;
}

GroupedCoefficients GroupedCoefficients::zero(int n) {
  GroupedCoefficients g;
  g.linear = Eigen::VectorXd::Zero(n);
  g.quadratic = Eigen::VectorXd::Zero(n);
  g.cross = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * (n - 1) / 2);
  return g;
}

GroupedCoefficients GroupedCoefficients::from_stacked(const Eigen::VectorXd& v, int n) {
  if (v.size() != column_count(n))
    throw std::invalid_argument("from_stacked: vector length " + std::to_string(v.size()) +
                                " does not match column_count(" + std::to_string(n) + ")");
  GroupedCoefficients g;
  g.dc = v(0);
  g.linear = v.segment(1, n);
  g.quadratic = v.segment(1 + n, n);
  g.cross = v.segment(1 + 2 * n, static_cast<Eigen::Index>(n) * (n - 1) / 2);
  return g;
}

Eigen::Index column_count(int n) {
  if (n < 1) throw std::invalid_argument("column_count: feature count must be >= 1");
  const auto nn = static_cast<Eigen::Index>(n);
  return 1 + 2 * nn + nn * (nn - 1) / 2;
}

ExpandedDesign expand_quadratic(const FeatureMatrix& x) {
  if (x.rows() < 1 || x.cols() < 1)
    throw std::invalid_argument("expand_quadratic: feature matrix must be at least 1x1");
  if (!x.allFinite()) throw std::invalid_argument("expand_quadratic: non-finite feature entries");

  const auto m = x.rows();
  const int n = static_cast<int>(x.cols());
  const Eigen::Index l = column_count(n);

  ExpandedDesign d;
  d.data.resize(m, l);
  d.groups.resize(static_cast<std::size_t>(l));
  d.norms = Eigen::VectorXd::Ones(l);
  d.normalized = false;
  d.feature_count = n;

  d.data.col(0).setOnes();
  d.groups[0] = {ColumnKind::Dc, -1, -1};

  for (int i = 0; i < n; ++i) {
    d.data.col(1 + i) = x.col(i);
    d.groups[static_cast<std::size_t>(1 + i)] = {ColumnKind::Linear, i, -1};
  }
  for (int i = 0; i < n; ++i) {
    d.data.col(1 + n + i) = x.col(i).array().square();
    d.groups[static_cast<std::size_t>(1 + n + i)] = {ColumnKind::Quadratic, i, -1};
  }
  Eigen::Index at = 1 + 2 * static_cast<Eigen::Index>(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      d.data.col(at) = x.col(i).cwiseProduct(x.col(j));
      d.groups[static_cast<std::size_t>(at)] = {ColumnKind::Cross, i, j};
      ++at;
    }
  }
  return d;
}

ExpandedDesign normalize_columns(ExpandedDesign d) {
  for (Eigen::Index l = 0; l < d.cols(); ++l) {
    const double nrm = d.data.col(l).norm();
    if (nrm == 0.0)
      throw std::domain_error("normalize_columns: column " + std::to_string(l) + " (" +
                              describe(d.groups[static_cast<std::size_t>(l)]) + ") has zero norm");
    d.data.col(l) /= nrm;
    d.norms(l) *= nrm;
  }
  d.normalized = true;
  return d;
}

namespace {

void check_rescale(const GroupedCoefficients& theta, const Eigen::VectorXd& norms) {
  if (theta.total_size() != norms.size())
    throw std::invalid_argument("coefficient rescale: length mismatch (coefficients " +
                                std::to_string(theta.total_size()) + ", norms " +
                                std::to_string(norms.size()) + ")");
}

}  // namespace

GroupedCoefficients rescale_coefficients_to_normalized(const GroupedCoefficients& theta,
                                                       const Eigen::VectorXd& norms) {
  check_rescale(theta, norms);
  const int n = theta.feature_count();
  return GroupedCoefficients::from_stacked(theta.stacked().cwiseProduct(norms), n);
}

GroupedCoefficients rescale_coefficients_to_original(const GroupedCoefficients& theta_prime,
                                                     const Eigen::VectorXd& norms) {
  check_rescale(theta_prime, norms);
  if ((norms.array() <= 0.0).any())
    throw std::domain_error("coefficient rescale: nonpositive column norm");
  const int n = theta_prime.feature_count();
  return GroupedCoefficients::from_stacked(theta_prime.stacked().cwiseQuotient(norms), n);
}

Eigen::VectorXd predict(const ExpandedDesign& design, const GroupedCoefficients& theta,
                        CoeffScale scale) {
  const bool theta_normalized = scale == CoeffScale::Normalized;
  if (theta_normalized != design.normalized)
    throw std::invalid_argument(
        "predict: coefficient scale does not match the design (normalized design requires "
        "normalized coefficients and vice versa)");
  if (theta.total_size() != design.cols())
    throw std::invalid_argument("predict: coefficient length does not match design width");
  return design.data * theta.stacked();
}

}  // namespace qamp
