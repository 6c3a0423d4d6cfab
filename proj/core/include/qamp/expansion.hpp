#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace qamp {

// Raw feature matrix: rows are samples, columns are features.
using FeatureMatrix = Eigen::MatrixXd;

enum class ColumnKind { Dc, Linear, Quadratic, Cross };

// Identifies what an expanded-design column computes: the constant column,
// x_i, x_i^2, or x_i * x_j with j > i.
struct ColumnGroup {
  ColumnKind kind = ColumnKind::Dc;
  int i = -1;  // feature index (linear/quadratic), first feature (cross)
  int j = -1;  // second feature (cross only), j > i
};

std::string describe(const ColumnGroup& g);

// Coefficients split by column group. `cross` is ordered lexicographically
// over pairs (i, j) with i < j, matching the cross columns of the design.
struct GroupedCoefficients {
  double dc = 0.0;
  Eigen::VectorXd linear;
  Eigen::VectorXd quadratic;
  Eigen::VectorXd cross;

  int feature_count() const { return static_cast<int>(linear.size()); }
  Eigen::Index total_size() const { return 1 + linear.size() + quadratic.size() + cross.size(); }
  Eigen::VectorXd stacked() const;  // [dc; linear; quadratic; cross]
  static GroupedCoefficients zero(int n);
  static GroupedCoefficients from_stacked(const Eigen::VectorXd& v, int n);
};

enum class CoeffScale { Original, Normalized };

// The M x L quadratic design. Column layout per row m:
//   [ 1 | x_m1 .. x_mN | x_m1^2 .. x_mN^2 | x_mi * x_mj for i < j, lexicographic ]
// `norms` holds the cumulative per-column scaling applied by
// normalize_columns (all ones for a freshly expanded design), i.e. the
// original column 2-norms once the design is normalized.
struct ExpandedDesign {
  Eigen::MatrixXd data;
  std::vector<ColumnGroup> groups;
  Eigen::VectorXd norms;
  bool normalized = false;
  int feature_count = 0;

  Eigen::Index rows() const { return data.rows(); }
  Eigen::Index cols() const { return data.cols(); }
};

// L = 1 + 2n + n(n-1)/2. Throws if n < 1.
Eigen::Index column_count(int n);

// Dense quadratic expansion of x. Throws on empty or non-finite input.
ExpandedDesign expand_quadratic(const FeatureMatrix& x);

// Divides every column by its 2-norm and accumulates the factors into
// `norms`. A column with zero norm is an error (its index carries meaning,
// so it cannot be dropped); the exception names the offending column.
ExpandedDesign normalize_columns(ExpandedDesign d);

// theta'_l = theta_l * norms_l  (original -> normalized scale)
GroupedCoefficients rescale_coefficients_to_normalized(const GroupedCoefficients& theta,
                                                       const Eigen::VectorXd& norms);
// theta_l = theta'_l / norms_l  (normalized -> original scale)
GroupedCoefficients rescale_coefficients_to_original(const GroupedCoefficients& theta_prime,
                                                     const Eigen::VectorXd& norms);

// X * theta. `scale` states which scale theta is in; it must match the
// design's normalized flag (mixing theta and theta' silently is the bug this
// guards against).
Eigen::VectorXd predict(const ExpandedDesign& design, const GroupedCoefficients& theta,
                        CoeffScale scale);

}  // namespace qamp
