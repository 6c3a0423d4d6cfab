#include "qamp/spectrum.hpp"

#include <Eigen/SVD>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include "qamp/rng.hpp"
#include "qamp/synthetic.hpp"

namespace qamp {

double predict_sigma1_sq(Eigen::Index m, Eigen::Index n) {
  if (m < 1 || n < 1) throw std::invalid_argument("predict_sigma1_sq: m, n must be >= 1");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  return 1.0 + nd / 3.0 + nd * (nd + 1.0) / (2.0 * md);
}

Eigen::VectorXd empirical_spectrum(const ExpandedDesign& design) {
  if (!design.normalized)
    throw std::invalid_argument("empirical_spectrum: design must be normalized");
  if (!design.data.allFinite())
    throw std::invalid_argument("empirical_spectrum: non-finite design entries");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(design.data);
  return svd.singularValues();  // Eigen returns them in descending order
}

std::vector<SpectrumReport> spectrum_table(
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& dims, int trials,
    std::uint64_t seed, bool keep_all_svs) {
  if (trials < 1) throw std::invalid_argument("spectrum_table: trials must be >= 1");
  std::vector<SpectrumReport> reports;
  reports.reserve(dims.size());
  for (std::size_t row = 0; row < dims.size(); ++row) {
    const auto [m, n] = dims[row];
    SpectrumReport rep;
    rep.m = m;
    rep.n = n;
    rep.l = column_count(static_cast<int>(n));
    rep.trials = trials;
    rep.sigma1_sq_predicted = predict_sigma1_sq(m, n);
    const std::uint64_t row_seed = derive_seed(seed, row);
    double sum1 = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
      const FeatureMatrix x = gen_features(static_cast<int>(m), static_cast<int>(n),
                                           derive_seed(row_seed, static_cast<std::uint64_t>(t)));
      const ExpandedDesign design = normalize_columns(expand_quadratic(x));
      const Eigen::VectorXd svs = empirical_spectrum(design);
      sum1 += svs(0) * svs(0);
      if (svs.size() > 1) sum2 += svs(1) * svs(1);
      if (keep_all_svs) rep.all_svs.push_back(svs);
    }
    rep.sigma1_sq_empirical = sum1 / trials;
    rep.sigma2_sq_mean = sum2 / trials;
    reports.push_back(std::move(rep));
  }
  return reports;
}

void write_spectrum_csv(const std::filesystem::path& file,
                        const std::vector<SpectrumReport>& reports) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  auto fmt = [](double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
  };
  out << "M,N,L,sigma1_sq_empirical,sigma1_sq_pred\n";
  for (const SpectrumReport& r : reports)
    out << r.m << ',' << r.n << ',' << r.l << ',' << fmt(r.sigma1_sq_empirical) << ','
        << fmt(r.sigma1_sq_predicted) << '\n';
  if (!out) throw std::runtime_error("write failed for " + file.string());
}

const std::vector<std::pair<Eigen::Index, Eigen::Index>>& default_spectrum_dims() {
  static const std::vector<std::pair<Eigen::Index, Eigen::Index>> dims = {
      {1000, 10}, {1500, 15}, {2000, 20}, {3000, 20}, {3000, 30},
      {4000, 40}, {4500, 50}, {5000, 60}, {5500, 70}, {5000, 80},
      {6000, 80}, {8000, 80}, {8000, 90}, {6000, 100}, {8000, 100},
  };
  return dims;
}

}  // namespace qamp
