#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "qamp/expansion.hpp"

namespace qamp {

// Closed-form lower-bound prediction for the squared largest singular value
// of the normalized quadratic design built from M x N i.i.d. standard
// normal features:
//   1 + N/3 + N(N+1)/(2M).
double predict_sigma1_sq(Eigen::Index m, Eigen::Index n);

// All min(M, L) singular values of a normalized design, descending.
Eigen::VectorXd empirical_spectrum(const ExpandedDesign& design);

struct SpectrumReport {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  Eigen::Index l = 0;
  double sigma1_sq_empirical = 0.0;  // mean over trials
  double sigma1_sq_predicted = 0.0;
  double sigma2_sq_mean = 0.0;
  int trials = 0;
  std::vector<Eigen::VectorXd> all_svs;  // per-trial spectra, kept on request
};

// For each (M, N): `trials` i.i.d. Gaussian feature draws, expanded,
// normalized, decomposed; sigma_1^2 averaged. Trial t of row r uses seed
// derive_seed(derive_seed(seed, r), t).
std::vector<SpectrumReport> spectrum_table(
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& dims, int trials,
    std::uint64_t seed, bool keep_all_svs = false);

// CSV columns: M,N,L,sigma1_sq_empirical,sigma1_sq_pred.
void write_spectrum_csv(const std::filesystem::path& file,
                        const std::vector<SpectrumReport>& reports);

// The 15 (M, N) pairs the default spectrum experiment sweeps.
const std::vector<std::pair<Eigen::Index, Eigen::Index>>& default_spectrum_dims();

}  // namespace qamp
