#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lsinv/dct.hpp"
#include "lsinv/grid.hpp"
#include "lsinv/levelset.hpp"
#include "lsinv/likelihood.hpp"
#include "lsinv/mcmc.hpp"
#include "lsinv/prior.hpp"
#include "lsinv/rng.hpp"

namespace lsinv {

/// acf(k) = sum (x_t - m)(x_{t+k} - m) / sum (x_t - m)^2 for k = 0..max_lag.
/// Throws NumericalError for a constant series.
std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag);

/// Gelman-Rubin factor, R^2 = (n-1)/n + B/(n W) with B = n var(chain means) and
/// W = mean(chain variances). Needs >= 2 chains of equal length >= 10.
double psrf(const std::vector<std::vector<double>>& chains);

struct PsrfPoint {
  std::size_t length;
  double value;
};
/// PSRF on prefixes of length stride, 2*stride, ... (prefixes shorter than 10 are skipped).
std::vector<PsrfPoint> psrf_prefixes(const std::vector<std::vector<double>>& chains, std::size_t stride);

struct PosteriorSummary {
  GridField mean_u;
  GridField kappa_of_mean_u;
  GridField pushforward_mean;
  GridField pushforward_variance;
  std::size_t sample_count = 0;
};

/// Single streaming pass over the KL samples of every chain.
PosteriorSummary pushforward_summary(std::span<const SampleMatrix> chains, const KLBasis& basis,
                                     const LevelSetSpec& spec);
PosteriorSummary pushforward_summary(const SampleMatrix& samples, const KLBasis& basis, const LevelSetSpec& spec);

/// Value of the orthonormal DCT-II coefficient (k1, k2) of F(u) for every sample row.
std::vector<double> dct_coefficient_series(std::span<const SampleMatrix> chains, const KLBasis& basis,
                                           const LevelSetSpec& spec, std::size_t k1, std::size_t k2);

struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<double> density;  // integrates to one: sum density * width == 1

  double center(std::size_t b) const { return lo + (static_cast<double>(b) + 0.5) * width; }
};
/// Histogram over [lo, hi] normalised to unit integral. lo == hi uses a single unit-width range.
Histogram histogram_density(std::span<const double> values, double lo, double hi, std::size_t bins);

struct CoefficientDensity {
  std::size_t k1 = 0, k2 = 0;
  std::vector<double> prior_values;
  std::vector<double> posterior_values;
  Histogram prior;
  Histogram posterior;  // same bins as prior
  double truth = 0.0;
};

/// Prior/posterior densities of one DCT coefficient of kappa; prior values come from
/// prior_draws fresh coefficient draws. Both histograms share bins spanning all values and the truth.
CoefficientDensity coefficient_density(std::span<const SampleMatrix> chains, const KLBasis& basis,
                                       const LevelSetSpec& spec, std::size_t k1, std::size_t k2,
                                       const GridField& truth_kappa, std::size_t prior_draws, RandomStream& rng,
                                       std::size_t bins = 64);

struct LipschitzProbe {
  double data_change = 0.0;  // |y - y'|_Gamma
  double mean_change = 0.0;  // grid L2 norm of E'[f] - E[f]
  double ess = 0.0;          // effective sample size of the importance weights
  double ratio() const { return data_change > 0.0 ? mean_change / data_change : 0.0; }
};

/// Reweights posterior samples from data y to y' = y + delta * direction by
/// exp(Phi(u; y) - Phi(u; y')). predictions holds G(u_s) per row; functionals holds f(u_s) per
/// row, a field on grid. Throws NumericalError when the effective sample size drops below 10.
LipschitzProbe lipschitz_probe(const SampleMatrix& predictions, const SampleMatrix& functionals, const Grid& grid,
                               const ObservationSet& data, double delta, std::span<const double> direction);

/// Weighted mean of the rows; identical code path for the unweighted (1/S) case.
std::vector<double> weighted_row_mean(const SampleMatrix& m, std::span<const double> weights);

/// Fraction of cells whose nearest region value differs between the two fields.
double classification_error(const GridField& estimate, const GridField& truth, const LevelSetSpec& spec);

}  // namespace lsinv
