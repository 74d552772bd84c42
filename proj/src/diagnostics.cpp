#include "lsinv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lsinv/errors.hpp"
#include "lsinv/kernels.hpp"

namespace lsinv {

std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag) {
  if (x.size() <= max_lag) throw std::invalid_argument("series must be longer than the maximum lag");
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (double v : x) denom += (v - mean) * (v - mean);
  if (!(denom > 0.0)) throw NumericalError("autocorrelation undefined for a constant series");
  std::vector<double> acf(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) s += (x[t] - mean) * (x[t + k] - mean);
    acf[k] = s / denom;
  }
  acf[0] = 1.0;
  return acf;
}

double psrf(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw std::invalid_argument("PSRF needs at least two chains");
  const std::size_t n = chains.front().size();
  if (n < 10) throw std::invalid_argument("PSRF needs chains of length >= 10");
  for (const auto& c : chains)
    if (c.size() != n) throw std::invalid_argument("PSRF chains must have equal length");

  std::vector<double> means(m), vars(m);
  for (std::size_t c = 0; c < m; ++c) {
    double s = 0.0;
    for (double v : chains[c]) s += v;
    means[c] = s / static_cast<double>(n);
    double q = 0.0;
    for (double v : chains[c]) q += (v - means[c]) * (v - means[c]);
    vars[c] = q / static_cast<double>(n - 1);
  }
  double grand = 0.0;
  for (double v : means) grand += v;
  grand /= static_cast<double>(m);
  double var_means = 0.0;
  for (double v : means) var_means += (v - grand) * (v - grand);
  var_means /= static_cast<double>(m - 1);
  double w = 0.0;
  for (double v : vars) w += v;
  w /= static_cast<double>(m);
  if (!(w > 0.0)) throw NumericalError("PSRF undefined: zero within-chain variance");
  const double nd = static_cast<double>(n);
  // B / (n W) with B = n var(means) reduces to var(means) / W.
  return std::sqrt((nd - 1.0) / nd + var_means / w);
}

std::vector<PsrfPoint> psrf_prefixes(const std::vector<std::vector<double>>& chains, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be positive");
  std::vector<PsrfPoint> out;
  const std::size_t n = chains.empty() ? 0 : chains.front().size();
  for (std::size_t len = stride; len <= n; len += stride) {
    if (len < 10) continue;
    std::vector<std::vector<double>> prefix;
    prefix.reserve(chains.size());
    for (const auto& c : chains) prefix.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(len));
    out.push_back({len, psrf(prefix)});
  }
  return out;
}

PosteriorSummary pushforward_summary(std::span<const SampleMatrix> chains, const KLBasis& basis,
                                     const LevelSetSpec& spec) {
  const Grid& grid = basis.grid();
  const std::size_t cells = grid.cells();
  std::vector<double> sum_u(cells, 0.0), sum_u2(cells, 0.0), sum_k(cells, 0.0), sum_k2(cells, 0.0);
  std::vector<double> kappa(cells);
  std::size_t count = 0;
  for (const auto& m : chains) {
    if (m.cols != basis.size()) throw std::invalid_argument("sample width does not match the basis");
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const GridField u = synthesize(basis, m.row(r));
      kernels::threshold(u.values(), spec, kappa);
      kernels::accumulate_moments(u.values(), sum_u, sum_u2);
      kernels::accumulate_moments(kappa, sum_k, sum_k2);
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("pushforward summary needs at least one sample");
  const double inv = 1.0 / static_cast<double>(count);
  std::vector<double> mean_u(cells), mean_k(cells), var_k(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    mean_u[c] = sum_u[c] * inv;
    mean_k[c] = sum_k[c] * inv;
    var_k[c] = std::max(0.0, sum_k2[c] * inv - mean_k[c] * mean_k[c]);
  }
  GridField mu(grid, std::move(mean_u));
  GridField kappa_of_mean = apply_level_set_map(mu, spec);
  return {std::move(mu), std::move(kappa_of_mean), GridField(grid, std::move(mean_k)), GridField(grid, std::move(var_k)),
          count};
}

PosteriorSummary pushforward_summary(const SampleMatrix& samples, const KLBasis& basis, const LevelSetSpec& spec) {
  return pushforward_summary(std::span(&samples, 1), basis, spec);
}

std::vector<double> dct_coefficient_series(std::span<const SampleMatrix> chains, const KLBasis& basis,
                                           const LevelSetSpec& spec, std::size_t k1, std::size_t k2) {
  const std::size_t n = basis.grid().n();
  if (k1 >= n || k2 >= n) throw std::out_of_range("DCT mode outside the grid");
  std::vector<double> out;
  for (const auto& m : chains)
    for (std::size_t r = 0; r < m.rows(); ++r)
      out.push_back(dct2_coefficients(apply_level_set_map(synthesize(basis, m.row(r)), spec))(k1, k2));
  return out;
}

Histogram histogram_density(std::span<const double> values, double lo, double hi, std::size_t bins) {
  if (values.empty()) throw std::invalid_argument("histogram of an empty sample");
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  if (!(hi >= lo)) throw std::invalid_argument("histogram range is inverted");
  Histogram h;
  h.lo = lo;
  h.width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0 / static_cast<double>(bins);
  if (hi == lo) h.lo = lo - 0.5;
  h.density.assign(bins, 0.0);
  for (double v : values) {
    auto b = static_cast<std::ptrdiff_t>(std::floor((v - h.lo) / h.width));
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    h.density[static_cast<std::size_t>(b)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(values.size()) * h.width);
  for (double& d : h.density) d *= norm;
  return h;
}

CoefficientDensity coefficient_density(std::span<const SampleMatrix> chains, const KLBasis& basis,
                                       const LevelSetSpec& spec, std::size_t k1, std::size_t k2,
                                       const GridField& truth_kappa, std::size_t prior_draws, RandomStream& rng,
                                       std::size_t bins) {
  if (!(truth_kappa.grid() == basis.grid())) throw std::invalid_argument("truth must live on the inversion grid");
  CoefficientDensity d;
  d.k1 = k1;
  d.k2 = k2;
  d.posterior_values = dct_coefficient_series(chains, basis, spec, k1, k2);
  if (d.posterior_values.empty()) throw std::invalid_argument("coefficient density needs at least one sample");
  SampleMatrix prior{basis.size(), {}};
  for (std::size_t s = 0; s < prior_draws; ++s) prior.append(draw_coefficients(basis.size(), rng).xi);
  d.prior_values = dct_coefficient_series(std::span(&prior, 1), basis, spec, k1, k2);
  d.truth = dct2_coefficients(truth_kappa)(k1, k2);

  double lo = d.truth, hi = d.truth;
  for (const auto* vs : {&d.prior_values, &d.posterior_values})
    for (double v : *vs) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  d.posterior = histogram_density(d.posterior_values, lo, hi, bins);
  if (!d.prior_values.empty()) d.prior = histogram_density(d.prior_values, lo, hi, bins);
  return d;
}

std::vector<double> weighted_row_mean(const SampleMatrix& m, std::span<const double> weights) {
  if (weights.size() != m.rows()) throw std::invalid_argument("one weight per row required");
  std::vector<double> out(m.cols, 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols; ++c) out[c] += weights[r] * row[c];
  }
  return out;
}

LipschitzProbe lipschitz_probe(const SampleMatrix& predictions, const SampleMatrix& functionals, const Grid& grid,
                               const ObservationSet& data, double delta, std::span<const double> direction) {
  const std::size_t s = predictions.rows();
  if (s == 0 || functionals.rows() != s) throw std::invalid_argument("need matching, non-empty sample sets");
  if (predictions.cols != data.size() || direction.size() != data.size())
    throw std::invalid_argument("prediction width and direction must match the data");
  if (functionals.cols != grid.cells()) throw std::invalid_argument("functionals must be fields on the grid");

  ObservationSet shifted = data;
  for (std::size_t j = 0; j < data.size(); ++j) shifted.y[j] += delta * direction[j];

  std::vector<double> logw(s);
  for (std::size_t r = 0; r < s; ++r) logw[r] = misfit(predictions.row(r), data) - misfit(predictions.row(r), shifted);
  const double top = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(s);
  double total = 0.0;
  for (std::size_t r = 0; r < s; ++r) total += (w[r] = std::exp(logw[r] - top));
  double sq = 0.0;
  for (double& v : w) {
    v /= total;
    sq += v * v;
  }

  LipschitzProbe out;
  out.ess = 1.0 / sq;
  std::vector<double> diff(data.size());
  for (std::size_t j = 0; j < data.size(); ++j) diff[j] = shifted.y[j] - data.y[j];
  out.data_change = gamma_norm(diff, data.gamma);
  if (out.ess < 10.0)
    throw NumericalError("reweighting effective sample size " + std::to_string(out.ess) +
                         " < 10; perturbation too large");

  const std::vector<double> uniform(s, 1.0 / static_cast<double>(s));
  const auto base = weighted_row_mean(functionals, uniform);
  const auto moved = weighted_row_mean(functionals, w);
  double acc = 0.0;
  for (std::size_t c = 0; c < base.size(); ++c) acc += (moved[c] - base[c]) * (moved[c] - base[c]);
  out.mean_change = std::sqrt(acc) * grid.h();
  return out;
}

double classification_error(const GridField& estimate, const GridField& truth, const LevelSetSpec& spec) {
  if (!(estimate.grid() == truth.grid())) throw std::invalid_argument("fields live on different grids");
  std::size_t wrong = 0;
  for (std::size_t c = 0; c < estimate.size(); ++c)
    if (spec.nearest_region(estimate[c]) != spec.nearest_region(truth[c])) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(estimate.size());
}

}  // namespace lsinv
