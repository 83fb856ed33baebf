#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "datapricing/market.hpp"
#include "datapricing/random.hpp"

namespace datapricing {

/// Learning-curve shaped valuation alpha - beta * n^(-gamma).
struct PowerLawSpec {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.5;
};

inline ValuationCurve power_law_curve(const PowerLawSpec& spec, Amount n_total) {
  if (n_total < 1) throw std::invalid_argument("power law curve needs N >= 1");
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) throw std::invalid_argument("power law alpha must be in (0,1]");
  if (!(spec.beta >= 0.0) || !std::isfinite(spec.beta)) throw std::invalid_argument("power law beta must be >= 0");
  if (!(spec.gamma > 0.0 && spec.gamma <= 1.0)) throw std::invalid_argument("power law gamma must be in (0,1]");
  std::vector<double> values(static_cast<std::size_t>(n_total) + 1, 0.0);
  for (Amount n = 1; n <= n_total; ++n) {
    const double raw = spec.alpha - spec.beta * std::pow(static_cast<double>(n), -spec.gamma);
    values[static_cast<std::size_t>(n)] = std::clamp(raw, 0.0, 1.0);
  }
  return ValuationCurve(std::move(values));
}

/// v(n) = scale * n / N.
inline ValuationCurve linear_curve(double scale, Amount n_total) {
  if (n_total < 1) throw std::invalid_argument("linear curve needs N >= 1");
  if (!(scale >= 0.0 && scale <= 1.0)) throw std::invalid_argument("linear curve scale must be in [0,1]");
  std::vector<double> values(static_cast<std::size_t>(n_total) + 1, 0.0);
  for (Amount n = 1; n <= n_total; ++n) {
    values[static_cast<std::size_t>(n)] = scale * static_cast<double>(n) / static_cast<double>(n_total);
  }
  return ValuationCurve(std::move(values));
}

/// Piecewise-linear interpolation of knot_count sorted uniform draws spread
/// evenly over amounts 1..N.
inline ValuationCurve random_monotone_curve(std::uint64_t seed, Amount n_total, std::size_t knot_count) {
  if (n_total < 1) throw std::invalid_argument("random curve needs N >= 1");
  if (knot_count < 1) throw std::invalid_argument("random curve needs at least one knot");
  Rng rng(seed);
  std::vector<double> knots(knot_count);
  for (double& k : knots) k = rng.uniform();
  std::sort(knots.begin(), knots.end());

  std::vector<double> values(static_cast<std::size_t>(n_total) + 1, 0.0);
  for (Amount n = 1; n <= n_total; ++n) {
    double v;
    if (knot_count == 1 || n_total == 1) {
      v = knot_count == 1 ? knots[0] : knots.back();
    } else {
      const double pos = static_cast<double>(n - 1) * static_cast<double>(knot_count - 1) /
                         static_cast<double>(n_total - 1);
      const auto lo = std::min(static_cast<std::size_t>(pos), knot_count - 2);
      const double frac = pos - static_cast<double>(lo);
      v = knots[lo] + (knots[lo + 1] - knots[lo]) * frac;
    }
    values[static_cast<std::size_t>(n)] = std::clamp(v, 0.0, 1.0);
  }
  std::sort(values.begin() + 1, values.end());
  return ValuationCurve(std::move(values));
}

/// Tightest constants for the smoothness bound v(n+k) - v(n) <= (L/N) k and
/// the diminishing-returns bound v(n+1) - v(n) <= J/n.
struct CurveConstants {
  double smoothness = 0.0;   // L
  double diminishing = 0.0;  // J
};

inline CurveConstants measure_constants(const ValuationCurve& v) {
  const Amount n_total = v.n_total();
  double max_increment = 0.0;
  double j_hat = 0.0;
  for (Amount n = 0; n < n_total; ++n) {
    const double inc = v(n + 1) - v(n);
    max_increment = std::max(max_increment, inc);
    if (n >= 1) j_hat = std::max(j_hat, static_cast<double>(n) * inc);
  }
  return {static_cast<double>(n_total) * max_increment, j_hat};
}

/// Constants that hold simultaneously for every type of the instance.
inline CurveConstants measure_constants(const MarketInstance& instance) {
  CurveConstants out;
  for (const auto& v : instance.valuations()) {
    const CurveConstants c = measure_constants(v);
    out.smoothness = std::max(out.smoothness, c.smoothness);
    out.diminishing = std::max(out.diminishing, c.diminishing);
  }
  return out;
}

}  // namespace datapricing
