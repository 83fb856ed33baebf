#pragma once

// Finite price families that approximate the optimal revenue to within
// O(eps): a geometric-then-uniform value grid, paired with either every
// amount (monotone valuations), a uniform data grid (smooth valuations), or
// a dense-then-geometric data grid (diminishing returns).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "datapricing/market.hpp"
#include "datapricing/price_space.hpp"
#include "datapricing/valuations.hpp"

namespace datapricing {

enum class Scheme { monotone, smooth, diminishing };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::monotone: return "monotone";
    case Scheme::smooth: return "smooth";
    case Scheme::diminishing: return "diminishing";
  }
  return "unknown";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "monotone") return Scheme::monotone;
  if (s == "smooth") return Scheme::smooth;
  if (s == "diminishing") return Scheme::diminishing;
  throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

struct GridParams {
  double epsilon = 0.1;
  std::size_t m = 1;
  Amount n_total = 1;
  std::optional<double> smoothness;   // L
  std::optional<double> diminishing;  // J
};

/// Default enumeration cap on |P|.
inline constexpr std::uint64_t kDefaultCurveCap = 10'000'000;

namespace detail {

inline void require_epsilon(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
}

// ceil(log_{1+x} y), nudged down so exact powers do not round up on noise.
inline long ceil_log1p(double x, double y) { return static_cast<long>(std::ceil(std::log(y) / std::log1p(x) - 1e-12)); }

inline long nudged_ceil(double x) { return static_cast<long>(std::ceil(x - 1e-12)); }
inline long nudged_floor(double x) { return static_cast<long>(std::floor(x + 1e-12 * std::max(1.0, std::abs(x)))); }

inline double round_significant15(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.14e", x);
  return std::strtod(buf, nullptr);
}

}  // namespace detail

/// W = union over bands i >= start_index of { Z_{i-1} (1 + eps k / m) : k = 1..ceil((2+eps) m) },
/// with Z_i = eps (1+eps)^i, i = 0..ceil(log_{1+eps}(1/eps)).
inline std::vector<double> build_value_grid(double eps, std::size_t m, int start_index = 1) {
  detail::require_epsilon(eps);
  if (m < 1) throw std::invalid_argument("value grid needs m >= 1");
  if (start_index != 1 && start_index != 2) throw std::invalid_argument("value grid start index must be 1 or 2");
  const long bands = detail::ceil_log1p(eps, 1.0 / eps);
  const long per_band = detail::nudged_ceil((2.0 + eps) * static_cast<double>(m));
  std::vector<double> grid;
  for (long i = start_index; i <= bands; ++i) {
    const double z = eps * std::pow(1.0 + eps, static_cast<double>(i - 1));
    for (long k = 1; k <= per_band; ++k) {
      grid.push_back(detail::round_significant15(z + z * eps * static_cast<double>(k) / static_cast<double>(m)));
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw std::invalid_argument("epsilon too large: value grid has no bands");
  return grid;
}

/// |W| <= ceil((2+eps) m) * ceil(log_{1+eps}(1/eps)).
inline std::size_t value_grid_size_bound(double eps, std::size_t m) {
  detail::require_epsilon(eps);
  return static_cast<std::size_t>(detail::nudged_ceil((2.0 + eps) * static_cast<double>(m))) *
         static_cast<std::size_t>(detail::ceil_log1p(eps, 1.0 / eps));
}

/// Multiples of delta = floor(eps N / (m L)), the last one clamped to N.
inline std::vector<Amount> build_data_grid_smooth(double eps, std::size_t m, double smoothness, Amount n_total) {
  detail::require_epsilon(eps);
  if (!(smoothness > 0.0)) throw std::invalid_argument("smooth grid needs L > 0");
  if (m < 1 || n_total < 1) throw std::invalid_argument("smooth grid needs m >= 1 and N >= 1");
  const long delta = detail::nudged_floor(eps * static_cast<double>(n_total) /
                                          (static_cast<double>(m) * smoothness));
  if (delta < 1) {
    throw std::invalid_argument("smooth grid resolution too fine: floor(eps N / (m L)) = 0");
  }
  const Amount step = static_cast<Amount>(delta);
  const Amount count = (n_total + step - 1) / step;
  std::vector<Amount> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (Amount k = 1; k <= count; ++k) grid.push_back(std::min(k * step, n_total));
  return grid;
}

/// {1..floor(2Jm/eps^2)} united with the blocks
/// Q_i = { floor(Y_i + Y_i eps^2 k / (2Jm)) : k = 0..floor(2Jm) },
/// Y_i = floor((2Jm/eps^2) (1+eps^2)^i), i = 0..ceil(log_{1+eps^2}(N eps^2 / (2Jm))),
/// clamped to N, plus N itself.
inline std::vector<Amount> build_data_grid_diminishing(double eps, std::size_t m, double diminishing, Amount n_total) {
  detail::require_epsilon(eps);
  if (!(diminishing > 0.0)) throw std::invalid_argument("diminishing grid needs J > 0");
  if (m < 1 || n_total < 1) throw std::invalid_argument("diminishing grid needs m >= 1 and N >= 1");
  const double eps2 = eps * eps;
  const double two_jm = 2.0 * diminishing * static_cast<double>(m);
  const double base = two_jm / eps2;
  std::vector<Amount> grid;
  if (base >= static_cast<double>(n_total)) {
    for (Amount n = 1; n <= n_total; ++n) grid.push_back(n);
    return grid;
  }
  const Amount prefix = static_cast<Amount>(detail::nudged_floor(base));
  for (Amount n = 1; n <= prefix; ++n) grid.push_back(n);
  const long blocks = detail::ceil_log1p(eps2, static_cast<double>(n_total) / base);
  const long subdivisions = detail::nudged_floor(two_jm);
  for (long i = 0; i <= blocks; ++i) {
    const double y = static_cast<double>(detail::nudged_floor(base * std::pow(1.0 + eps2, static_cast<double>(i))));
    for (long k = 0; k <= subdivisions; ++k) {
      const double point = std::floor(y + y * eps2 * static_cast<double>(k) / two_jm);
      const Amount amount = std::min(static_cast<Amount>(point), n_total);
      if (amount >= 1) grid.push_back(amount);
    }
  }
  grid.push_back(n_total);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

/// Upper bound on the diminishing-returns data grid size. The leading-order
/// form 2Jm/eps^2 + 2Jm ceil(log_{1+eps^2}(N eps^2 / (2Jm))) + 1 undercounts when
/// 2Jm is small, so each of the ceil(log)+1 blocks is charged floor(2Jm)+1 points.
inline double diminishing_grid_size_bound(double eps, std::size_t m, double diminishing, Amount n_total) {
  const double eps2 = eps * eps;
  const double two_jm = 2.0 * diminishing * static_cast<double>(m);
  const double base = two_jm / eps2;
  if (base >= static_cast<double>(n_total)) return static_cast<double>(n_total);
  const double blocks = static_cast<double>(detail::ceil_log1p(eps2, static_cast<double>(n_total) / base)) + 1.0;
  return static_cast<double>(detail::nudged_floor(base)) + blocks * static_cast<double>(detail::nudged_floor(two_jm) + 1) + 1.0;
}

/// (e(N-1)/m)^m (e ceil(2+eps) ceil(log_{1+eps}(1/eps)))^m.
inline double space_size_bound(Amount n_total, std::size_t m, double eps) {
  detail::require_epsilon(eps);
  const double md = static_cast<double>(m);
  const double e = std::exp(1.0);
  const double data_term = e * static_cast<double>(n_total - 1) / md;
  const double value_term = e * static_cast<double>(detail::nudged_ceil(2.0 + eps)) *
                            static_cast<double>(detail::ceil_log1p(eps, 1.0 / eps));
  return std::pow(data_term, md) * std::pow(value_term, md);
}

struct SpaceOptions {
  /// Drop grid values above this level; a price above every valuation sells nothing.
  std::optional<double> prune_above;
  std::uint64_t curve_cap = kDefaultCurveCap;
};

/// An enumerable price family together with how it was built.
class DiscretizedPriceSpace {
 public:
  DiscretizedPriceSpace(Scheme scheme, GridParams params, MStepSpace space, std::uint64_t cap)
      : scheme_(scheme), params_(params), space_(std::move(space)), cap_(cap) {}

  Scheme scheme() const { return scheme_; }
  const GridParams& params() const { return params_; }
  const MStepSpace& curves() const { return space_; }
  std::span<const Amount> data_grid() const { return space_.data_grid(); }
  std::span<const double> value_grid() const { return space_.value_grid(); }
  std::size_t m() const { return space_.max_steps(); }
  SpaceCount count() const { return space_.count(); }
  std::uint64_t cap() const { return cap_; }
  double size_bound() const { return space_size_bound(params_.n_total, params_.m, params_.epsilon); }

  /// Throws when the family is too large to enumerate.
  std::uint64_t checked_count() const {
    const SpaceCount n = count();
    if (n.exceeds(cap_)) {
      throw std::length_error("price space has " + n.str() + " curves, above the enumeration cap " +
                              std::to_string(cap_));
    }
    return n.value;
  }

 private:
  Scheme scheme_;
  GridParams params_;
  MStepSpace space_;
  std::uint64_t cap_;
};

inline DiscretizedPriceSpace build_space(const GridParams& params, Scheme scheme, const SpaceOptions& options = {}) {
  detail::require_epsilon(params.epsilon);
  std::vector<Amount> data;
  std::vector<double> values;
  switch (scheme) {
    case Scheme::monotone:
      for (Amount n = 1; n <= params.n_total; ++n) data.push_back(n);
      values = build_value_grid(params.epsilon, params.m, 1);
      break;
    case Scheme::smooth:
      if (!params.smoothness) throw std::invalid_argument("smooth scheme needs the smoothness constant L");
      data = build_data_grid_smooth(params.epsilon, params.m, *params.smoothness, params.n_total);
      values = build_value_grid(params.epsilon, params.m, 1);
      break;
    case Scheme::diminishing:
      if (!params.diminishing) throw std::invalid_argument("diminishing scheme needs the constant J");
      data = build_data_grid_diminishing(params.epsilon, params.m, *params.diminishing, params.n_total);
      values = build_value_grid(params.epsilon, params.m, 2);
      break;
  }
  if (options.prune_above) {
    const double ceiling = *options.prune_above;
    std::erase_if(values, [&](double w) { return w > ceiling; });
    if (values.empty()) throw std::invalid_argument("pruning removed every grid value");
  }
  return DiscretizedPriceSpace(scheme, params, MStepSpace(params.n_total, std::move(data), std::move(values), params.m),
                               options.curve_cap);
}

/// Grid parameters for an instance; L and J come from the instance when
/// given, otherwise they are measured from its valuation curves.
inline GridParams grid_params_for(const MarketInstance& instance, double eps) {
  const CurveConstants measured = measure_constants(instance);
  GridParams p;
  p.epsilon = eps;
  p.m = instance.type_count();
  p.n_total = instance.n_total();
  p.smoothness = instance.smoothness().value_or(measured.smoothness);
  p.diminishing = instance.diminishing().value_or(measured.diminishing);
  return p;
}

}  // namespace datapricing
