#pragma once

// Offline revenue maximization with a known type distribution: exhaustive
// search over a discretized family, and a brute-force reference optimum over
// a fine value lattice for small markets.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "datapricing/discretization.hpp"
#include "datapricing/market.hpp"
#include "datapricing/price_space.hpp"

namespace datapricing {

struct OfflineResult {
  MStepCurve curve;
  double revenue = 0.0;
  std::uint64_t index = 0;  // enumeration position; 0 for the reference optimum
};

/// Revenue of the cursor's curve, summed over types in index order exactly as
/// expected_revenue does.
inline double cursor_revenue(const MarketInstance& instance, const TypeDistribution& q, const MStepCursor& c) {
  double total = 0.0;
  for (TypeIndex i = 0; i < instance.type_count(); ++i) {
    const std::size_t j = demanded_step(instance.valuation(i), c);
    total += q[i] * (j == npos ? 0.0 : c.value(j));
  }
  return total;
}

/// First revenue maximizer in enumeration order.
inline OfflineResult best_in_space(const MarketInstance& instance, const TypeDistribution& q,
                                   const DiscretizedPriceSpace& space) {
  if (q.size() != instance.type_count()) throw std::invalid_argument("type distribution size differs from type count");
  if (space.params().n_total != instance.n_total()) throw std::invalid_argument("price space and market disagree on N");
  space.checked_count();
  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t best_index = 0;
  space.curves().for_each([&](const MStepCursor& c) {
    const double r = cursor_revenue(instance, q, c);
    if (r > best) {
      best = r;
      best_index = c.index();
    }
  });
  return {space.curves().curve_at(best_index), best, best_index};
}

/// Largest markets the reference optimum accepts.
inline constexpr Amount kOracleMaxAmount = 15;
inline constexpr std::size_t kOracleMaxTypes = 3;

namespace detail {

// Depth-first search over step curves with levels on a lattice. Prices are
// expanded pointwise and each buyer scans every amount, so nothing here is
// shared with the step-structured demand code.
class ReferenceSearch {
 public:
  ReferenceSearch(const MarketInstance& instance, const TypeDistribution& q, std::vector<double> levels)
      : instance_(instance), q_(q), levels_(std::move(levels)),
        prices_(static_cast<std::size_t>(instance.n_total()) + 1, 0.0) {}

  OfflineResult run() {
    const std::size_t max_steps = instance_.type_count();
    for (std::size_t steps = 1; steps <= max_steps; ++steps) {
      steps_.clear();
      extend(steps, 0, 0);
    }
    return {MStepCurve(instance_.n_total(), best_steps_), best_revenue_, 0};
  }

 private:
  // Places the next step covering (prev_boundary, boundary] at a level index
  // above prev_level_index.
  void extend(std::size_t remaining, Amount prev_boundary, std::size_t min_level) {
    const Amount n_total = instance_.n_total();
    const Amount last_boundary = remaining == 1 ? n_total : n_total - static_cast<Amount>(remaining - 1);
    const Amount first_boundary = remaining == 1 ? n_total : prev_boundary + 1;
    for (Amount b = first_boundary; b <= last_boundary; ++b) {
      for (std::size_t l = min_level; l < levels_.size(); ++l) {
        if (levels_.size() - l < remaining) break;
        for (Amount n = prev_boundary + 1; n <= b; ++n) prices_[static_cast<std::size_t>(n)] = levels_[l];
        steps_.push_back({b, levels_[l]});
        if (remaining == 1) {
          score();
        } else {
          extend(remaining - 1, b, l + 1);
        }
        steps_.pop_back();
      }
    }
  }

  void score() {
    double revenue = 0.0;
    for (TypeIndex i = 0; i < instance_.type_count(); ++i) {
      const ValuationCurve& v = instance_.valuation(i);
      double best_u = 0.0;  // buying nothing
      Amount pick = 0;
      for (Amount n = 1; n <= instance_.n_total(); ++n) {
        const double u = v(n) - prices_[static_cast<std::size_t>(n)];
        if (u >= best_u) {
          best_u = u;
          pick = n;
        }
      }
      revenue += q_[i] * prices_[static_cast<std::size_t>(pick)];
    }
    if (revenue > best_revenue_) {
      best_revenue_ = revenue;
      best_steps_ = steps_;
    }
  }

  const MarketInstance& instance_;
  const TypeDistribution& q_;
  std::vector<double> levels_;
  std::vector<double> prices_;
  std::vector<Step> steps_;
  std::vector<Step> best_steps_;
  double best_revenue_ = -1.0;
};

}  // namespace detail

/// Best non-decreasing step curve with at most m steps, jumps anywhere in 1..N
/// and levels on {0, r, 2r, ..., 1}. Exhaustive, so only small markets.
inline OfflineResult brute_force_opt(const MarketInstance& instance, const TypeDistribution& q,
                                     double resolution = 0.01) {
  if (instance.n_total() > kOracleMaxAmount || instance.type_count() > kOracleMaxTypes) {
    throw std::invalid_argument("reference optimum limited to N <= 15 and m <= 3");
  }
  if (q.size() != instance.type_count()) throw std::invalid_argument("type distribution size differs from type count");
  if (!(resolution > 0.0 && resolution <= 1.0)) throw std::invalid_argument("resolution must lie in (0,1]");
  const auto top = static_cast<long>(std::floor(1.0 / resolution + 1e-9));
  std::vector<double> levels;
  for (long k = 0; k <= top; ++k) levels.push_back(static_cast<double>(k) * resolution);
  return detail::ReferenceSearch(instance, q, std::move(levels)).run();
}

}  // namespace datapricing
