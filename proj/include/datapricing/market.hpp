#pragma once

// Buyer demand semantics for a posted-price data market.
//
// A seller posts one anonymous price curve p over amounts 0..N. A buyer of
// type i with valuation curve v_i buys the amount maximizing v_i(n) - p(n),
// taking the largest such amount on ties, or buys nothing when every amount
// has negative utility.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace datapricing {

using Amount = std::int64_t;
using TypeIndex = std::size_t;

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

/// Non-decreasing value of n data points, n = 0..N, with v(0) = 0 and range [0,1].
class ValuationCurve {
 public:
  explicit ValuationCurve(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
      throw std::invalid_argument("valuation curve needs at least amounts 0 and 1");
    }
    if (values_[0] != 0.0) {
      throw std::invalid_argument("valuation curve must have v(0) = 0");
    }
    for (std::size_t n = 0; n < values_.size(); ++n) {
      const double x = values_[n];
      if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
        throw std::invalid_argument("valuation value out of [0,1] at n=" + std::to_string(n));
      }
      if (n > 0 && x < values_[n - 1]) {
        throw std::invalid_argument("valuation curve decreases at n=" + std::to_string(n));
      }
    }
  }

  Amount n_total() const { return static_cast<Amount>(values_.size()) - 1; }
  double operator()(Amount n) const { return values_[static_cast<std::size_t>(n)]; }
  std::span<const double> values() const { return values_; }

  bool operator==(const ValuationCurve&) const = default;

 private:
  std::vector<double> values_;
};

struct Step {
  Amount boundary;
  double value;
  bool operator==(const Step&) const = default;
};

/// Non-decreasing step price curve. Step j covers amounts (boundary_{j-1}, boundary_j]
/// and the last boundary is N; price(0) = 0.
class MStepCurve {
 public:
  MStepCurve(Amount n_total, std::vector<Step> steps) : n_total_(n_total), steps_(std::move(steps)) {
    if (n_total_ < 1) throw std::invalid_argument("price curve needs N >= 1");
    if (steps_.empty()) throw std::invalid_argument("price curve needs at least one step");
    for (std::size_t j = 0; j < steps_.size(); ++j) {
      const Step& s = steps_[j];
      if (s.boundary < 1 || s.boundary > n_total_) {
        throw std::invalid_argument("step boundary outside 1..N");
      }
      if (!std::isfinite(s.value) || s.value < 0.0) {
        throw std::invalid_argument("step value must be finite and non-negative");
      }
      if (j > 0 && (s.boundary <= steps_[j - 1].boundary || s.value <= steps_[j - 1].value)) {
        throw std::invalid_argument("step boundaries and values must be strictly increasing");
      }
    }
    if (steps_.back().boundary != n_total_) {
      throw std::invalid_argument("last step boundary must equal N");
    }
  }

  static MStepCurve zero(Amount n_total) { return MStepCurve(n_total, {{n_total, 0.0}}); }
  static MStepCurve flat(Amount n_total, double value) { return MStepCurve(n_total, {{n_total, value}}); }

  Amount n_total() const { return n_total_; }
  std::size_t size() const { return steps_.size(); }
  std::span<const Step> steps() const { return steps_; }

  double price(Amount n) const {
    if (n <= 0) return 0.0;
    auto it = std::lower_bound(steps_.begin(), steps_.end(), n,
                               [](const Step& s, Amount x) { return s.boundary < x; });
    return it == steps_.end() ? steps_.back().value : it->value;
  }

  bool operator==(const MStepCurve&) const = default;

 private:
  Amount n_total_;
  std::vector<Step> steps_;
};

/// Probability weights over buyer types.
class TypeDistribution {
 public:
  explicit TypeDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("type distribution is empty");
    double total = 0.0;
    for (double w : weights_) {
      if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("type weight must be non-negative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("type weights must sum to 1");
    }
  }

  static TypeDistribution uniform(std::size_t m) {
    return TypeDistribution(std::vector<double>(m, 1.0 / static_cast<double>(m)));
  }
  static TypeDistribution degenerate(std::size_t m, TypeIndex i) {
    std::vector<double> w(m, 0.0);
    w.at(i) = 1.0;
    return TypeDistribution(std::move(w));
  }

  std::size_t size() const { return weights_.size(); }
  double operator[](TypeIndex i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

/// The seller's market: N data points and one valuation curve per buyer type.
class MarketInstance {
 public:
  MarketInstance(Amount n_total, std::vector<ValuationCurve> valuations,
                 std::optional<double> smoothness = std::nullopt,
                 std::optional<double> diminishing = std::nullopt)
      : n_total_(n_total), valuations_(std::move(valuations)), smoothness_(smoothness),
        diminishing_(diminishing) {
    if (n_total_ < 1) throw std::invalid_argument("market needs N >= 1");
    if (valuations_.empty()) throw std::invalid_argument("market needs at least one buyer type");
    for (const auto& v : valuations_) {
      if (v.n_total() != n_total_) throw std::invalid_argument("valuation curve length differs from N+1");
    }
  }

  Amount n_total() const { return n_total_; }
  std::size_t type_count() const { return valuations_.size(); }
  const ValuationCurve& valuation(TypeIndex i) const { return valuations_[i]; }
  std::span<const ValuationCurve> valuations() const { return valuations_; }
  std::optional<double> smoothness() const { return smoothness_; }
  std::optional<double> diminishing() const { return diminishing_; }

  /// Largest value any type places on the full data set.
  double max_full_value() const {
    double best = 0.0;
    for (const auto& v : valuations_) best = std::max(best, v(n_total_));
    return best;
  }

 private:
  Amount n_total_;
  std::vector<ValuationCurve> valuations_;
  std::optional<double> smoothness_;
  std::optional<double> diminishing_;
};

namespace detail {

// Within a step the price is constant and v is non-decreasing, so the step's
// right boundary is its largest utility maximizer. Scanning steps left to
// right with >= keeps the largest maximizer across steps.
template <class BoundaryAt, class ValueAt>
std::size_t demanded_step(const ValuationCurve& v, std::size_t step_count, BoundaryAt boundary_at,
                          ValueAt value_at) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t pick = npos;
  for (std::size_t j = 0; j < step_count; ++j) {
    const double u = v(boundary_at(j)) - value_at(j);
    if (u >= best) {
      best = u;
      pick = j;
    }
  }
  return best >= 0.0 ? pick : npos;
}

inline void require_same_n(const ValuationCurve& v, const MStepCurve& p) {
  if (v.n_total() != p.n_total()) {
    throw std::invalid_argument("valuation and price curves disagree on N");
  }
}

}  // namespace detail

/// Amount bought by a buyer with valuation v facing price p; 0 means no purchase.
inline Amount buyer_demand(const ValuationCurve& v, const MStepCurve& p) {
  detail::require_same_n(v, p);
  const auto steps = p.steps();
  const std::size_t j = detail::demanded_step(
      v, steps.size(), [&](std::size_t k) { return steps[k].boundary; },
      [&](std::size_t k) { return steps[k].value; });
  return j == npos ? 0 : steps[j].boundary;
}

/// Types that would buy a positive amount at p.
inline std::vector<TypeIndex> purchase_set(const MarketInstance& instance, const MStepCurve& p) {
  std::vector<TypeIndex> out;
  for (TypeIndex i = 0; i < instance.type_count(); ++i) {
    if (buyer_demand(instance.valuation(i), p) > 0) out.push_back(i);
  }
  return out;
}

inline double expected_revenue(const MarketInstance& instance, const TypeDistribution& q,
                               const MStepCurve& p) {
  if (q.size() != instance.type_count()) {
    throw std::invalid_argument("type distribution size differs from type count");
  }
  double total = 0.0;
  for (TypeIndex i = 0; i < instance.type_count(); ++i) {
    total += q[i] * p.price(buyer_demand(instance.valuation(i), p));
  }
  return total;
}

struct Purchase {
  Amount amount = 0;
  double payment = 0.0;
  bool operator==(const Purchase&) const = default;
};

/// Row-major table of (demand, payment) for every (price, type) pair.
class DemandMatrix {
 public:
  DemandMatrix() = default;
  DemandMatrix(std::size_t prices, std::size_t types) : prices_(prices), types_(types), cells_(prices * types) {}

  std::size_t price_count() const { return prices_; }
  std::size_t type_count() const { return types_; }
  bool empty() const { return prices_ == 0; }
  const Purchase& at(std::size_t price, TypeIndex type) const { return cells_[price * types_ + type]; }
  Purchase& at(std::size_t price, TypeIndex type) { return cells_[price * types_ + type]; }

 private:
  std::size_t prices_ = 0;
  std::size_t types_ = 0;
  std::vector<Purchase> cells_;
};

inline DemandMatrix demand_matrix(const MarketInstance& instance, std::span<const MStepCurve> prices) {
  DemandMatrix table(prices.size(), instance.type_count());
  for (std::size_t p = 0; p < prices.size(); ++p) {
    for (TypeIndex i = 0; i < instance.type_count(); ++i) {
      const Amount n = buyer_demand(instance.valuation(i), prices[p]);
      table.at(p, i) = {n, prices[p].price(n)};
    }
  }
  return table;
}

}  // namespace datapricing
