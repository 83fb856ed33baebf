#pragma once

// Step-curve algebra: reduction of an arbitrary non-decreasing price curve
// to a revenue-dominating curve with at most one step per buyer type, and
// lazy enumeration of every step curve over a (data grid x value grid).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "datapricing/market.hpp"

namespace datapricing {

/// A general price curve given pointwise on 0..N.
class DenseCurve {
 public:
  explicit DenseCurve(std::vector<double> prices) : prices_(std::move(prices)) {
    if (prices_.size() < 2) throw std::invalid_argument("dense curve needs amounts 0 and 1");
    if (prices_[0] != 0.0) throw std::invalid_argument("dense curve must have p(0) = 0");
    for (double x : prices_) {
      if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("dense curve prices must be non-negative");
    }
  }

  Amount n_total() const { return static_cast<Amount>(prices_.size()) - 1; }
  double price(Amount n) const { return prices_[static_cast<std::size_t>(n)]; }
  std::span<const double> prices() const { return prices_; }

  bool non_decreasing() const { return std::is_sorted(prices_.begin(), prices_.end()); }

  /// Pointwise expansion of a step curve.
  static DenseCurve from_steps(const MStepCurve& p) {
    std::vector<double> out(static_cast<std::size_t>(p.n_total()) + 1);
    for (Amount n = 0; n <= p.n_total(); ++n) out[static_cast<std::size_t>(n)] = p.price(n);
    return DenseCurve(std::move(out));
  }

 private:
  std::vector<double> prices_;
};

/// Demand against an arbitrary curve by scanning every amount.
inline Amount buyer_demand(const ValuationCurve& v, const DenseCurve& p) {
  if (v.n_total() != p.n_total()) throw std::invalid_argument("valuation and price curves disagree on N");
  double best = -std::numeric_limits<double>::infinity();
  Amount pick = 0;
  for (Amount n = 1; n <= v.n_total(); ++n) {
    const double u = v(n) - p.price(n);
    if (u >= best) {
      best = u;
      pick = n;
    }
  }
  return best >= 0.0 ? pick : 0;
}

inline double expected_revenue(const MarketInstance& instance, const TypeDistribution& q, const DenseCurve& p) {
  if (q.size() != instance.type_count()) {
    throw std::invalid_argument("type distribution size differs from type count");
  }
  double total = 0.0;
  for (TypeIndex i = 0; i < instance.type_count(); ++i) {
    total += q[i] * p.price(buyer_demand(instance.valuation(i), p));
  }
  return total;
}

/// Step curve that agrees with p at every type's demand point and is flat
/// from the largest demand point to N. Every type then buys either its old
/// demand point or N, so revenue never drops under any type distribution.
inline MStepCurve m_step_reduce(const DenseCurve& p, const MarketInstance& instance) {
  if (p.n_total() != instance.n_total()) throw std::invalid_argument("price curve and market disagree on N");
  if (!p.non_decreasing()) throw std::invalid_argument("m-step reduction requires a non-decreasing price curve");

  const Amount n_total = instance.n_total();
  std::vector<Amount> points;
  for (const auto& v : instance.valuations()) {
    const Amount n = buyer_demand(v, p);
    if (n > 0) points.push_back(n);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  if (points.empty()) return MStepCurve::flat(n_total, p.price(n_total));

  std::vector<Step> steps;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Amount boundary = k + 1 == points.size() ? n_total : points[k];
    const double value = p.price(points[k]);
    if (!steps.empty() && steps.back().value == value) {
      steps.back().boundary = boundary;  // equal levels are one step
    } else {
      steps.push_back({boundary, value});
    }
  }
  return MStepCurve(n_total, std::move(steps));
}

/// Curve count with overflow reported instead of wrapped.
struct SpaceCount {
  std::uint64_t value = 0;
  bool saturated = false;

  bool exceeds(std::uint64_t cap) const { return saturated || value > cap; }
  std::string str() const { return saturated ? std::string(">=18446744073709551615") : std::to_string(value); }
};

inline SpaceCount binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return {0, false};
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return {std::numeric_limits<std::uint64_t>::max(), true};
  }
  return {static_cast<std::uint64_t>(r), false};
}

inline SpaceCount saturating_mul(SpaceCount a, SpaceCount b) {
  if ((a.value == 0 && !a.saturated) || (b.value == 0 && !b.saturated)) return {0, false};
  if (a.saturated || b.saturated) return {std::numeric_limits<std::uint64_t>::max(), true};
  const unsigned __int128 r = static_cast<unsigned __int128>(a.value) * b.value;
  if (r > std::numeric_limits<std::uint64_t>::max()) return {std::numeric_limits<std::uint64_t>::max(), true};
  return {static_cast<std::uint64_t>(r), false};
}

inline SpaceCount saturating_add(SpaceCount a, SpaceCount b) {
  if (a.saturated || b.saturated) return {std::numeric_limits<std::uint64_t>::max(), true};
  const std::uint64_t r = a.value + b.value;
  if (r < a.value) return {std::numeric_limits<std::uint64_t>::max(), true};
  return {r, false};
}

/// Number of curves with 1..m steps: k-1 jumps chosen among `interior`
/// amounts (the last boundary is always N) and k strictly increasing levels
/// among `values`.
inline SpaceCount count_m_steps(std::size_t interior, std::size_t values, std::size_t m) {
  SpaceCount total;
  for (std::size_t k = 1; k <= m; ++k) {
    total = saturating_add(total, saturating_mul(binomial(interior, k - 1), binomial(values, k)));
  }
  return total;
}

namespace detail {

// Advances a sorted k-subset of {0..n-1} to its lexicographic successor.
inline bool next_combination(std::vector<std::size_t>& sel, std::size_t n) {
  const std::size_t k = sel.size();
  for (std::size_t pos = k; pos-- > 0;) {
    if (sel[pos] < n - (k - pos)) {
      ++sel[pos];
      for (std::size_t q = pos + 1; q < k; ++q) sel[q] = sel[q - 1] + 1;
      return true;
    }
  }
  return false;
}

inline void first_combination(std::vector<std::size_t>& sel, std::size_t k) {
  sel.resize(k);
  for (std::size_t i = 0; i < k; ++i) sel[i] = i;
}

// Lexicographic unranking of a k-subset of {0..n-1}.
inline void unrank_combination(std::uint64_t rank, std::size_t n, std::size_t k, std::vector<std::size_t>& sel) {
  sel.resize(k);
  std::size_t c = 0;
  for (std::size_t pos = 0; pos < k; ++pos) {
    for (;; ++c) {
      const std::uint64_t block = binomial(n - c - 1, k - pos - 1).value;
      if (rank < block) break;
      rank -= block;
    }
    sel[pos] = c++;
  }
}

}  // namespace detail

class MStepSpace;

/// Position in the lexicographic stream of an MStepSpace: number of steps
/// first, then jump locations, then levels.
class MStepCursor {
 public:
  bool done() const { return done_; }
  std::uint64_t index() const { return index_; }
  std::size_t step_count() const { return values_.size(); }
  inline Amount boundary(std::size_t j) const;
  inline double value(std::size_t j) const;
  std::size_t value_index(std::size_t j) const { return values_[j]; }
  std::size_t boundary_index(std::size_t j) const { return j < jumps_.size() ? jumps_[j] : npos; }
  inline MStepCurve to_curve() const;
  inline bool advance();

 private:
  friend class MStepSpace;
  const MStepSpace* space_ = nullptr;
  std::size_t steps_ = 0;
  std::vector<std::size_t> jumps_;   // indices into the interior grid
  std::vector<std::size_t> values_;  // indices into the value grid
  std::uint64_t index_ = 0;
  bool done_ = true;
};

class MStepSpace {
 public:
  MStepSpace(Amount n_total, std::vector<Amount> data_grid, std::vector<double> value_grid, std::size_t m)
      : n_total_(n_total), data_grid_(std::move(data_grid)), values_(std::move(value_grid)), m_(m) {
    if (n_total_ < 1) throw std::invalid_argument("price space needs N >= 1");
    if (m_ < 1) throw std::invalid_argument("price space needs m >= 1");
    if (data_grid_.empty()) throw std::invalid_argument("data grid is empty");
    if (values_.empty()) throw std::invalid_argument("value grid is empty");
    for (std::size_t i = 0; i < data_grid_.size(); ++i) {
      if (data_grid_[i] < 1 || data_grid_[i] > n_total_) throw std::invalid_argument("data grid entry outside 1..N");
      if (i > 0 && data_grid_[i] <= data_grid_[i - 1]) throw std::invalid_argument("data grid must be sorted and unique");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]) || values_[i] < 0.0) throw std::invalid_argument("value grid entries must be >= 0");
      if (i > 0 && values_[i] <= values_[i - 1]) throw std::invalid_argument("value grid must be sorted and unique");
    }
    interior_.assign(data_grid_.begin(), data_grid_.end());
    if (interior_.back() == n_total_) interior_.pop_back();
  }

  Amount n_total() const { return n_total_; }
  std::size_t max_steps() const { return m_; }
  std::span<const Amount> data_grid() const { return data_grid_; }
  std::span<const Amount> interior() const { return interior_; }
  std::span<const double> value_grid() const { return values_; }

  SpaceCount count() const { return count_m_steps(interior_.size(), values_.size(), m_); }

  MStepCursor begin_at(std::uint64_t index = 0) const {
    MStepCursor c;
    c.space_ = this;
    std::uint64_t rank = index;
    for (std::size_t k = 1; k <= m_; ++k) {
      const SpaceCount jumps = binomial(interior_.size(), k - 1);
      const SpaceCount levels = binomial(values_.size(), k);
      const SpaceCount block = saturating_mul(jumps, levels);
      if (block.value == 0 && !block.saturated) continue;
      if (block.saturated || rank < block.value) {
        c.steps_ = k;
        detail::unrank_combination(rank / levels.value, interior_.size(), k - 1, c.jumps_);
        detail::unrank_combination(rank % levels.value, values_.size(), k, c.values_);
        c.index_ = index;
        c.done_ = false;
        return c;
      }
      rank -= block.value;
    }
    c.index_ = index;
    c.done_ = true;
    return c;
  }

  MStepCurve curve_at(std::uint64_t index) const {
    const MStepCursor c = begin_at(index);
    if (c.done()) throw std::out_of_range("curve index " + std::to_string(index) + " past end of space");
    return c.to_curve();
  }

  /// Calls fn(cursor) for every curve with index in [first, last).
  template <class Fn>
  void for_each(Fn&& fn, std::uint64_t first = 0,
                std::uint64_t last = std::numeric_limits<std::uint64_t>::max()) const {
    for (MStepCursor c = begin_at(first); !c.done() && c.index() < last; c.advance()) fn(c);
  }

  /// Every curve as a value; refuses spaces above `cap`.
  std::vector<MStepCurve> materialize(std::uint64_t cap) const {
    const SpaceCount n = count();
    if (n.exceeds(cap)) throw std::length_error("price space has " + n.str() + " curves, above cap");
    std::vector<MStepCurve> out;
    out.reserve(n.value);
    for_each([&](const MStepCursor& c) { out.push_back(c.to_curve()); });
    return out;
  }

 private:
  friend class MStepCursor;
  Amount n_total_;
  std::vector<Amount> data_grid_;
  std::vector<Amount> interior_;
  std::vector<double> values_;
  std::size_t m_;
};

inline Amount MStepCursor::boundary(std::size_t j) const {
  return j < jumps_.size() ? space_->interior_[jumps_[j]] : space_->n_total_;
}

inline double MStepCursor::value(std::size_t j) const { return space_->values_[values_[j]]; }

inline MStepCurve MStepCursor::to_curve() const {
  std::vector<Step> steps(values_.size());
  for (std::size_t j = 0; j < steps.size(); ++j) steps[j] = {boundary(j), value(j)};
  return MStepCurve(space_->n_total_, std::move(steps));
}

inline bool MStepCursor::advance() {
  if (done_) return false;
  ++index_;
  const std::size_t n_interior = space_->interior_.size();
  const std::size_t n_values = space_->values_.size();
  if (detail::next_combination(values_, n_values)) return true;
  if (detail::next_combination(jumps_, n_interior)) {
    detail::first_combination(values_, steps_);
    return true;
  }
  for (std::size_t k = steps_ + 1; k <= space_->m_; ++k) {
    if (k - 1 <= n_interior && k <= n_values) {
      steps_ = k;
      detail::first_combination(jumps_, k - 1);
      detail::first_combination(values_, k);
      return true;
    }
  }
  done_ = true;
  return false;
}

/// Purchased step of a type under the cursor's curve, or npos.
inline std::size_t demanded_step(const ValuationCurve& v, const MStepCursor& c) {
  return detail::demanded_step(
      v, c.step_count(), [&](std::size_t j) { return c.boundary(j); }, [&](std::size_t j) { return c.value(j); });
}

}  // namespace datapricing
