#pragma once

// Learners only ever see a curve through its per-type payments and purchase
// set. Curves sharing both form a payoff class; a learner scan over classes
// (and, after dominance filtering, over a small frontier of them) picks the
// same curve a scan over the whole family would.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "datapricing/discretization.hpp"
#include "datapricing/market.hpp"
#include "datapricing/price_space.hpp"
#include "datapricing/random.hpp"

namespace datapricing {

/// A posted curve: a row of the payoff table, or the zero curve.
struct Choice {
  static constexpr std::size_t kZeroCurve = npos;
  std::size_t row = kZeroCurve;
  bool zero() const { return row == kZeroCurve; }
};

/// Per-curve payoffs in a flat row-major layout, one row per candidate.
class PayoffTable {
 public:
  explicit PayoffTable(std::size_t types = 0) : types_(types) {}

  std::size_t type_count() const { return types_; }
  std::size_t size() const { return curve_index_.size(); }
  bool empty() const { return curve_index_.empty(); }

  double pay(std::size_t row, TypeIndex i) const { return pay_[row * types_ + i]; }
  bool buys(std::size_t row, TypeIndex i) const { return buys_[row * types_ + i] != 0; }
  std::span<const double> pays(std::size_t row) const { return {pay_.data() + row * types_, types_}; }
  std::uint64_t curve_index(std::size_t row) const { return curve_index_[row]; }
  const MStepCurve& curve(std::size_t row) const { return curves_[row]; }
  bool has_perturbations() const { return !perturbation_.empty(); }
  double perturbation(std::size_t row) const { return perturbation_[row]; }

  void add_row(std::uint64_t index, MStepCurve curve, std::span<const double> pays, std::span<const std::uint8_t> buys,
               std::optional<double> perturbation = std::nullopt) {
    if (pays.size() != types_ || buys.size() != types_) throw std::invalid_argument("payoff row has wrong width");
    if (!empty() && perturbation.has_value() != has_perturbations()) {
      throw std::invalid_argument("payoff rows must all carry a perturbation or none");
    }
    curve_index_.push_back(index);
    curves_.push_back(std::move(curve));
    pay_.insert(pay_.end(), pays.begin(), pays.end());
    buys_.insert(buys_.end(), buys.begin(), buys.end());
    if (perturbation) perturbation_.push_back(*perturbation);
  }

 private:
  std::size_t types_;
  std::vector<std::uint64_t> curve_index_;
  std::vector<MStepCurve> curves_;
  std::vector<double> pay_;
  std::vector<std::uint8_t> buys_;
  std::vector<double> perturbation_;
};

/// Every curve of a (small) space as its own row, straight from the demand
/// matrix.
inline PayoffTable full_payoff_table(const MarketInstance& instance, const DiscretizedPriceSpace& space) {
  const std::vector<MStepCurve> curves = space.curves().materialize(space.cap());
  const DemandMatrix dm = demand_matrix(instance, curves);
  const std::size_t m = instance.type_count();
  PayoffTable table(m);
  std::vector<double> pays(m);
  std::vector<std::uint8_t> buys(m);
  for (std::size_t p = 0; p < curves.size(); ++p) {
    for (TypeIndex i = 0; i < m; ++i) {
      pays[i] = dm.at(p, i).payment;
      buys[i] = dm.at(p, i).amount > 0 ? 1 : 0;
    }
    table.add_row(p, curves[p], pays, buys);
  }
  return table;
}

/// Curves grouped by what each type buys. A class key holds, per type, the
/// value-grid index of the purchased step plus one, or 0 for no purchase.
class PayoffClasses {
 public:
  std::size_t type_count() const { return types_; }
  std::size_t size() const { return first_.size(); }
  std::uint64_t curve_count() const { return curves_; }

  std::span<const std::uint32_t> key(std::size_t c) const { return {keys_.data() + c * types_, types_}; }
  double pay(std::size_t c, TypeIndex i) const {
    const std::uint32_t k = keys_[c * types_ + i];
    return k == 0 ? 0.0 : (*values_)[k - 1];
  }
  bool buys(std::size_t c, TypeIndex i) const { return keys_[c * types_ + i] != 0; }
  std::uint64_t first_curve(std::size_t c) const { return first_[c]; }
  std::uint64_t member_count(std::size_t c) const { return members_[c]; }

  /// Class of each curve by enumeration index; empty unless requested.
  std::span<const std::uint32_t> curve_classes() const { return curve_class_; }

  static PayoffClasses build(const MarketInstance& instance, const DiscretizedPriceSpace& space,
                             bool keep_curve_classes) {
    if (space.params().n_total != instance.n_total()) throw std::invalid_argument("price space and market disagree on N");
    const std::uint64_t total = space.checked_count();
    PayoffClasses out;
    out.types_ = instance.type_count();
    out.values_ = std::vector<double>(space.value_grid().begin(), space.value_grid().end());
    out.curves_ = total;
    if (keep_curve_classes) {
      if (total > std::numeric_limits<std::uint32_t>::max()) throw std::length_error("too many curves to label");
      out.curve_class_.reserve(static_cast<std::size_t>(total));
    }

    const std::size_t m = out.types_;
    const std::uint64_t radix = out.values_->size() + 1;
    // Keys pack into one integer when (|W|+1)^m fits; small key spaces get a
    // direct lookup table.
    bool packable = true;
    std::uint64_t key_space = 1;
    for (std::size_t i = 0; i < m && packable; ++i) {
      if (key_space > std::numeric_limits<std::uint64_t>::max() / radix) packable = false;
      else key_space *= radix;
    }
    constexpr std::uint64_t kDirectLimit = std::uint64_t{1} << 23;
    constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> direct;
    if (packable && key_space <= kDirectLimit) direct.assign(static_cast<std::size_t>(key_space), kUnseen);
    std::unordered_map<std::uint64_t, std::uint32_t> hashed;
    std::map<std::vector<std::uint32_t>, std::uint32_t> ordered;

    std::vector<std::uint32_t> key(m);
    space.curves().for_each([&](const MStepCursor& c) {
      std::uint64_t code = 0;
      for (std::size_t i = m; i-- > 0;) {
        const std::size_t j = demanded_step(instance.valuation(i), c);
        key[i] = j == npos ? 0 : static_cast<std::uint32_t>(c.value_index(j) + 1);
        code = code * radix + key[i];
      }
      std::uint32_t* slot;
      if (!direct.empty()) {
        slot = &direct[static_cast<std::size_t>(code)];
      } else if (packable) {
        slot = &hashed.try_emplace(code, kUnseen).first->second;
      } else {
        slot = &ordered.try_emplace(key, kUnseen).first->second;
      }
      if (*slot == kUnseen) {
        *slot = static_cast<std::uint32_t>(out.first_.size());
        out.keys_.insert(out.keys_.end(), key.begin(), key.end());
        out.first_.push_back(c.index());
        out.members_.push_back(0);
      }
      ++out.members_[*slot];
      if (keep_curve_classes) out.curve_class_.push_back(*slot);
    });
    return out;
  }

 private:
  std::size_t types_ = 0;
  std::optional<std::vector<double>> values_;
  std::uint64_t curves_ = 0;
  std::vector<std::uint32_t> keys_;
  std::vector<std::uint64_t> first_;
  std::vector<std::uint64_t> members_;
  std::vector<std::uint32_t> curve_class_;
};

/// Classes, visited in the given priority order, that no earlier-visited class
/// weakly dominates on every key component. Keys are monotone in payment, so
/// a dropped class never scores strictly above the one that dropped it under
/// non-negative type weights, and it comes later in the priority order.
inline std::vector<std::size_t> undominated(const PayoffClasses& classes, std::span<const std::size_t> order) {
  const std::size_t m = classes.type_count();
  std::vector<std::size_t> kept;
  if (m == 1) {
    long best = -1;
    for (std::size_t c : order) {
      const long k = classes.key(c)[0];
      if (k > best) {
        kept.push_back(c);
        best = k;
      }
    }
    return kept;
  }
  if (m == 2) {
    // Fenwick tree over reversed first components holding the largest second
    // component seen: a suffix maximum query.
    std::uint32_t width = 0;
    for (std::size_t c : order) width = std::max(width, classes.key(c)[0]);
    const std::size_t n = static_cast<std::size_t>(width) + 1;
    std::vector<long> tree(n + 1, -1);
    auto query = [&](std::size_t pos) {  // max over reversed positions 1..pos
      long r = -1;
      for (; pos > 0; pos -= pos & (~pos + 1)) r = std::max(r, tree[pos]);
      return r;
    };
    auto insert = [&](std::size_t pos, long v) {
      for (; pos <= n; pos += pos & (~pos + 1)) tree[pos] = std::max(tree[pos], v);
    };
    for (std::size_t c : order) {
      const auto k = classes.key(c);
      const std::size_t rev = n - k[0];  // first components >= k[0] map to 1..rev
      if (query(rev) >= static_cast<long>(k[1])) continue;
      kept.push_back(c);
      insert(rev, k[1]);
    }
    return kept;
  }
  for (std::size_t c : order) {
    const auto k = classes.key(c);
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](std::size_t a) {
      const auto ka = classes.key(a);
      for (std::size_t i = 0; i < m; ++i) {
        if (ka[i] < k[i]) return false;
      }
      return true;
    });
    if (!dominated) kept.push_back(c);
  }
  return kept;
}

namespace detail {

inline void append_class_row(PayoffTable& table, const PayoffClasses& classes, const DiscretizedPriceSpace& space,
                             std::size_t c, std::uint64_t curve, std::optional<double> perturbation) {
  const std::size_t m = classes.type_count();
  std::vector<double> pays(m);
  std::vector<std::uint8_t> buys(m);
  for (TypeIndex i = 0; i < m; ++i) {
    pays[i] = classes.pay(c, i);
    buys[i] = classes.buys(c, i) ? 1 : 0;
  }
  table.add_row(curve, space.curves().curve_at(curve), pays, buys, perturbation);
}

}  // namespace detail

/// Candidates for an argmax of sum_i w_i * pay_i with every w_i > 0 (first
/// maximizer by enumeration order). A class paying at least as much to every
/// type, and more to one, then scores strictly higher, so only the Pareto
/// frontier of classes survives, each represented by its first curve. When
/// the value grid contains 0 two keys can pay the same, and the filter falls
/// back to enumeration order.
inline PayoffTable candidate_table(const PayoffClasses& classes, const DiscretizedPriceSpace& space) {
  std::vector<std::size_t> order(classes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});  // class ids follow first-curve order
  const bool keys_strict = !space.value_grid().empty() && space.value_grid().front() > 0.0;
  if (keys_strict) {
    // Any dominator has a larger key sum, so it is visited first.
    const std::size_t m = classes.type_count();
    std::vector<std::uint64_t> sum(classes.size(), 0);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      for (std::size_t i = 0; i < m; ++i) sum[c] += classes.key(c)[i];
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sum[a] > sum[b]; });
  }
  std::vector<std::size_t> kept = undominated(classes, order);
  std::sort(kept.begin(), kept.end());
  PayoffTable table(classes.type_count());
  for (std::size_t c : kept) {
    detail::append_class_row(table, classes, space, c, classes.first_curve(c), std::nullopt);
  }
  return table;
}

/// Candidates for a perturbed argmax. Within a class the payments agree, so
/// only the curve with the largest perturbation (first on ties) can win; across
/// classes, a class is dropped when an earlier one in (perturbation desc,
/// index asc) order pays at least as much to every type.
inline PayoffTable perturbed_candidate_table(const PayoffClasses& classes, const DiscretizedPriceSpace& space,
                                             const CounterStream& stream, double rate) {
  const auto labels = classes.curve_classes();
  if (labels.size() != classes.curve_count()) throw std::logic_error("payoff classes were built without curve labels");
  std::vector<double> best(classes.size(), -1.0);
  std::vector<std::uint64_t> arg(classes.size(), 0);
  for (std::uint64_t k = 0; k < labels.size(); ++k) {
    const double theta = stream.exponential(k, rate);
    const std::uint32_t c = labels[k];
    if (theta > best[c]) {
      best[c] = theta;
      arg[c] = k;
    }
  }
  std::vector<std::size_t> order(classes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (best[a] != best[b]) return best[a] > best[b];
    return arg[a] < arg[b];
  });
  std::vector<std::size_t> kept = undominated(classes, order);
  std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) { return arg[a] < arg[b]; });
  PayoffTable table(classes.type_count());
  for (std::size_t c : kept) {
    detail::append_class_row(table, classes, space, c, arg[c], best[c]);
  }
  return table;
}

/// Every curve of a small space as a row, each with its own perturbation.
inline PayoffTable perturbed_full_table(const MarketInstance& instance, const DiscretizedPriceSpace& space,
                                        const CounterStream& stream, double rate) {
  const PayoffTable base = full_payoff_table(instance, space);
  PayoffTable table(base.type_count());
  std::vector<std::uint8_t> buys(base.type_count());
  for (std::size_t r = 0; r < base.size(); ++r) {
    for (TypeIndex i = 0; i < base.type_count(); ++i) buys[i] = base.buys(r, i) ? 1 : 0;
    table.add_row(base.curve_index(r), base.curve(r), base.pays(r), buys, stream.exponential(base.curve_index(r), rate));
  }
  return table;
}

}  // namespace datapricing
