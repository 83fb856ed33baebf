#pragma once

// Optimistic pricing for i.i.d. buyers. Round 1 posts the zero curve, so every
// type enters the purchase set once; afterwards each type's frequency estimate
// gets a confidence bonus and the curve maximizing optimistic revenue is
// posted.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "datapricing/market.hpp"
#include "datapricing/payoff.hpp"

namespace datapricing {

class UcbLearner {
 public:
  UcbLearner(const PayoffTable& table, std::uint64_t horizon)
      : table_(&table), horizon_(horizon), t_count_(table.type_count(), 0), hits_(table.type_count(), 0) {
    if (table.empty()) throw std::invalid_argument("UCB needs a non-empty candidate set");
    if (horizon < 1) throw std::invalid_argument("UCB needs horizon >= 1");
  }

  /// Round about to be played, starting at 1.
  std::uint64_t round() const { return t_; }
  std::size_t type_count() const { return t_count_.size(); }
  std::uint64_t t_count(TypeIndex i) const { return t_count_[i]; }
  std::uint64_t hit_count(TypeIndex i) const { return hits_[i]; }

  double q_bar(TypeIndex i) const {
    require_counted(i);
    return static_cast<double>(hits_[i]) / static_cast<double>(t_count_[i]);
  }

  /// Unclipped: may exceed 1.
  double q_hat(TypeIndex i) const {
    return q_bar(i) + std::sqrt(std::log(static_cast<double>(horizon_)) / static_cast<double>(t_count_[i]));
  }

  Choice first_round_choice() const { return {}; }

  /// Row maximizing sum_i q_hat_i * pay_i, first on ties. Round 1 has no
  /// estimates yet and must use first_round_choice().
  Choice select() const {
    if (t_ == 1) throw std::logic_error("UCB select called in round 1");
    const std::size_t m = type_count();
    std::vector<double> w(m);
    for (TypeIndex i = 0; i < m; ++i) w[i] = q_hat(i);
    std::size_t best_row = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < table_->size(); ++r) {
      const auto pay = table_->pays(r);
      double s = 0.0;
      for (TypeIndex i = 0; i < m; ++i) s += w[i] * pay[i];
      if (s > best) {
        best = s;
        best_row = r;
      }
    }
    return {best_row};
  }

  /// revealed holds the buyer's type iff a purchase happened.
  void update(Choice chosen, std::optional<TypeIndex> revealed) {
    if (t_ == 1 && !chosen.zero()) throw std::logic_error("round 1 must post the zero curve");
    const std::size_t m = type_count();
    if (revealed && *revealed >= m) throw std::out_of_range("revealed type out of range");
    if (revealed && !in_purchase_set(chosen, *revealed)) {
      throw std::logic_error("type " + std::to_string(*revealed) + " bought but is outside the purchase set");
    }
    for (TypeIndex i = 0; i < m; ++i) {
      if (in_purchase_set(chosen, i)) ++t_count_[i];
    }
    if (revealed) ++hits_[*revealed];
    ++t_;
  }

  bool in_purchase_set(Choice c, TypeIndex i) const { return c.zero() || table_->buys(c.row, i); }

 private:
  void require_counted(TypeIndex i) const {
    if (t_count_[i] == 0) throw std::logic_error("type " + std::to_string(i) + " has not been in a purchase set yet");
  }

  const PayoffTable* table_;
  std::uint64_t horizon_;
  std::uint64_t t_ = 1;
  std::vector<std::uint64_t> t_count_;
  std::vector<std::uint64_t> hits_;
};

}  // namespace datapricing
