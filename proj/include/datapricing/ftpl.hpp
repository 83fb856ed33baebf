#pragma once

// Follow-the-perturbed-leader under one-sided feedback. A purchase reveals the
// buyer's type and every curve is credited with what that type would have paid
// under it. Without a purchase the type is hidden; every curve is credited with
// what all types outside the purchase set would have paid, which is zero for
// the posted curve and an overestimate for the rest.
//
// Every round's reward adds whole per-type payment vectors, so the cumulative
// reward of a curve is sum_i C_i * pay_i with integer counts C_i.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "datapricing/market.hpp"
#include "datapricing/payoff.hpp"

namespace datapricing {

/// sqrt((1 + ln|P|) / (m^2 T)).
inline double default_theta(double space_size, std::size_t m, std::uint64_t horizon) {
  if (!(space_size >= 1.0)) throw std::invalid_argument("default_theta needs a non-empty space");
  if (m < 1 || horizon < 1) throw std::invalid_argument("default_theta needs m >= 1 and T >= 1");
  const double md = static_cast<double>(m);
  return std::sqrt((1.0 + std::log(space_size)) / (md * md * static_cast<double>(horizon)));
}

class FtplLearner {
 public:
  explicit FtplLearner(const PayoffTable& table)
      : table_(&table), counts_(table.type_count(), 0), last_(table.type_count(), 0) {
    if (table.empty()) throw std::invalid_argument("FTPL needs a non-empty candidate set");
    if (!table.has_perturbations()) throw std::invalid_argument("FTPL needs perturbed candidates");
  }

  std::uint64_t round() const { return t_; }
  std::size_t type_count() const { return counts_.size(); }

  /// Times type i's payment vector has been credited so far.
  std::uint64_t credit_count(TypeIndex i) const { return counts_[i]; }
  /// Per-type credits of the most recent round (0 or 1 each).
  const std::vector<std::uint8_t>& last_credits() const { return last_; }

  double cumulative_reward(std::size_t row) const {
    const auto pay = table_->pays(row);
    double s = 0.0;
    for (TypeIndex i = 0; i < counts_.size(); ++i) s += static_cast<double>(counts_[i]) * pay[i];
    return s;
  }

  /// Reward the most recent round gave to a row.
  double last_reward(std::size_t row) const { return credited(last_, table_->pays(row)); }

  /// Same, for any payment vector (curves outside the candidate set).
  double last_reward(std::span<const double> pays) const { return credited(last_, pays); }

  double score(std::size_t row) const { return cumulative_reward(row) + table_->perturbation(row); }

  /// Row maximizing cumulative reward plus perturbation, first on ties.
  Choice select() const {
    std::size_t best_row = 0;
    double best = score(0);
    for (std::size_t r = 1; r < table_->size(); ++r) {
      const double s = score(r);
      if (s > best) {
        best = s;
        best_row = r;
      }
    }
    return {best_row};
  }

  void update(Choice chosen, std::optional<TypeIndex> revealed) {
    if (chosen.zero()) throw std::invalid_argument("FTPL only posts candidate curves");
    const std::size_t m = type_count();
    if (revealed) {
      if (*revealed >= m) throw std::out_of_range("revealed type out of range");
      if (!table_->buys(chosen.row, *revealed)) {
        throw std::logic_error("type " + std::to_string(*revealed) + " bought but is outside the purchase set");
      }
      for (TypeIndex i = 0; i < m; ++i) last_[i] = i == *revealed ? 1 : 0;
    } else {
      bool anyone_outside = false;
      for (TypeIndex i = 0; i < m; ++i) anyone_outside = anyone_outside || !table_->buys(chosen.row, i);
      // Every type would have bought, yet nobody did.
      if (!anyone_outside) throw std::logic_error("no purchase although every type is in the purchase set");
      for (TypeIndex i = 0; i < m; ++i) last_[i] = table_->buys(chosen.row, i) ? 0 : 1;
    }
    for (TypeIndex i = 0; i < m; ++i) counts_[i] += last_[i];
    ++t_;
  }

 private:
  static double credited(const std::vector<std::uint8_t>& credits, std::span<const double> pays) {
    double s = 0.0;
    for (TypeIndex i = 0; i < credits.size(); ++i) {
      if (credits[i]) s += pays[i];
    }
    return s;
  }

  const PayoffTable* table_;
  std::uint64_t t_ = 1;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint8_t> last_;
};

}  // namespace datapricing
