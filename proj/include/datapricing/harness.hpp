#pragma once

// Simulated markets: buyer arrivals, learner driving, and regret accounting.
// The environment owns the buyer's true type; learners see it only when the
// buyer purchases.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "datapricing/config.hpp"
#include "datapricing/discretization.hpp"
#include "datapricing/ftpl.hpp"
#include "datapricing/market.hpp"
#include "datapricing/offline_opt.hpp"
#include "datapricing/payoff.hpp"
#include "datapricing/random.hpp"
#include "datapricing/ucb.hpp"

namespace datapricing {

struct RoundRecord {
  std::uint64_t t = 0;
  std::int64_t curve_idx = -1;  // -1: the zero curve
  TypeIndex buyer_type = 0;
  Amount amount = 0;
  double payment = 0.0;
  std::optional<TypeIndex> feedback;
  double cum_revenue = 0.0;
  double cum_regret = 0.0;
  bool operator==(const RoundRecord&) const = default;
};

struct Checkpoint {
  std::uint64_t t = 0;
  double cum_revenue = 0.0;
  double cum_regret = 0.0;
  std::optional<double> pseudo_regret;  // stochastic: sum of OPT - rev(p_t)
};

struct RunSummary {
  SettingKind setting = SettingKind::stochastic;
  std::uint64_t seed = 0;
  std::uint64_t horizon = 0;
  Scheme scheme = Scheme::monotone;
  double epsilon = 0.0;
  std::size_t value_grid_size = 0;
  std::size_t data_grid_size = 0;
  std::uint64_t space_size = 0;
  double space_bound = 0.0;
  std::size_t candidate_count = 0;
  double benchmark = 0.0;  // stochastic: best expected revenue over the space; adversarial: hindsight best
  double total_revenue = 0.0;
  double final_regret = 0.0;
  std::vector<Checkpoint> checkpoints;
  // stochastic
  std::optional<double> final_pseudo_regret;
  std::optional<double> opt_oracle;
  std::optional<double> discretization_gap;
  std::uint64_t confidence_pairs = 0;
  std::uint64_t confidence_violations = 0;
  // adversarial
  std::optional<double> theta;
  std::uint64_t feedback_mismatches = 0;
  std::uint64_t upper_bound_violations = 0;
  std::uint64_t btl_checks = 0;
  std::uint64_t btl_violations = 0;
};

struct RunResult {
  std::vector<RoundRecord> trace;
  RunSummary summary;
};

/// T/4, T/2, T and every power of two up to T.
inline std::vector<std::uint64_t> checkpoint_rounds(std::uint64_t horizon) {
  std::vector<std::uint64_t> out;
  if (horizon == 0) return out;
  for (std::uint64_t p = 1; p <= horizon; p *= 2) out.push_back(p);
  for (std::uint64_t t : {horizon / 4, horizon / 2, horizon}) {
    if (t >= 1) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Buyer types for every round, fixed before any learner exists.
inline std::vector<TypeIndex> adversary_sequence(const AdversarySpec& spec, std::uint64_t horizon, std::size_t m,
                                                 std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("adversary needs at least one type");
  auto check = [&](TypeIndex i) {
    if (i >= m) throw std::invalid_argument("adversary type " + std::to_string(i) + " out of range");
    return i;
  };
  std::vector<TypeIndex> seq(static_cast<std::size_t>(horizon));
  switch (spec.kind) {
    case AdversarySpec::Kind::constant:
      std::fill(seq.begin(), seq.end(), check(spec.type));
      break;
    case AdversarySpec::Kind::periodic:
      if (spec.pattern.empty()) throw std::invalid_argument("periodic adversary needs a pattern");
      for (std::size_t t = 0; t < seq.size(); ++t) seq[t] = check(spec.pattern[t % spec.pattern.size()]);
      break;
    case AdversarySpec::Kind::block: {
      if (spec.blocks < 1) throw std::invalid_argument("block adversary needs at least one block");
      for (std::size_t t = 0; t < seq.size(); ++t) {
        const std::uint64_t b = static_cast<std::uint64_t>(t) * spec.blocks / horizon;
        seq[t] = spec.order.empty() ? static_cast<TypeIndex>(b % m) : check(spec.order[b % spec.order.size()]);
      }
      break;
    }
    case AdversarySpec::Kind::random: {
      // Piecewise-stationary: each segment draws its own type weights.
      if (spec.blocks < 1) throw std::invalid_argument("random adversary needs at least one segment");
      Rng rng(seed);
      std::vector<double> w(m);
      std::uint64_t segment = spec.blocks;  // sentinel: forces a draw at t = 0
      for (std::size_t t = 0; t < seq.size(); ++t) {
        const std::uint64_t s = static_cast<std::uint64_t>(t) * spec.blocks / horizon;
        if (s != segment) {
          segment = s;
          double total = 0.0;
          for (double& x : w) total += (x = rng.uniform_open_closed());
          for (double& x : w) x /= total;
        }
        seq[t] = rng.categorical(w);
      }
      break;
    }
  }
  return seq;
}

/// Market, price space and payoff classes for one horizon; shared by every
/// seed run at that horizon.
struct PreparedSpace {
  MarketInstance instance;
  GridParams params;
  DiscretizedPriceSpace space;
  PayoffClasses classes;
  std::uint64_t horizon;
};

inline PreparedSpace prepare_space(const ExperimentConfig& config, std::uint64_t horizon) {
  MarketInstance instance = make_instance(config.instance);
  const double eps = effective_epsilon(config.discretization, horizon);
  GridParams params = grid_params_for(instance, eps);
  SpaceOptions opts;
  opts.curve_cap = config.discretization.curve_cap;
  if (config.discretization.prune) opts.prune_above = instance.max_full_value();
  DiscretizedPriceSpace space = build_space(params, config.discretization.scheme, opts);
  PayoffClasses classes =
      PayoffClasses::build(instance, space, /*keep_curve_classes=*/config.setting == SettingKind::adversarial);
  return {std::move(instance), params, std::move(space), std::move(classes), horizon};
}

namespace detail {

inline RunSummary base_summary(const PreparedSpace& ps, SettingKind setting, std::uint64_t seed) {
  RunSummary s;
  s.setting = setting;
  s.seed = seed;
  s.horizon = ps.horizon;
  s.scheme = ps.space.scheme();
  s.epsilon = ps.params.epsilon;
  s.value_grid_size = ps.space.value_grid().size();
  s.data_grid_size = ps.space.data_grid().size();
  s.space_size = ps.space.count().value;
  s.space_bound = ps.space.size_bound();
  return s;
}

struct Posted {
  Amount amount;
  double payment;
};

inline Posted buyer_response(const ValuationCurve& v, const MStepCurve& curve) {
  const Amount n = buyer_demand(v, curve);
  return {n, curve.price(n)};
}

}  // namespace detail

/// UCB against i.i.d. buyers drawn from the configured distribution.
inline RunResult run_stochastic(const PreparedSpace& ps, const ExperimentConfig& config, std::uint64_t seed) {
  const MarketInstance& inst = ps.instance;
  const std::size_t m = inst.type_count();
  const TypeDistribution q = type_distribution(config);
  const std::uint64_t T = ps.horizon;

  const PayoffTable table = candidate_table(ps.classes, ps.space);
  RunResult out;
  RunSummary& s = out.summary = detail::base_summary(ps, SettingKind::stochastic, seed);
  s.candidate_count = table.size();

  // Best expected revenue over the space, summed in type order like expected_revenue.
  double opt = 0.0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    double rev = 0.0;
    for (TypeIndex i = 0; i < m; ++i) rev += q[i] * table.pay(r, i);
    opt = std::max(opt, rev);
  }
  s.benchmark = opt;
  if (inst.n_total() <= kOracleMaxAmount && m <= kOracleMaxTypes) {
    const OfflineResult oracle = brute_force_opt(inst, q, config.run.oracle_resolution);
    s.opt_oracle = oracle.revenue;
    s.discretization_gap = oracle.revenue - opt;
  }
  if (T == 0) return out;

  Rng env(derive_seed(seed, "environment"));
  UcbLearner ucb(table, T);
  const MStepCurve zero = MStepCurve::zero(inst.n_total());
  const auto checkpoints = checkpoint_rounds(T);
  auto next_checkpoint = checkpoints.begin();
  const double log_t = std::log(static_cast<double>(T));
  double cum_revenue = 0.0;
  double pseudo = 0.0;
  out.trace.reserve(static_cast<std::size_t>(T));

  for (std::uint64_t t = 1; t <= T; ++t) {
    Choice choice;
    if (t == 1) {
      choice = ucb.first_round_choice();
    } else {
      for (TypeIndex i = 0; i < m; ++i) {
        ++s.confidence_pairs;
        const double radius = std::sqrt(log_t / static_cast<double>(ucb.t_count(i)));
        if (std::abs(ucb.q_bar(i) - q[i]) > radius) ++s.confidence_violations;
      }
      choice = ucb.select();
    }
    const MStepCurve& curve = choice.zero() ? zero : table.curve(choice.row);
    const TypeIndex buyer = env.categorical(q.weights());
    const auto [amount, payment] = detail::buyer_response(inst.valuation(buyer), curve);
    const std::optional<TypeIndex> feedback = amount > 0 ? std::optional<TypeIndex>(buyer) : std::nullopt;
    ucb.update(choice, feedback);

    double expected = 0.0;
    if (!choice.zero()) {
      for (TypeIndex i = 0; i < m; ++i) expected += q[i] * table.pay(choice.row, i);
    }
    pseudo += opt - expected;
    cum_revenue += payment;
    const double regret = static_cast<double>(t) * opt - cum_revenue;
    out.trace.push_back({t, choice.zero() ? -1 : static_cast<std::int64_t>(table.curve_index(choice.row)), buyer,
                         amount, payment, feedback, cum_revenue, regret});
    if (next_checkpoint != checkpoints.end() && *next_checkpoint == t) {
      s.checkpoints.push_back({t, cum_revenue, regret, pseudo});
      ++next_checkpoint;
    }
  }
  s.total_revenue = cum_revenue;
  s.final_regret = out.trace.back().cum_regret;
  s.final_pseudo_regret = pseudo;
  return out;
}

inline constexpr std::size_t kComparatorCount = 100;

/// FTPL against a type sequence fixed up front. Besides the trace, checks on
/// every round that the posted curve's reward equals the realized payment,
/// that rewards never undercut what the true buyer would have paid, and the
/// be-the-leader inequality against random comparator curves.
inline RunResult run_adversarial(const PreparedSpace& ps, const ExperimentConfig& config, std::uint64_t seed) {
  const MarketInstance& inst = ps.instance;
  const std::size_t m = inst.type_count();
  const std::uint64_t T = ps.horizon;

  // The sequence exists before the learner does.
  const std::vector<TypeIndex> sequence = adversary_sequence(config.adversary, T, m, derive_seed(seed, "adversary"));

  RunResult out;
  RunSummary& s = out.summary = detail::base_summary(ps, SettingKind::adversarial, seed);
  const double theta = config.run.theta.value_or(default_theta(static_cast<double>(s.space_size), m, std::max<std::uint64_t>(T, 1)));
  s.theta = theta;
  const CounterStream perturbations(derive_seed(seed + config.run.learner_seed_offset, "perturbation"));
  const PayoffTable table = perturbed_candidate_table(ps.classes, ps.space, perturbations, theta);
  s.candidate_count = table.size();
  if (T == 0) return out;

  struct Comparator {
    std::vector<double> pays;
    double perturbation;
    double reward = 0.0;
  };
  std::vector<Comparator> comparators;
  {
    Rng pick(derive_seed(seed, "comparators"));
    for (std::size_t k = 0; k < kComparatorCount; ++k) {
      const std::uint64_t idx = pick.below(s.space_size);
      const MStepCurve c = ps.space.curves().curve_at(idx);
      Comparator cmp{std::vector<double>(m), perturbations.exponential(idx, theta)};
      for (TypeIndex i = 0; i < m; ++i) cmp.pays[i] = detail::buyer_response(inst.valuation(i), c).payment;
      comparators.push_back(std::move(cmp));
    }
  }

  FtplLearner ftpl(table);
  std::vector<std::uint64_t> seen(m, 0);
  const auto checkpoints = checkpoint_rounds(T);
  auto next_checkpoint = checkpoints.begin();
  double cum_revenue = 0.0;
  Choice choice = ftpl.select();
  const double leader_perturbation = table.perturbation(choice.row);
  double leader_reward = 0.0;  // sum over rounds of r_t(p_{t+1})
  out.trace.reserve(static_cast<std::size_t>(T));

  for (std::uint64_t t = 1; t <= T; ++t) {
    const MStepCurve& curve = table.curve(choice.row);
    const TypeIndex buyer = sequence[static_cast<std::size_t>(t - 1)];
    const auto [amount, payment] = detail::buyer_response(inst.valuation(buyer), curve);
    const std::optional<TypeIndex> feedback = amount > 0 ? std::optional<TypeIndex>(buyer) : std::nullopt;
    ftpl.update(choice, feedback);

    if (ftpl.last_reward(choice.row) != payment) ++s.feedback_mismatches;
    if (ftpl.last_reward(choice.row) < table.pay(choice.row, buyer)) ++s.upper_bound_violations;

    ++seen[buyer];
    double hindsight = 0.0;
    for (std::size_t r = 0; r < table.size(); ++r) {
      double v = 0.0;
      for (TypeIndex i = 0; i < m; ++i) v += static_cast<double>(seen[i]) * table.pay(r, i);
      hindsight = std::max(hindsight, v);
    }

    const Choice next = ftpl.select();
    leader_reward += ftpl.last_reward(next.row);
    for (auto& cmp : comparators) {
      const double r = ftpl.last_reward(cmp.pays);
      if (r < cmp.pays[buyer]) ++s.upper_bound_violations;
      cmp.reward += r;
      const double lhs = leader_reward + leader_perturbation;
      const double rhs = cmp.reward + cmp.perturbation;
      ++s.btl_checks;
      // Both sides are sums of the same payments in different orders.
      if (lhs < rhs - 1e-9 * std::max(1.0, std::abs(rhs))) ++s.btl_violations;
    }

    cum_revenue += payment;
    const double regret = hindsight - cum_revenue;
    out.trace.push_back({t, static_cast<std::int64_t>(table.curve_index(choice.row)), buyer, amount, payment, feedback,
                         cum_revenue, regret});
    if (next_checkpoint != checkpoints.end() && *next_checkpoint == t) {
      s.checkpoints.push_back({t, cum_revenue, regret, std::nullopt});
      ++next_checkpoint;
    }
    s.benchmark = hindsight;
    choice = next;
  }
  s.total_revenue = cum_revenue;
  s.final_regret = out.trace.back().cum_regret;
  return out;
}

inline RunResult run_experiment(const PreparedSpace& ps, const ExperimentConfig& config, std::uint64_t seed) {
  return config.setting == SettingKind::stochastic ? run_stochastic(ps, config, seed)
                                                   : run_adversarial(ps, config, seed);
}

struct SweepRow {
  std::uint64_t horizon = 0;
  std::uint64_t seed = 0;
  RunSummary summary;
};

/// Every (horizon, seed) pair; seeds of one horizon share the prepared space
/// and run on up to `jobs` threads. Rows come back in (horizon, seed) order
/// whatever the thread count.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& config, std::size_t jobs = 1) {
  const auto horizons = config.sweep.horizons.empty() ? std::vector<std::uint64_t>{config.run.horizon}
                                                      : config.sweep.horizons;
  const auto seeds = config.sweep.seeds.empty() ? config.run.seeds : config.sweep.seeds;
  jobs = std::max<std::size_t>(jobs, 1);
  std::vector<SweepRow> rows;
  for (std::uint64_t h : horizons) {
    const PreparedSpace ps = prepare_space(config, h);
    for (std::size_t start = 0; start < seeds.size(); start += jobs) {
      std::vector<std::future<RunSummary>> batch;
      for (std::size_t k = start; k < std::min(seeds.size(), start + jobs); ++k) {
        batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                   [&, seed = seeds[k]] { return run_experiment(ps, config, seed).summary; }));
      }
      for (std::size_t k = 0; k < batch.size(); ++k) rows.push_back({h, seeds[start + k], batch[k].get()});
    }
  }
  return rows;
}

}  // namespace datapricing
