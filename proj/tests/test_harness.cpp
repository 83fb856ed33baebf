#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "datapricing/harness.hpp"
#include "datapricing/output.hpp"
#include "support.hpp"

namespace dp = datapricing;
namespace fs = std::filesystem;

namespace {

const char* kStochastic = R"(
schema_version: 1
instance:
  n_total: 10
  types:
    - {kind: linear, scale: 0.9}
    - {kind: power_law, alpha: 0.7, beta: 0.6, gamma: 0.5}
setting: {kind: stochastic, q: [0.4, 0.6]}
discretization: {scheme: monotone, epsilon: 0.2}
run: {horizon: 400, seeds: [3]}
)";

const char* kAdversarial = R"(
schema_version: 1
instance:
  n_total: 10
  types:
    - {kind: linear, scale: 0.9}
    - {kind: power_law, alpha: 0.7, beta: 0.6, gamma: 0.5}
setting: {kind: adversarial, sequence: {kind: block, blocks: 2}}
discretization: {scheme: monotone, epsilon: 0.2}
run: {horizon: 400, seeds: [3]}
)";

dp::ExperimentConfig with_horizon(const char* text, std::uint64_t horizon) {
  auto c = dp::load_config_string(text);
  c.run.horizon = horizon;
  return c;
}

dp::RunResult run(const dp::ExperimentConfig& c, std::uint64_t seed) {
  return dp::run_experiment(dp::prepare_space(c, c.run.horizon), c, seed);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every curve's payment for each type, straight from enumeration.
std::vector<std::vector<double>> payments(const dp::PreparedSpace& ps) {
  std::vector<std::vector<double>> out;
  for (const auto& curve : ps.space.curves().materialize(ps.space.cap())) {
    const auto dense = testsupport::expand(curve);
    std::vector<double> row;
    for (std::size_t i = 0; i < ps.instance.type_count(); ++i) {
      row.push_back(dense[static_cast<std::size_t>(testsupport::demand_by_enumeration(ps.instance.valuation(i), dense))]);
    }
    out.push_back(row);
  }
  return out;
}

void expect_consistent_trace(const dp::PreparedSpace& ps, const dp::RunResult& r) {
  double cum = 0.0;
  for (const auto& rec : r.trace) {
    const dp::MStepCurve curve = rec.curve_idx < 0 ? dp::MStepCurve::zero(ps.instance.n_total())
                                                   : ps.space.curves().curve_at(static_cast<std::uint64_t>(rec.curve_idx));
    EXPECT_EQ(rec.amount, dp::buyer_demand(ps.instance.valuation(rec.buyer_type), curve));
    EXPECT_EQ(rec.payment, curve.price(rec.amount));
    EXPECT_EQ(rec.feedback.has_value(), rec.amount > 0);
    if (rec.feedback) EXPECT_EQ(*rec.feedback, rec.buyer_type);
    cum += rec.payment;
    EXPECT_EQ(rec.cum_revenue, cum);
  }
}

}  // namespace

TEST(Checkpoints, PowersAndQuarters) {
  EXPECT_EQ(dp::checkpoint_rounds(16), (std::vector<std::uint64_t>{1, 2, 4, 8, 16}));
  EXPECT_EQ(dp::checkpoint_rounds(10), (std::vector<std::uint64_t>{1, 2, 4, 5, 8, 10}));
  EXPECT_TRUE(dp::checkpoint_rounds(0).empty());
}

TEST(AdversarySequence, Kinds) {
  dp::AdversarySpec s;
  s.kind = dp::AdversarySpec::Kind::constant;
  s.type = 2;
  EXPECT_EQ(dp::adversary_sequence(s, 5, 3, 0), (std::vector<dp::TypeIndex>(5, 2)));

  s = {};
  s.kind = dp::AdversarySpec::Kind::block;
  s.blocks = 2;
  EXPECT_EQ(dp::adversary_sequence(s, 6, 2, 0), (std::vector<dp::TypeIndex>{0, 0, 0, 1, 1, 1}));
  s.order = {1, 0, 1};
  s.blocks = 3;
  EXPECT_EQ(dp::adversary_sequence(s, 6, 2, 0), (std::vector<dp::TypeIndex>{1, 1, 0, 0, 1, 1}));

  s = {};
  s.kind = dp::AdversarySpec::Kind::periodic;
  s.pattern = {0, 1, 1};
  EXPECT_EQ(dp::adversary_sequence(s, 7, 2, 0), (std::vector<dp::TypeIndex>{0, 1, 1, 0, 1, 1, 0}));

  s = {};
  s.kind = dp::AdversarySpec::Kind::random;
  s.blocks = 3;
  const auto a = dp::adversary_sequence(s, 300, 3, 8);
  EXPECT_EQ(a, dp::adversary_sequence(s, 300, 3, 8));
  EXPECT_NE(a, dp::adversary_sequence(s, 300, 3, 9));
  EXPECT_TRUE(std::all_of(a.begin(), a.end(), [](dp::TypeIndex t) { return t < 3; }));

  s = {};
  s.kind = dp::AdversarySpec::Kind::constant;
  s.type = 4;
  EXPECT_THROW(dp::adversary_sequence(s, 5, 3, 0), std::invalid_argument);
}

TEST(Stochastic, SingleRoundRegretIsBenchmark) {
  const auto c = with_horizon(kStochastic, 1);
  const auto r = run(c, 3);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].curve_idx, -1);
  EXPECT_EQ(r.trace[0].payment, 0.0);
  EXPECT_EQ(r.summary.final_regret, r.summary.benchmark);
  EXPECT_GT(r.summary.benchmark, 0.0);
}

TEST(Stochastic, BenchmarkIsBestInSpace) {
  const auto c = with_horizon(kStochastic, 10);
  const auto ps = dp::prepare_space(c, 10);
  const auto r = dp::run_stochastic(ps, c, 1);
  EXPECT_EQ(r.summary.benchmark, dp::best_in_space(ps.instance, dp::type_distribution(c), ps.space).revenue);
  ASSERT_TRUE(r.summary.opt_oracle.has_value());
  EXPECT_GE(*r.summary.discretization_gap, -0.01 - 1e-12);
}

TEST(Stochastic, TraceIsConsistentAndRegretRecomputes) {
  const auto c = with_horizon(kStochastic, 400);
  const auto ps = dp::prepare_space(c, 400);
  const auto r = dp::run_stochastic(ps, c, 5);
  ASSERT_EQ(r.trace.size(), 400u);
  expect_consistent_trace(ps, r);
  for (const auto& rec : r.trace) {
    EXPECT_EQ(rec.cum_regret, static_cast<double>(rec.t) * r.summary.benchmark - rec.cum_revenue);
  }
  EXPECT_EQ(r.summary.checkpoints.back().t, 400u);
  EXPECT_EQ(r.summary.checkpoints.size(), dp::checkpoint_rounds(400).size());
  EXPECT_GT(r.summary.confidence_pairs, 0u);
}

TEST(Stochastic, SingleTypeConvergesAfterGiveaway) {
  const auto c = dp::load_config_string(R"(
schema_version: 1
instance: {n_total: 4, types: [{kind: linear, scale: 1.0}]}
discretization: {scheme: monotone, epsilon: 0.5}
run: {horizon: 200}
)");
  const auto r = run(c, 1);
  // The flat price 1.0 extracts everything; only round 1 is lost.
  EXPECT_EQ(r.summary.benchmark, 1.0);
  EXPECT_EQ(r.summary.final_regret, 1.0);
  EXPECT_EQ(*r.summary.final_pseudo_regret, 1.0);
  for (std::size_t t = 1; t < r.trace.size(); ++t) EXPECT_EQ(r.trace[t].payment, 1.0);
}

TEST(Stochastic, EnvironmentIgnoresLearner) {
  // A different grid changes what the learner posts but not who arrives.
  auto a = with_horizon(kStochastic, 300);
  auto b = a;
  b.discretization.epsilon = 0.35;
  b.run.learner_seed_offset = 77;
  const auto ra = run(a, 11);
  const auto rb = run(b, 11);
  bool posted_differently = false;
  for (std::size_t t = 0; t < ra.trace.size(); ++t) {
    ASSERT_EQ(ra.trace[t].buyer_type, rb.trace[t].buyer_type);
    posted_differently = posted_differently || ra.trace[t].payment != rb.trace[t].payment;
  }
  EXPECT_TRUE(posted_differently);
}

TEST(Stochastic, Deterministic) {
  const auto c = with_horizon(kStochastic, 300);
  EXPECT_EQ(run(c, 4).trace, run(c, 4).trace);
  EXPECT_NE(run(c, 4).trace, run(c, 5).trace);
}

TEST(Adversarial, EmptyHorizon) {
  const auto r = run(with_horizon(kAdversarial, 0), 1);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.summary.final_regret, 0.0);
  EXPECT_EQ(r.summary.total_revenue, 0.0);
}

TEST(Adversarial, ChecksHoldAndRegretRecomputes) {
  auto c = with_horizon(kAdversarial, 300);
  c.adversary.kind = dp::AdversarySpec::Kind::periodic;
  c.adversary.pattern = {0, 1};
  const auto ps = dp::prepare_space(c, 300);
  const auto r = dp::run_adversarial(ps, c, 2);
  expect_consistent_trace(ps, r);
  EXPECT_EQ(r.summary.feedback_mismatches, 0u);
  EXPECT_EQ(r.summary.upper_bound_violations, 0u);
  EXPECT_EQ(r.summary.btl_checks, 300u * dp::kComparatorCount);
  EXPECT_EQ(r.summary.btl_violations, 0u);
  EXPECT_EQ(*r.summary.theta, dp::default_theta(static_cast<double>(ps.space.count().value), 2, 300));

  // Hindsight best over every curve of the space, from the trace's buyer types.
  const auto pay = payments(ps);
  std::vector<std::uint64_t> seen(2, 0);
  for (const auto& rec : r.trace) {
    ++seen[rec.buyer_type];
    EXPECT_EQ(rec.buyer_type, (rec.t - 1) % 2);
    double best = 0.0;
    for (const auto& row : pay) {
      best = std::max(best, static_cast<double>(seen[0]) * row[0] + static_cast<double>(seen[1]) * row[1]);
    }
    ASSERT_EQ(rec.cum_regret, best - rec.cum_revenue) << "t=" << rec.t;
  }
}

TEST(Adversarial, ConstantBuyerBenchmark) {
  auto c = with_horizon(kAdversarial, 1000);
  c.adversary.kind = dp::AdversarySpec::Kind::constant;
  c.adversary.type = 1;
  const auto ps = dp::prepare_space(c, 1000);
  double best = 0.0;
  for (const auto& row : payments(ps)) best = std::max(best, row[1]);
  double per_round[2];
  for (int k = 0; k < 2; ++k) {
    const std::uint64_t T = k == 0 ? 1000 : 4000;
    c.run.horizon = T;
    const auto ps_t = dp::prepare_space(c, T);
    double mean = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto r = dp::run_adversarial(ps_t, c, seed);
      EXPECT_EQ(r.summary.benchmark, static_cast<double>(T) * best);
      mean += r.summary.final_regret / 5.0;
    }
    per_round[k] = mean / static_cast<double>(T);
  }
  EXPECT_LT(per_round[1], per_round[0]);
}

TEST(Adversarial, LearnerSeedMovesOnlyPerturbations) {
  auto a = with_horizon(kAdversarial, 200);
  a.adversary.kind = dp::AdversarySpec::Kind::random;
  a.adversary.blocks = 3;
  auto b = a;
  b.run.learner_seed_offset = 5;
  const auto ra = run(a, 9);
  const auto rb = run(b, 9);
  bool posted_differently = false;
  for (std::size_t t = 0; t < ra.trace.size(); ++t) {
    ASSERT_EQ(ra.trace[t].buyer_type, rb.trace[t].buyer_type);
    posted_differently = posted_differently || ra.trace[t].curve_idx != rb.trace[t].curve_idx;
  }
  EXPECT_TRUE(posted_differently);
}

TEST(Outputs, CsvRoundTrip) {
  const auto r = run(with_horizon(kStochastic, 50), 2);
  std::stringstream ss;
  dp::write_trace_csv(ss, r.trace);
  EXPECT_EQ(dp::read_trace_csv(ss), r.trace);

  std::stringstream empty;
  dp::write_trace_csv(empty, {});
  EXPECT_EQ(empty.str(), std::string(dp::kTraceHeader) + "\n");

  std::stringstream bad("t,x\n");
  EXPECT_THROW(dp::read_trace_csv(bad), std::invalid_argument);
}

TEST(Outputs, RegretRecomputesFromCsvAlone) {
  const auto c = with_horizon(kStochastic, 120);
  const auto r = run(c, 7);
  std::stringstream ss;
  dp::write_trace_csv(ss, r.trace);
  const auto back = dp::read_trace_csv(ss);
  double cum = 0.0;
  for (const auto& rec : back) {
    cum += rec.payment;
    EXPECT_EQ(rec.cum_revenue, cum);
    EXPECT_EQ(rec.cum_regret, static_cast<double>(rec.t) * r.summary.benchmark - cum);
  }
}

TEST(Outputs, SummaryKeys) {
  const auto c = with_horizon(kAdversarial, 20);
  const auto j = dp::summary_json(run(c, 1).summary, c);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, dp::summary_keys());
  EXPECT_EQ(j["config"]["setting"]["sequence"]["kind"], "block");
  EXPECT_TRUE(j["opt_oracle"].is_null());
}

TEST(Outputs, FilesAreByteStable) {
  const fs::path root = fs::temp_directory_path() / "datapricing_outputs_test";
  fs::remove_all(root);
  for (const char* text : {kStochastic, kAdversarial}) {
    const auto c = with_horizon(text, 150);
    const auto p1 = dp::write_outputs(run(c, 6), c, root / "a");
    const auto p2 = dp::write_outputs(run(c, 6), c, root / "b");
    EXPECT_EQ(p1.trace.filename(), "trace_6.csv");
    EXPECT_EQ(p1.summary.filename(), "summary_6.json");
    EXPECT_EQ(slurp(p1.trace), slurp(p2.trace));
    EXPECT_EQ(slurp(p1.summary), slurp(p2.summary));
    const auto parsed = nlohmann::json::parse(slurp(p1.summary));
    EXPECT_EQ(parsed["horizon"], 150);
  }
  fs::remove_all(root);
}

TEST(Sweep, RowsInOrderWhateverTheThreads) {
  auto c = with_horizon(kStochastic, 100);
  c.sweep.horizons = {50, 100};
  c.sweep.seeds = {1, 2, 3};
  const auto one = dp::run_sweep(c, 1);
  const auto three = dp::run_sweep(c, 3);
  ASSERT_EQ(one.size(), 6u);
  ASSERT_EQ(three.size(), 6u);
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(one[k].horizon, k < 3 ? 50u : 100u);
    EXPECT_EQ(one[k].seed, k % 3 + 1);
    EXPECT_EQ(one[k].summary.final_regret, three[k].summary.final_regret);
  }
  std::stringstream ss;
  dp::write_sweep_csv(ss, one);
  std::string line;
  int lines = 0;
  while (std::getline(ss, line)) ++lines;
  EXPECT_EQ(lines, 7);
}

TEST(Prepare, LabelsOnlyForAdversarial) {
  EXPECT_TRUE(dp::prepare_space(with_horizon(kStochastic, 10), 10).classes.curve_classes().empty());
  EXPECT_FALSE(dp::prepare_space(with_horizon(kAdversarial, 10), 10).classes.curve_classes().empty());
}
