// datapricing command-line front end. Each subcommand parses flags, calls the
// library, and prints key=value lines; failures print one "error: ..." line
// and exit nonzero.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "datapricing/datapricing.hpp"

namespace dp = datapricing;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Run this seed instead of the configured ones");
  cmd->add_option("--out", c.out, "Output directory");
}

// Prints to stdout and, when an output directory is given, to a file there.
class Report {
 public:
  template <class T>
  void add(const std::string& key, const T& value) {
    std::ostringstream v;
    if constexpr (std::is_floating_point_v<T>) v << dp::format_double(value);
    else v << value;
    lines_ << key << '=' << v.str() << '\n';
  }
  void emit(const std::string& out_dir, const std::string& file) const {
    std::cout << lines_.str();
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      std::ofstream os(fs::path(out_dir) / file, std::ios::binary);
      os << lines_.str();
    }
  }

 private:
  std::ostringstream lines_;
};

std::string out_dir(const Common& c, const dp::ExperimentConfig& config) {
  return c.out.empty() ? config.output_dir : c.out;
}

std::vector<std::uint64_t> seeds_for(const Common& c, const dp::ExperimentConfig& config) {
  if (c.seed) return {*c.seed};
  return config.run.seeds;
}

int cmd_discretize(const std::string& scheme_name, double eps, std::size_t m, dp::Amount n, std::optional<double> L,
                   std::optional<double> J, std::optional<double> prune_above, std::uint64_t cap, const Common& c) {
  const dp::Scheme scheme = dp::parse_scheme(scheme_name);
  dp::GridParams p;
  p.epsilon = eps;
  p.m = m;
  p.n_total = n;
  p.smoothness = L;
  p.diminishing = J;
  dp::SpaceOptions opts;
  opts.prune_above = prune_above;
  opts.curve_cap = cap;
  const dp::DiscretizedPriceSpace space = dp::build_space(p, scheme, opts);
  Report r;
  r.add("scheme", std::string(dp::to_string(scheme)));
  r.add("epsilon", eps);
  r.add("m", m);
  r.add("n_total", n);
  r.add("value_grid_size", space.value_grid().size());
  r.add("value_grid_bound", dp::value_grid_size_bound(eps, m));
  r.add("data_grid_size", space.data_grid().size());
  if (scheme == dp::Scheme::diminishing) r.add("data_grid_bound", dp::diminishing_grid_size_bound(eps, m, *J, n));
  r.add("space_size", space.count().str());
  r.add("space_bound", space.size_bound());
  r.emit(c.out, "discretize.txt");
  return 0;
}

int cmd_offline_opt(const dp::ExperimentConfig& config, const Common& c) {
  const dp::PreparedSpace ps = dp::prepare_space(config, config.run.horizon);
  const dp::TypeDistribution q = dp::type_distribution(config);
  const dp::OfflineResult best = dp::best_in_space(ps.instance, q, ps.space);
  Report r;
  r.add("scheme", std::string(dp::to_string(ps.space.scheme())));
  r.add("epsilon", ps.params.epsilon);
  r.add("space_size", ps.space.count().str());
  r.add("best_index", best.index);
  r.add("revenue", best.revenue);
  std::ostringstream steps;
  for (const auto& s : best.curve.steps()) steps << '(' << s.boundary << ',' << dp::format_double(s.value) << ')';
  r.add("steps", steps.str());
  r.emit(c.out, "offline_opt.txt");
  return 0;
}

int cmd_oracle_check(const dp::ExperimentConfig& config, double resolution, const Common& c) {
  const dp::PreparedSpace ps = dp::prepare_space(config, config.run.horizon);
  const dp::TypeDistribution q = dp::type_distribution(config);
  const dp::OfflineResult best = dp::best_in_space(ps.instance, q, ps.space);
  const dp::OfflineResult oracle = dp::brute_force_opt(ps.instance, q, resolution);
  const double eps = ps.params.epsilon;
  const double budget = 2.0 * eps / (1.0 + eps) + resolution;
  const double gap = oracle.revenue - best.revenue;
  Report r;
  r.add("scheme", std::string(dp::to_string(ps.space.scheme())));
  r.add("epsilon", eps);
  r.add("resolution", resolution);
  r.add("space_revenue", best.revenue);
  r.add("oracle_revenue", oracle.revenue);
  r.add("gap", gap);
  r.add("budget", budget);
  r.add("within_budget", gap <= budget + 1e-9 ? "true" : "false");
  r.emit(c.out, "oracle_check.txt");
  return 0;
}

int cmd_simulate(dp::ExperimentConfig config, dp::SettingKind setting, bool timing, const Common& c) {
  config.setting = setting;
  const std::string dir = out_dir(c, config);
  const auto t0 = std::chrono::steady_clock::now();
  const dp::PreparedSpace ps = dp::prepare_space(config, config.run.horizon);
  for (std::uint64_t seed : seeds_for(c, config)) {
    const auto t1 = std::chrono::steady_clock::now();
    const dp::RunResult result = dp::run_experiment(ps, config, seed);
    nlohmann::ordered_json extra;
    if (timing) {
      extra["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
    }
    const dp::OutputPaths paths = dp::write_outputs(result, config, dir, extra);
    std::cout << "seed=" << seed << " final_regret=" << dp::format_double(result.summary.final_regret)
              << " total_revenue=" << dp::format_double(result.summary.total_revenue) << " trace=" << paths.trace.string()
              << " summary=" << paths.summary.string() << '\n';
  }
  std::cerr << "elapsed_seconds="
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << '\n';
  return 0;
}

int cmd_sweep(dp::ExperimentConfig config, std::size_t jobs, const Common& c) {
  if (c.seed) config.sweep.seeds = {*c.seed};
  const std::string dir = out_dir(c, config);
  const auto rows = dp::run_sweep(config, jobs);
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / "sweep.csv";
  {
    std::ofstream os(path, std::ios::binary);
    dp::write_sweep_csv(os, rows);
  }
  std::map<std::uint64_t, std::pair<double, std::size_t>> by_horizon;
  for (const auto& r : rows) {
    auto& [sum, n] = by_horizon[r.horizon];
    sum += r.summary.final_regret;
    ++n;
  }
  for (const auto& [h, acc] : by_horizon) {
    std::cout << "horizon=" << h << " runs=" << acc.second
              << " mean_regret=" << dp::format_double(acc.first / static_cast<double>(acc.second)) << '\n';
  }
  std::cout << "rows=" << rows.size() << " sweep=" << path.string() << '\n';
  return 0;
}

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Revenue-optimal pricing of data: discretized price spaces, offline search and online learners"};
  app.require_subcommand(1);

  Common common;

  std::string scheme = "monotone";
  double eps = 0.1;
  std::size_t m = 1;
  dp::Amount n = 1;
  std::optional<double> L, J, prune_above;
  std::uint64_t cap = dp::kDefaultCurveCap;
  auto* discretize = app.add_subcommand("discretize", "Grid sizes, exact |P| and the size bound");
  discretize->add_option("--scheme", scheme, "monotone | smooth | diminishing")->required();
  discretize->add_option("--eps", eps, "Approximation parameter in (0,1)")->required();
  discretize->add_option("--m", m, "Number of buyer types")->required();
  discretize->add_option("--n", n, "Total amount of data N")->required();
  discretize->add_option("--L", L, "Smoothness constant (smooth scheme)");
  discretize->add_option("--J", J, "Diminishing-returns constant (diminishing scheme)");
  discretize->add_option("--prune-above", prune_above, "Drop grid values above this level");
  discretize->add_option("--cap", cap, "Enumeration cap");
  add_common(discretize, common);

  std::string config_path;
  double resolution = 0.01;
  bool timing = false;
  std::size_t jobs = 1;

  auto* offline = app.add_subcommand("offline-opt", "Best curve of the configured price space");
  offline->add_option("--config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);
  add_common(offline, common);

  auto* oracle = app.add_subcommand("oracle-check", "Price space optimum against the brute-force reference");
  oracle->add_option("--config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);
  oracle->add_option("--resolution", resolution, "Value lattice step of the reference search");
  add_common(oracle, common);

  auto* stoch = app.add_subcommand("simulate-stochastic", "UCB against i.i.d. buyers");
  stoch->add_option("--config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);
  stoch->add_flag("--record-timing", timing, "Add wall-clock time to the summary (breaks byte-stability)");
  add_common(stoch, common);

  auto* adv = app.add_subcommand("simulate-adversarial", "FTPL against an oblivious type sequence");
  adv->add_option("--config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);
  adv->add_flag("--record-timing", timing, "Add wall-clock time to the summary (breaks byte-stability)");
  add_common(adv, common);

  auto* sweep = app.add_subcommand("sweep", "All (horizon, seed) pairs of the config; writes sweep.csv");
  sweep->add_option("--config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--jobs", jobs, "Concurrent runs per horizon");
  add_common(sweep, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*discretize) return cmd_discretize(scheme, eps, m, n, L, J, prune_above, cap, common);
    const dp::ExperimentConfig config = dp::load_config_file(config_path);
    if (*offline) return cmd_offline_opt(config, common);
    if (*oracle) return cmd_oracle_check(config, resolution, common);
    if (*stoch) return cmd_simulate(config, dp::SettingKind::stochastic, timing, common);
    if (*adv) return cmd_simulate(config, dp::SettingKind::adversarial, timing, common);
    if (*sweep) return cmd_sweep(config, jobs, common);
  } catch (const dp::ConfigError& e) {
    std::cerr << "error: config: " << one_line(e.what()) << '\n';
    return 3;
  } catch (const std::length_error& e) {
    std::cerr << "error: too-large: " << one_line(e.what()) << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid: " << one_line(e.what()) << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 1;
}
