#pragma once

// Trace CSV and summary JSON. Doubles are written in shortest round-trip form
// so files are byte-stable and re-reading them recovers the exact values.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "datapricing/config.hpp"
#include "datapricing/harness.hpp"

namespace datapricing {

inline constexpr const char* kTraceHeader = "t,curve_idx,buyer_type,amount,payment,feedback,cum_revenue,cum_regret";

inline std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::invalid_argument("bad number '" + std::string(s) + "'");
  return x;
}

template <class Int>
Int parse_int(std::string_view s) {
  Int x{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::invalid_argument("bad integer '" + std::string(s) + "'");
  return x;
}

inline void write_trace_csv(std::ostream& os, const std::vector<RoundRecord>& trace) {
  os << kTraceHeader << '\n';
  for (const auto& r : trace) {
    os << r.t << ',' << r.curve_idx << ',' << r.buyer_type << ',' << r.amount << ',' << format_double(r.payment) << ',';
    if (r.feedback) os << *r.feedback;
    else os << "none";
    os << ',' << format_double(r.cum_revenue) << ',' << format_double(r.cum_regret) << '\n';
  }
}

inline std::vector<RoundRecord> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTraceHeader) throw std::invalid_argument("trace CSV header mismatch");
  std::vector<RoundRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      f.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    f.push_back(rest);
    if (f.size() != 8) throw std::invalid_argument("trace row has " + std::to_string(f.size()) + " fields");
    RoundRecord r;
    r.t = parse_int<std::uint64_t>(f[0]);
    r.curve_idx = parse_int<std::int64_t>(f[1]);
    r.buyer_type = parse_int<std::size_t>(f[2]);
    r.amount = parse_int<Amount>(f[3]);
    r.payment = parse_double(f[4]);
    if (f[5] != "none") r.feedback = parse_int<std::size_t>(f[5]);
    r.cum_revenue = parse_double(f[6]);
    r.cum_regret = parse_double(f[7]);
    out.push_back(r);
  }
  return out;
}

inline nlohmann::ordered_json to_json(const ValuationSpec& v) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(v.kind);
  switch (v.kind) {
    case ValuationSpec::Kind::power_law:
      j["alpha"] = v.power_law.alpha;
      j["beta"] = v.power_law.beta;
      j["gamma"] = v.power_law.gamma;
      break;
    case ValuationSpec::Kind::linear: j["scale"] = v.scale; break;
    case ValuationSpec::Kind::explicit_values: j["values"] = v.values; break;
    case ValuationSpec::Kind::random:
      j["seed"] = v.seed;
      j["knots"] = v.knots;
      break;
  }
  return j;
}

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = c.schema_version;
  ordered_json inst;
  inst["n_total"] = c.instance.n_total;
  inst["types"] = ordered_json::array();
  for (const auto& t : c.instance.types) inst["types"].push_back(to_json(t));
  inst["smoothness"] = c.instance.smoothness ? ordered_json(*c.instance.smoothness) : ordered_json("measured");
  inst["diminishing"] = c.instance.diminishing ? ordered_json(*c.instance.diminishing) : ordered_json("measured");
  j["instance"] = inst;
  ordered_json setting;
  setting["kind"] = to_string(c.setting);
  if (c.setting == SettingKind::stochastic) {
    setting["q"] = type_distribution(c).weights();
  } else {
    ordered_json seq;
    seq["kind"] = to_string(c.adversary.kind);
    switch (c.adversary.kind) {
      case AdversarySpec::Kind::constant: seq["type"] = c.adversary.type; break;
      case AdversarySpec::Kind::periodic: seq["pattern"] = c.adversary.pattern; break;
      case AdversarySpec::Kind::block:
        seq["blocks"] = c.adversary.blocks;
        seq["order"] = c.adversary.order;
        break;
      case AdversarySpec::Kind::random: seq["blocks"] = c.adversary.blocks; break;
    }
    setting["sequence"] = seq;
  }
  j["setting"] = setting;
  ordered_json d;
  d["scheme"] = to_string(c.discretization.scheme);
  d["epsilon"] = c.discretization.epsilon ? ordered_json(*c.discretization.epsilon) : ordered_json("auto");
  d["prune"] = c.discretization.prune;
  d["enumeration_cap"] = c.discretization.curve_cap;
  j["discretization"] = d;
  ordered_json run;
  run["horizon"] = c.run.horizon;
  run["seeds"] = c.run.seeds;
  run["theta"] = c.run.theta ? ordered_json(*c.run.theta) : ordered_json("auto");
  run["learner_seed_offset"] = c.run.learner_seed_offset;
  run["oracle_resolution"] = c.run.oracle_resolution;
  j["run"] = run;
  return j;
}

/// Summary document. The key list is fixed; optional values are null when
/// they do not apply.
inline nlohmann::ordered_json summary_json(const RunSummary& s, const ExperimentConfig& config) {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["setting"] = to_string(s.setting);
  j["seed"] = s.seed;
  j["horizon"] = s.horizon;
  j["config"] = to_json(config);
  j["scheme"] = to_string(s.scheme);
  j["epsilon"] = s.epsilon;
  j["value_grid_size"] = s.value_grid_size;
  j["data_grid_size"] = s.data_grid_size;
  j["space_size"] = s.space_size;
  j["space_bound"] = s.space_bound;
  j["candidate_count"] = s.candidate_count;
  j["benchmark"] = s.benchmark;
  j["total_revenue"] = s.total_revenue;
  j["final_regret"] = s.final_regret;
  j["checkpoints"] = ordered_json::array();
  for (const auto& c : s.checkpoints) {
    j["checkpoints"].push_back({{"t", c.t},
                                {"cum_revenue", c.cum_revenue},
                                {"cum_regret", c.cum_regret},
                                {"pseudo_regret", opt(c.pseudo_regret)}});
  }
  j["final_pseudo_regret"] = opt(s.final_pseudo_regret);
  j["opt_oracle"] = opt(s.opt_oracle);
  j["discretization_gap"] = opt(s.discretization_gap);
  j["confidence_pairs"] = s.confidence_pairs;
  j["confidence_violations"] = s.confidence_violations;
  j["theta"] = opt(s.theta);
  j["feedback_mismatches"] = s.feedback_mismatches;
  j["upper_bound_violations"] = s.upper_bound_violations;
  j["btl_checks"] = s.btl_checks;
  j["btl_violations"] = s.btl_violations;
  return j;
}

inline const std::vector<std::string>& summary_keys() {
  static const std::vector<std::string> keys{
      "schema_version", "setting",          "seed",           "horizon",          "config",
      "scheme",         "epsilon",          "value_grid_size", "data_grid_size",  "space_size",
      "space_bound",    "candidate_count",  "benchmark",      "total_revenue",    "final_regret",
      "checkpoints",    "final_pseudo_regret", "opt_oracle",       "discretization_gap", "confidence_pairs", "confidence_violations",
      "theta",          "feedback_mismatches", "upper_bound_violations", "btl_checks", "btl_violations"};
  return keys;
}

struct OutputPaths {
  std::filesystem::path trace;
  std::filesystem::path summary;
};

inline OutputPaths output_paths(const std::filesystem::path& dir, std::uint64_t seed) {
  return {dir / ("trace_" + std::to_string(seed) + ".csv"), dir / ("summary_" + std::to_string(seed) + ".json")};
}

/// Writes trace_<seed>.csv and summary_<seed>.json. Extra keys (timing, say)
/// are appended to the summary only when given.
inline OutputPaths write_outputs(const RunResult& result, const ExperimentConfig& config,
                                 const std::filesystem::path& dir, const nlohmann::ordered_json& extra = {}) {
  std::filesystem::create_directories(dir);
  const OutputPaths p = output_paths(dir, result.summary.seed);
  {
    std::ofstream os(p.trace, std::ios::binary);
    write_trace_csv(os, result.trace);
    if (!os) throw std::runtime_error("cannot write " + p.trace.string());
  }
  {
    nlohmann::ordered_json j = summary_json(result.summary, config);
    if (extra.is_object()) {
      for (const auto& [k, v] : extra.items()) j[k] = v;
    }
    std::ofstream os(p.summary, std::ios::binary);
    os << j.dump(2) << '\n';
    if (!os) throw std::runtime_error("cannot write " + p.summary.string());
  }
  return p;
}

inline constexpr const char* kSweepHeader =
    "setting,horizon,seed,epsilon,space_size,candidate_count,benchmark,total_revenue,final_regret";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    const auto& s = r.summary;
    os << to_string(s.setting) << ',' << r.horizon << ',' << r.seed << ',' << format_double(s.epsilon) << ','
       << s.space_size << ',' << s.candidate_count << ',' << format_double(s.benchmark) << ','
       << format_double(s.total_revenue) << ',' << format_double(s.final_regret) << '\n';
  }
}

}  // namespace datapricing
