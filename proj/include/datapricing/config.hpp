#pragma once

// Experiment configuration: a versioned YAML document. Loading reports the
// offending line for every problem it finds.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "datapricing/discretization.hpp"
#include "datapricing/market.hpp"
#include "datapricing/valuations.hpp"

namespace datapricing {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ValuationSpec {
  enum class Kind { power_law, linear, explicit_values, random };
  Kind kind = Kind::linear;
  PowerLawSpec power_law;
  double scale = 1.0;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::size_t knots = 4;
};

struct InstanceSpec {
  Amount n_total = 1;
  std::vector<ValuationSpec> types;
  std::optional<double> smoothness;   // unset: measured
  std::optional<double> diminishing;  // unset: measured
};

enum class SettingKind { stochastic, adversarial };

struct AdversarySpec {
  enum class Kind { constant, periodic, block, random };
  Kind kind = Kind::block;
  TypeIndex type = 0;               // constant
  std::vector<TypeIndex> pattern;   // periodic
  std::size_t blocks = 2;           // block, random (segments)
  std::vector<TypeIndex> order;     // block; empty means 0, 1, ..., m-1
};

struct DiscretizationSpec {
  Scheme scheme = Scheme::monotone;
  std::optional<double> epsilon;  // unset: T^(-1/2), capped at 0.5
  bool prune = true;
  std::uint64_t curve_cap = kDefaultCurveCap;
};

struct RunSpec {
  std::uint64_t horizon = 1000;
  std::vector<std::uint64_t> seeds{1};
  std::optional<double> theta;  // unset: default_theta
  std::uint64_t learner_seed_offset = 0;
  double oracle_resolution = 0.01;
};

struct SweepSpec {
  std::vector<std::uint64_t> horizons;
  std::vector<std::uint64_t> seeds;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  InstanceSpec instance;
  SettingKind setting = SettingKind::stochastic;
  std::vector<double> q;  // empty: uniform
  AdversarySpec adversary;
  DiscretizationSpec discretization;
  RunSpec run;
  SweepSpec sweep;
  std::string output_dir = "out";
};

inline std::string_view to_string(SettingKind s) { return s == SettingKind::stochastic ? "stochastic" : "adversarial"; }

inline std::string_view to_string(AdversarySpec::Kind k) {
  switch (k) {
    case AdversarySpec::Kind::constant: return "constant";
    case AdversarySpec::Kind::periodic: return "periodic";
    case AdversarySpec::Kind::block: return "block";
    case AdversarySpec::Kind::random: return "random";
  }
  return "unknown";
}

inline std::string_view to_string(ValuationSpec::Kind k) {
  switch (k) {
    case ValuationSpec::Kind::power_law: return "power_law";
    case ValuationSpec::Kind::linear: return "linear";
    case ValuationSpec::Kind::explicit_values: return "explicit";
    case ValuationSpec::Kind::random: return "random";
  }
  return "unknown";
}

inline ValuationCurve make_valuation(const ValuationSpec& s, Amount n_total) {
  switch (s.kind) {
    case ValuationSpec::Kind::power_law: return power_law_curve(s.power_law, n_total);
    case ValuationSpec::Kind::linear: return linear_curve(s.scale, n_total);
    case ValuationSpec::Kind::explicit_values:
      if (static_cast<Amount>(s.values.size()) != n_total + 1) {
        throw std::invalid_argument("explicit valuation needs n_total + 1 values");
      }
      return ValuationCurve(s.values);
    case ValuationSpec::Kind::random: return random_monotone_curve(s.seed, n_total, s.knots);
  }
  throw std::logic_error("unhandled valuation kind");
}

inline MarketInstance make_instance(const InstanceSpec& spec) {
  std::vector<ValuationCurve> curves;
  for (const auto& t : spec.types) curves.push_back(make_valuation(t, spec.n_total));
  return MarketInstance(spec.n_total, std::move(curves), spec.smoothness, spec.diminishing);
}

inline TypeDistribution type_distribution(const ExperimentConfig& c) {
  if (c.q.empty()) return TypeDistribution::uniform(c.instance.types.size());
  return TypeDistribution(c.q);
}

/// The configured epsilon, or T^(-1/2) capped at 0.5 so short horizons still
/// give a valid grid.
inline double effective_epsilon(const DiscretizationSpec& d, std::uint64_t horizon) {
  if (d.epsilon) return *d.epsilon;
  const double t = static_cast<double>(std::max<std::uint64_t>(horizon, 1));
  return std::min(0.5, 1.0 / std::sqrt(t));
}

namespace detail {

class YamlReader {
 public:
  static int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

  [[noreturn]] static void fail(const YAML::Node& n, const std::string& what) { throw ConfigError(line_of(n), what); }

  static void require_map(const YAML::Node& n, const std::string& name) {
    if (!n.IsMap()) fail(n, "'" + name + "' must be a mapping");
  }

  static void allow_keys(const YAML::Node& n, const std::string& name, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in '" + name + "'");
    }
  }

  template <class T>
  static T scalar(const YAML::Node& n, const std::string& name) {
    if (!n.IsScalar()) fail(n, "'" + name + "' must be a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, "'" + name + "' has an invalid value '" + n.Scalar() + "'");
    }
  }

  template <class T>
  static std::vector<T> sequence(const YAML::Node& n, const std::string& name) {
    if (!n.IsSequence()) fail(n, "'" + name + "' must be a list");
    std::vector<T> out;
    for (const auto& e : n) out.push_back(scalar<T>(e, name));
    return out;
  }

  static double positive(const YAML::Node& n, const std::string& name) {
    const double v = scalar<double>(n, name);
    if (!(v > 0.0) || !std::isfinite(v)) fail(n, "'" + name + "' must be positive");
    return v;
  }

  static std::uint64_t count(const YAML::Node& n, const std::string& name) {
    const auto v = scalar<long long>(n, name);
    if (v < 0) fail(n, "'" + name + "' must be non-negative");
    return static_cast<std::uint64_t>(v);
  }

  /// "measured"/"auto" or a positive number.
  static std::optional<double> optional_number(const YAML::Node& n, const std::string& name, const char* word) {
    if (n.IsScalar() && n.Scalar() == word) return std::nullopt;
    return positive(n, name);
  }
};

inline ValuationSpec parse_valuation(const YAML::Node& n, Amount n_total) {
  using R = YamlReader;
  R::require_map(n, "types[]");
  if (!n["kind"]) R::fail(n, "valuation type needs a 'kind'");
  const auto kind = R::scalar<std::string>(n["kind"], "kind");
  ValuationSpec s;
  if (kind == "power_law") {
    R::allow_keys(n, "power_law", {"kind", "alpha", "beta", "gamma"});
    s.kind = ValuationSpec::Kind::power_law;
    if (n["alpha"]) s.power_law.alpha = R::scalar<double>(n["alpha"], "alpha");
    if (n["beta"]) s.power_law.beta = R::scalar<double>(n["beta"], "beta");
    if (n["gamma"]) s.power_law.gamma = R::scalar<double>(n["gamma"], "gamma");
  } else if (kind == "linear") {
    R::allow_keys(n, "linear", {"kind", "scale"});
    s.kind = ValuationSpec::Kind::linear;
    if (n["scale"]) s.scale = R::scalar<double>(n["scale"], "scale");
  } else if (kind == "explicit") {
    R::allow_keys(n, "explicit", {"kind", "values"});
    s.kind = ValuationSpec::Kind::explicit_values;
    if (!n["values"]) R::fail(n, "explicit valuation needs 'values'");
    s.values = R::sequence<double>(n["values"], "values");
  } else if (kind == "random") {
    R::allow_keys(n, "random", {"kind", "seed", "knots"});
    s.kind = ValuationSpec::Kind::random;
    if (n["seed"]) s.seed = R::count(n["seed"], "seed");
    if (n["knots"]) s.knots = static_cast<std::size_t>(R::count(n["knots"], "knots"));
  } else {
    R::fail(n["kind"], "unknown valuation kind '" + kind + "'");
  }
  try {
    make_valuation(s, n_total);
  } catch (const std::invalid_argument& e) {
    R::fail(n, e.what());
  }
  return s;
}

inline void parse_instance(const YAML::Node& n, ExperimentConfig& c) {
  using R = YamlReader;
  R::require_map(n, "instance");
  R::allow_keys(n, "instance", {"n_total", "types", "family", "smoothness", "diminishing"});
  if (!n["n_total"]) R::fail(n, "'instance' needs 'n_total'");
  const auto total = R::scalar<long long>(n["n_total"], "n_total");
  if (total < 1) R::fail(n["n_total"], "'n_total' must be at least 1");
  c.instance.n_total = static_cast<Amount>(total);
  if (n["types"] && n["family"]) R::fail(n, "give either 'types' or 'family', not both");
  if (n["types"]) {
    if (!n["types"].IsSequence() || n["types"].size() == 0) R::fail(n["types"], "'types' must be a non-empty list");
    for (const auto& t : n["types"]) c.instance.types.push_back(parse_valuation(t, c.instance.n_total));
  } else if (n["family"]) {
    // Power-law types sharing beta and gamma, one per alpha.
    const YAML::Node f = n["family"];
    R::require_map(f, "family");
    R::allow_keys(f, "family", {"alphas", "beta", "gamma"});
    if (!f["alphas"]) R::fail(f, "'family' needs 'alphas'");
    PowerLawSpec base;
    if (f["beta"]) base.beta = R::scalar<double>(f["beta"], "beta");
    if (f["gamma"]) base.gamma = R::scalar<double>(f["gamma"], "gamma");
    for (const auto& a : f["alphas"]) {
      ValuationSpec s;
      s.kind = ValuationSpec::Kind::power_law;
      s.power_law = base;
      s.power_law.alpha = R::scalar<double>(a, "alphas");
      try {
        make_valuation(s, c.instance.n_total);
      } catch (const std::invalid_argument& e) {
        R::fail(a, e.what());
      }
      c.instance.types.push_back(s);
    }
    if (c.instance.types.empty()) R::fail(f["alphas"], "'alphas' must be non-empty");
  } else {
    R::fail(n, "'instance' needs 'types' or 'family'");
  }
  if (n["smoothness"]) c.instance.smoothness = R::optional_number(n["smoothness"], "smoothness", "measured");
  if (n["diminishing"]) c.instance.diminishing = R::optional_number(n["diminishing"], "diminishing", "measured");
}

inline std::vector<TypeIndex> parse_types(const YAML::Node& n, const std::string& name, std::size_t m) {
  std::vector<TypeIndex> out;
  if (!n.IsSequence() || n.size() == 0) YamlReader::fail(n, "'" + name + "' must be a non-empty list");
  for (const auto& e : n) {
    const auto t = YamlReader::count(e, name);
    if (t >= m) YamlReader::fail(e, "type " + std::to_string(t) + " out of range for " + std::to_string(m) + " types");
    out.push_back(static_cast<TypeIndex>(t));
  }
  return out;
}

inline void parse_setting(const YAML::Node& n, ExperimentConfig& c) {
  using R = YamlReader;
  R::require_map(n, "setting");
  if (!n["kind"]) R::fail(n, "'setting' needs a 'kind'");
  const auto kind = R::scalar<std::string>(n["kind"], "kind");
  const std::size_t m = c.instance.types.size();
  if (kind == "stochastic") {
    R::allow_keys(n, "setting", {"kind", "q"});
    c.setting = SettingKind::stochastic;
    if (n["q"]) {
      c.q = R::sequence<double>(n["q"], "q");
      if (c.q.size() != m) R::fail(n["q"], "'q' needs one weight per type");
      try {
        TypeDistribution check(c.q);
      } catch (const std::invalid_argument& e) {
        R::fail(n["q"], e.what());
      }
    }
  } else if (kind == "adversarial") {
    R::allow_keys(n, "setting", {"kind", "sequence"});
    c.setting = SettingKind::adversarial;
    if (!n["sequence"]) R::fail(n, "adversarial setting needs a 'sequence'");
    const YAML::Node s = n["sequence"];
    R::require_map(s, "sequence");
    if (!s["kind"]) R::fail(s, "'sequence' needs a 'kind'");
    const auto sk = R::scalar<std::string>(s["kind"], "kind");
    auto& a = c.adversary;
    if (sk == "constant") {
      R::allow_keys(s, "sequence", {"kind", "type"});
      a.kind = AdversarySpec::Kind::constant;
      if (s["type"]) {
        const auto t = R::count(s["type"], "type");
        if (t >= m) R::fail(s["type"], "type " + std::to_string(t) + " out of range for " + std::to_string(m) + " types");
        a.type = static_cast<TypeIndex>(t);
      }
    } else if (sk == "periodic") {
      R::allow_keys(s, "sequence", {"kind", "pattern"});
      a.kind = AdversarySpec::Kind::periodic;
      if (!s["pattern"]) R::fail(s, "periodic sequence needs a 'pattern'");
      a.pattern = parse_types(s["pattern"], "pattern", m);
    } else if (sk == "block" || sk == "random") {
      R::allow_keys(s, "sequence", {"kind", "blocks", "order"});
      a.kind = sk == "block" ? AdversarySpec::Kind::block : AdversarySpec::Kind::random;
      if (s["blocks"]) {
        a.blocks = static_cast<std::size_t>(R::count(s["blocks"], "blocks"));
        if (a.blocks < 1) R::fail(s["blocks"], "'blocks' must be at least 1");
      }
      if (s["order"]) {
        if (sk == "random") R::fail(s["order"], "'order' applies to block sequences only");
        a.order = parse_types(s["order"], "order", m);
      }
    } else {
      R::fail(s["kind"], "unknown sequence kind '" + sk + "'");
    }
  } else {
    R::fail(n["kind"], "unknown setting kind '" + kind + "'");
  }
}

inline void parse_discretization(const YAML::Node& n, ExperimentConfig& c) {
  using R = YamlReader;
  R::require_map(n, "discretization");
  R::allow_keys(n, "discretization", {"scheme", "epsilon", "prune", "enumeration_cap"});
  if (n["scheme"]) {
    try {
      c.discretization.scheme = parse_scheme(R::scalar<std::string>(n["scheme"], "scheme"));
    } catch (const std::invalid_argument& e) {
      R::fail(n["scheme"], e.what());
    }
  }
  if (n["epsilon"]) {
    c.discretization.epsilon = R::optional_number(n["epsilon"], "epsilon", "auto");
    if (c.discretization.epsilon && *c.discretization.epsilon >= 1.0) R::fail(n["epsilon"], "'epsilon' must lie in (0,1)");
  }
  if (n["prune"]) c.discretization.prune = R::scalar<bool>(n["prune"], "prune");
  if (n["enumeration_cap"]) c.discretization.curve_cap = R::count(n["enumeration_cap"], "enumeration_cap");
}

inline void parse_run(const YAML::Node& n, ExperimentConfig& c) {
  using R = YamlReader;
  R::require_map(n, "run");
  R::allow_keys(n, "run", {"horizon", "seeds", "theta", "learner_seed_offset", "oracle_resolution"});
  if (n["horizon"]) c.run.horizon = R::count(n["horizon"], "horizon");
  if (n["seeds"]) {
    c.run.seeds.clear();
    for (const auto& s : n["seeds"]) c.run.seeds.push_back(R::count(s, "seeds"));
    if (c.run.seeds.empty()) R::fail(n["seeds"], "'seeds' must be non-empty");
  }
  if (n["theta"]) c.run.theta = R::optional_number(n["theta"], "theta", "auto");
  if (n["learner_seed_offset"]) c.run.learner_seed_offset = R::count(n["learner_seed_offset"], "learner_seed_offset");
  if (n["oracle_resolution"]) {
    c.run.oracle_resolution = R::positive(n["oracle_resolution"], "oracle_resolution");
    if (c.run.oracle_resolution > 1.0) R::fail(n["oracle_resolution"], "'oracle_resolution' must be at most 1");
  }
}

inline void parse_sweep(const YAML::Node& n, ExperimentConfig& c) {
  using R = YamlReader;
  R::require_map(n, "sweep");
  R::allow_keys(n, "sweep", {"horizons", "seeds"});
  if (n["horizons"]) {
    for (const auto& h : n["horizons"]) c.sweep.horizons.push_back(R::count(h, "horizons"));
  }
  if (n["seeds"]) {
    for (const auto& s : n["seeds"]) c.sweep.seeds.push_back(R::count(s, "seeds"));
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const YAML::Node& root) {
  using R = detail::YamlReader;
  if (!root || root.IsNull()) throw ConfigError(0, "empty config");
  R::require_map(root, "config");
  R::allow_keys(root, "config", {"schema_version", "instance", "setting", "discretization", "run", "sweep", "output"});
  ExperimentConfig c;
  if (!root["schema_version"]) R::fail(root, "missing 'schema_version'");
  c.schema_version = R::scalar<int>(root["schema_version"], "schema_version");
  if (c.schema_version != kSchemaVersion) {
    R::fail(root["schema_version"], "unsupported schema_version " + std::to_string(c.schema_version) + " (expected " +
                                        std::to_string(kSchemaVersion) + ")");
  }
  if (!root["instance"]) R::fail(root, "missing 'instance'");
  detail::parse_instance(root["instance"], c);
  if (root["setting"]) detail::parse_setting(root["setting"], c);
  if (root["discretization"]) detail::parse_discretization(root["discretization"], c);
  if (root["run"]) detail::parse_run(root["run"], c);
  if (root["sweep"]) detail::parse_sweep(root["sweep"], c);
  if (root["output"]) {
    const YAML::Node o = root["output"];
    R::require_map(o, "output");
    R::allow_keys(o, "output", {"dir"});
    if (o["dir"]) c.output_dir = R::scalar<std::string>(o["dir"], "dir");
  }
  return c;
}

inline ExperimentConfig load_config_string(const std::string& text) {
  try {
    return parse_config(YAML::Load(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.mark.line + 1, e.msg);
  }
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_string(ss.str());
}

}  // namespace datapricing
