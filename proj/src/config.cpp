#include "ldv/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <set>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace ldv {

namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "n",         "m",           "distribution",         "urn_k",         "metric",
    "r",         "k",           "bias",                 "diverse",       "scheduler",
    "group_cap", "p_singleton", "opportunity_priority", "initial_state", "profiles_per_cell",
    "repetitions", "master_seed", "output_path",        "max_steps",     "threads",
    "trace_dir",
};

std::string scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected a scalar value");
  return node.Scalar();
}

template <class T>
T as(const YAML::Node& node, const std::string& key, std::string_view type_name) {
  if (!node.IsScalar()) throw ConfigError(key, fmt::format("expected {}", type_name));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, fmt::format("expected {}, got '{}'", type_name, node.Scalar()));
  }
}

int as_int(const YAML::Node& node, const std::string& key) { return as<int>(node, key, "an integer"); }

std::vector<int> int_list(const YAML::Node& node, const std::string& key) {
  std::vector<int> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(as_int(item, key));
  } else {
    out.push_back(as_int(node, key));
  }
  if (out.empty()) throw ConfigError(key, "list must not be empty");
  return out;
}

RadiusSpec parse_radius_spec(const std::string& text, const std::string& key) {
  if (text == "max") return {true, {}};
  try {
    return {false, Radius::parse(text)};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

template <class Fn>
auto parse_enum(const YAML::Node& node, const std::string& key, Fn fn) {
  const std::string text = scalar(node, key);
  try {
    return fn(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& what)
    : std::runtime_error(fmt::format("config key '{}': {}", key, what)), key_(std::move(key)) {}

std::string RadiusSpec::label() const { return is_max ? std::string("max") : to_string(value); }

KeepRule KeepRule::parse(std::string_view text) {
  KeepRule rule;
  std::string t;
  for (char c : text) {
    if (c != ' ') t.push_back(c);
  }
  const auto rpos = t.find('r');
  if (rpos == std::string::npos) {
    rule.offset = Radius::parse(t);
    return rule;
  }
  const std::string head = t.substr(0, rpos);
  if (head.empty()) {
    rule.scale = 1;
  } else {
    auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), rule.scale);
    if (ec != std::errc{} || ptr != head.data() + head.size() || rule.scale < 0) {
      throw std::invalid_argument(fmt::format("invalid keep rule '{}'", text));
    }
  }
  const std::string tail = t.substr(rpos + 1);
  if (!tail.empty()) {
    if (tail.front() != '+') throw std::invalid_argument(fmt::format("invalid keep rule '{}'", text));
    rule.offset = Radius::parse(tail.substr(1));
  }
  return rule;
}

Radius KeepRule::apply(Radius r) const {
  r = r.normalized();
  const Radius o = offset.normalized();
  return Radius{scale * r.num * o.den + o.num * r.den, r.den * o.den}.normalized();
}

std::string KeepRule::label() const {
  if (scale == 0) return to_string(offset);
  const std::string head = scale == 1 ? "r" : fmt::format("{}r", scale);
  return offset.num == 0 ? head : fmt::format("{}+{}", head, to_string(offset));
}

std::string_view to_string(InitialState s) { return s == InitialState::Truthful ? "truthful" : "random"; }

ExperimentConfig parse_config(std::string_view yaml_text, ConfigMode mode) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!root.IsMap()) throw ConfigError("<document>", "expected a key-value map");

  ExperimentConfig cfg;
  std::set<std::string> seen;
  for (const auto& entry : root) {
    const std::string key = entry.first.as<std::string>();
    const YAML::Node& v = entry.second;
    if (!kKnownKeys.contains(key)) throw ConfigError(key, "unknown key");
    seen.insert(key);

    if (key == "n") {
      cfg.n_values = int_list(v, key);
    } else if (key == "m") {
      cfg.m_values = int_list(v, key);
    } else if (key == "distribution") {
      cfg.distribution = parse_enum(v, key, parse_distribution);
    } else if (key == "urn_k") {
      cfg.urn_k = as_int(v, key);
    } else if (key == "metric") {
      cfg.metric = parse_enum(v, key, parse_metric);
    } else if (key == "r") {
      if (v.IsSequence()) {
        for (const auto& item : v) cfg.r_values.push_back(parse_radius_spec(scalar(item, key), key));
      } else {
        cfg.r_values.push_back(parse_radius_spec(scalar(v, key), key));
      }
      if (cfg.r_values.empty()) throw ConfigError(key, "list must not be empty");
    } else if (key == "k") {
      cfg.k = parse_enum(v, key, KeepRule::parse);
    } else if (key == "bias") {
      cfg.bias = parse_enum(v, key, parse_bias);
    } else if (key == "diverse") {
      cfg.diverse = as<bool>(v, key, "a boolean");
    } else if (key == "scheduler") {
      const std::string s = scalar(v, key);
      if (s == "singleton") {
        cfg.scheduler.kind = Scheduler::Kind::SingletonUniform;
      } else if (s == "group") {
        cfg.scheduler.kind = Scheduler::Kind::GroupRandom;
      } else {
        throw ConfigError(key, fmt::format("expected 'singleton' or 'group', got '{}'", s));
      }
    } else if (key == "group_cap") {
      cfg.scheduler.group_cap = as_int(v, key);
    } else if (key == "p_singleton") {
      cfg.scheduler.p_singleton = as<double>(v, key, "a number");
    } else if (key == "opportunity_priority") {
      cfg.scheduler.opportunity_priority = as<bool>(v, key, "a boolean");
    } else if (key == "initial_state") {
      const std::string s = scalar(v, key);
      if (s == "truthful") {
        cfg.initial_state = InitialState::Truthful;
      } else if (s == "random") {
        cfg.initial_state = InitialState::Random;
      } else {
        throw ConfigError(key, fmt::format("expected 'truthful' or 'random', got '{}'", s));
      }
    } else if (key == "profiles_per_cell") {
      cfg.profiles_per_cell = as_int(v, key);
    } else if (key == "repetitions") {
      cfg.repetitions = as_int(v, key);
    } else if (key == "master_seed") {
      cfg.master_seed = as<std::uint64_t>(v, key, "a nonnegative integer");
    } else if (key == "output_path") {
      cfg.output_path = scalar(v, key);
    } else if (key == "max_steps") {
      cfg.max_steps = as_int(v, key);
    } else if (key == "threads") {
      cfg.threads = as_int(v, key);
    } else if (key == "trace_dir") {
      cfg.trace_dir = scalar(v, key);
    }
  }

  if (mode == ConfigMode::Generated) {
    for (const char* key : {"n", "m", "distribution"}) {
      if (!seen.contains(key)) throw ConfigError(key, "required key is missing");
    }
  }
  if (!cfg.diverse && cfg.r_values.empty()) throw ConfigError("r", "required key is missing");
  if (cfg.diverse && !cfg.r_values.empty()) throw ConfigError("r", "diverse populations draw their own radii");
  if (cfg.urn_k != 2 && cfg.urn_k != 3) throw ConfigError("urn_k", "must be 2 or 3");
  if (cfg.profiles_per_cell < 1) throw ConfigError("profiles_per_cell", "must be at least 1");
  if (cfg.repetitions < 1) throw ConfigError("repetitions", "must be at least 1");
  if (cfg.max_steps && *cfg.max_steps < 1) throw ConfigError("max_steps", "must be at least 1");
  if (cfg.threads < 0) throw ConfigError("threads", "must be nonnegative");
  if (cfg.scheduler.group_cap < 0) throw ConfigError("group_cap", "must be nonnegative");
  if (cfg.scheduler.p_singleton < 0.0 || cfg.scheduler.p_singleton > 1.0) {
    throw ConfigError("p_singleton", "must lie in [0, 1]");
  }
  if (cfg.bias == Bias::None && cfg.k) throw ConfigError("k", "a keep radius needs bias 'truth' or 'lazy'");
  if (cfg.bias != Bias::None && !cfg.k) throw ConfigError("k", "biased voters need a keep radius");
  for (const RadiusSpec& r : cfg.r_values) {
    if (!r.is_max && cfg.metric != MetricKind::Multiplicative && !r.value.is_integer()) {
      throw ConfigError("r", fmt::format("{} radius must be an integer", to_string(cfg.metric)));
    }
  }
  for (int n : cfg.n_values) {
    if (n < 1) throw ConfigError("n", "must be at least 1");
  }
  for (int m : cfg.m_values) {
    if (m < 1) throw ConfigError("m", "must be at least 1");
  }
  for (int n : cfg.n_values) {
    for (int m : cfg.m_values) validate_for(cfg, n, m);
  }
  return cfg;
}

void validate_for(const ExperimentConfig& cfg, int n, int m) {
  if (cfg.distribution == Distribution::Riffle && m < 2) throw ConfigError("m", "riffle needs at least 2 candidates");
  if (!cfg.k) return;
  std::vector<Radius> radii;
  if (cfg.diverse) {
    radii = {Radius::integer(0), Radius::integer(n / m)};
  } else {
    for (const RadiusSpec& r : cfg.r_values) radii.push_back(r.resolve(n));
  }
  for (const Radius& r : radii) {
    const Radius k = cfg.k->apply(r);
    if (!(k > r)) {
      throw ConfigError("k", fmt::format("keep radius {} must exceed r = {}", to_string(k), to_string(r)));
    }
    if (cfg.metric != MetricKind::Multiplicative && !k.is_integer()) {
      throw ConfigError("k", fmt::format("{} keep radius must be an integer", to_string(cfg.metric)));
    }
  }
}

ExperimentConfig load_config(const std::string& path, ConfigMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<document>", fmt::format("cannot read '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), mode);
}

}  // namespace ldv
