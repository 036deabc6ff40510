#include "chfem/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace chfem {

namespace {

const std::vector<std::string> kScenarios{"manufactured", "selfsimilar",           "lubrication",
                                          "spinodal",     "ostwald",               "electrowetting_translate",
                                          "electrowetting_split"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw std::invalid_argument("config: " + key + " = '" + value + "': " + what);
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "not a number");
  }
  if (!std::isfinite(out)) {
    bad_value(key, v, "not finite");
  }
  return out;
}

long to_integer(const std::string& key, const std::string& v) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "not an integer");
  }
  return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "not an unsigned integer");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    return false;
  }
  bad_value(key, v, "not a boolean");
}

ErrorReference to_error_reference(const std::string& key, const std::string& v) {
  if (v == "exact") {
    return ErrorReference::exact;
  }
  if (v == "interpolant") {
    return ErrorReference::interpolant;
  }
  bad_value(key, v, "expected exact or interpolant");
}

template <class F>
auto wrap(const std::string& key, const std::string& v, F&& f) {
  try {
    return f(v);
  } catch (const std::invalid_argument& e) {
    bad_value(key, v, e.what());
  }
}

struct Key {
  std::string name;
  std::string section;
  /// Scenarios the key applies to; empty = all.
  std::vector<std::string> scenarios;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string&)> set;

  bool applies(const std::string& scenario) const {
    return scenarios.empty() || std::find(scenarios.begin(), scenarios.end(), scenario) != scenarios.end();
  }
};

#define REAL_KEY(field, section, ...)                                                   \
  Key {                                                                                 \
    #field, section, __VA_ARGS__, [](const ScenarioConfig& c) { return format_real(c.field); }, \
        [](ScenarioConfig& c, const std::string& v) { c.field = to_real(#field, v); }   \
  }

const std::vector<Key>& keys() {
  static const std::vector<std::string> wetting{"electrowetting_translate", "electrowetting_split"};
  static const std::vector<std::string> phase{"spinodal", "ostwald"};
  static const std::vector<std::string> exact{"manufactured", "selfsimilar"};
  static const std::vector<Key> table{
      Key{"scenario", "scenario", {}, [](const ScenarioConfig& c) { return c.scenario; },
          [](ScenarioConfig& c, const std::string& v) { c.scenario = v; }},
      Key{"nx", "mesh", {}, [](const ScenarioConfig& c) { return std::to_string(c.nx); },
          [](ScenarioConfig& c, const std::string& v) { c.nx = to_integer("nx", v); }},
      Key{"ny", "mesh", {}, [](const ScenarioConfig& c) { return std::to_string(c.ny); },
          [](ScenarioConfig& c, const std::string& v) { c.ny = to_integer("ny", v); }},
      Key{"degree", "mesh", {}, [](const ScenarioConfig& c) { return std::to_string(c.degree); },
          [](ScenarioConfig& c, const std::string& v) { c.degree = static_cast<int>(to_integer("degree", v)); }},
      Key{"xmin", "mesh", {}, [](const ScenarioConfig& c) { return format_real(c.domain.xmin); },
          [](ScenarioConfig& c, const std::string& v) { c.domain.xmin = to_real("xmin", v); }},
      Key{"xmax", "mesh", {}, [](const ScenarioConfig& c) { return format_real(c.domain.xmax); },
          [](ScenarioConfig& c, const std::string& v) { c.domain.xmax = to_real("xmax", v); }},
      Key{"ymin", "mesh", {}, [](const ScenarioConfig& c) { return format_real(c.domain.ymin); },
          [](ScenarioConfig& c, const std::string& v) { c.domain.ymin = to_real("ymin", v); }},
      Key{"ymax", "mesh", {}, [](const ScenarioConfig& c) { return format_real(c.domain.ymax); },
          [](ScenarioConfig& c, const std::string& v) { c.domain.ymax = to_real("ymax", v); }},
      REAL_KEY(dt, "time", {}),
      REAL_KEY(t_end, "time", {}),
      Key{"stepper", "time", {}, [](const ScenarioConfig& c) { return to_string(c.stepper); },
          [](ScenarioConfig& c, const std::string& v) { c.stepper = wrap("stepper", v, parse_stepper_kind); }},
      Key{"solver", "solver", {}, [](const ScenarioConfig& c) { return to_string(c.solver); },
          [](ScenarioConfig& c, const std::string& v) { c.solver = wrap("solver", v, parse_solver_method); }},
      Key{"clamp_mobility", "solver", {},
          [](const ScenarioConfig& c) { return std::string(c.clamp_mobility ? "true" : "false"); },
          [](ScenarioConfig& c, const std::string& v) { c.clamp_mobility = to_bool("clamp_mobility", v); }},
      REAL_KEY(newton_tolerance, "solver", {}),
      Key{"newton_max_iterations", "solver", {},
          [](const ScenarioConfig& c) { return std::to_string(c.newton_max_iterations); },
          [](ScenarioConfig& c, const std::string& v) {
            c.newton_max_iterations = static_cast<int>(to_integer("newton_max_iterations", v));
          }},
      Key{"bc", "model", {}, [](const ScenarioConfig& c) { return to_string(c.bc); },
          [](ScenarioConfig& c, const std::string& v) { c.bc = wrap("bc", v, parse_bc_kind); }},
      REAL_KEY(gamma, "model", {"manufactured"}),
      REAL_KEY(alpha, "model", {"manufactured"}),
      REAL_KEY(L, "model", {"selfsimilar"}),
      REAL_KEY(t0, "model", {"selfsimilar"}),
      REAL_KEY(eps, "model", {"spinodal", "ostwald", "electrowetting_translate", "electrowetting_split"}),
      REAL_KEY(lambda, "model", wetting),
      REAL_KEY(delta, "model", {"lubrication"}),
      REAL_KEY(sigma, "model", {"lubrication"}),
      REAL_KEY(C, "model", {"lubrication"}),
      REAL_KEY(xi, "model", {"lubrication"}),
      REAL_KEY(mean, "model", phase),
      Key{"seed", "model", phase, [](const ScenarioConfig& c) { return std::to_string(c.seed); },
          [](ScenarioConfig& c, const std::string& v) { c.seed = to_unsigned("seed", v); }},
      Key{"out_dir", "output", {}, [](const ScenarioConfig& c) { return c.out_dir.string(); },
          [](ScenarioConfig& c, const std::string& v) { c.out_dir = v; }},
      Key{"snapshot_every", "output", {}, [](const ScenarioConfig& c) { return std::to_string(c.snapshot_every); },
          [](ScenarioConfig& c, const std::string& v) {
            const long k = to_integer("snapshot_every", v);
            if (k < 0) {
              bad_value("snapshot_every", v, "must be >= 0");
            }
            c.snapshot_every = static_cast<std::size_t>(k);
          }},
      Key{"snapshot_format", "output", {}, [](const ScenarioConfig& c) { return to_string(c.snapshot_format); },
          [](ScenarioConfig& c, const std::string& v) {
            c.snapshot_format = wrap("snapshot_format", v, parse_snapshot_format);
          }},
      Key{"error_reference", "output", exact,
          [](const ScenarioConfig& c) {
            return std::string(c.error_reference == ErrorReference::exact ? "exact" : "interpolant");
          },
          [](ScenarioConfig& c, const std::string& v) { c.error_reference = to_error_reference("error_reference", v); }},
  };
  return table;
}

#undef REAL_KEY

const Key& find_key(const std::string& name) {
  for (const auto& k : keys()) {
    if (k.name == name) {
      return k;
    }
  }
  throw std::invalid_argument("config: unknown key '" + name + "'");
}

}  // namespace

std::vector<std::string> scenario_names() { return kScenarios; }

ScenarioConfig preset(const std::string& scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  if (scenario == "manufactured" || scenario == "selfsimilar") {
    c.domain = Rect{-0.5, 0.5, -0.5, 0.5};
    c.nx = c.ny = 25;
    c.degree = 1;
    c.bc = BcKind::dirichlet;
    if (scenario == "manufactured") {
      c.dt = 1e-5;
      c.t_end = 1e-3;
      c.gamma = 1e-4;
    } else {
      c.gamma = 1.0;
      c.dt = 1e-8;
      c.t_end = c.t0 + 100 * c.dt;
    }
  } else if (scenario == "lubrication") {
    c.gamma = 1.0;
    c.dt = 1e-5;
    c.t_end = 5e-3;
  } else if (scenario == "spinodal" || scenario == "ostwald") {
    c.domain = Rect{0.0, 1.0, 0.0, 1.0};
    c.nx = c.ny = 64;
    c.degree = 2;
    c.gamma = 1.0;
    c.dt = 1e-6;
    c.t_end = 5e-4;
    c.eps = 0.03;
    c.mean = scenario == "ostwald" ? 0.4 : 0.0;
    // 1 - u^2 turns negative once the interfaces overshoot |u| = 1
    c.clamp_mobility = true;
  } else if (scenario == "electrowetting_translate" || scenario == "electrowetting_split") {
    c.nx = 47;
    c.ny = 94;
    c.eps = 0.0427;
    c.gamma = c.eps * c.eps;
    c.dt = 1e-3;
    if (scenario == "electrowetting_translate") {
      c.lambda = 0.75;
      c.t_end = 0.1;
    } else {
      c.lambda = 2.0;
      c.t_end = 0.018;
    }
  } else {
    throw std::invalid_argument("unknown scenario '" + scenario + "'");
  }
  c.out_dir = std::filesystem::path("out") / scenario;
  return c;
}

ConfigValues parse_config_text(const std::string& text) {
  ConfigValues values;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  const auto fail = [&](const std::string& what) {
    throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        fail("unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> sections{"scenario", "mesh", "time", "solver", "model", "output"};
      if (!sections.count(section)) {
        fail("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail("expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      fail("empty key");
    }
    if (section == "scenario" && key == "name") {
      key = "scenario";
    }
    const Key* k = nullptr;
    try {
      k = &find_key(key);
    } catch (const std::invalid_argument&) {
      fail("unknown key '" + key + "'");
    }
    if (!section.empty() && k->section != section) {
      fail("key '" + key + "' belongs to section [" + k->section + "], not [" + section + "]");
    }
    if (values.count(key)) {
      fail("duplicate key '" + key + "'");
    }
    values[key] = value;
  }
  return values;
}

ConfigValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot read config file '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

ScenarioConfig apply_overrides(ScenarioConfig c, const ConfigValues& overrides) {
  if (auto it = overrides.find("scenario"); it != overrides.end() && it->second != c.scenario) {
    throw std::invalid_argument("config: cannot change scenario of a resolved config");
  }
  for (const auto& [name, value] : overrides) {
    if (name == "scenario") {
      continue;
    }
    const Key& k = find_key(name);
    if (!k.applies(c.scenario)) {
      throw std::invalid_argument("config: key '" + name + "' does not apply to scenario " + c.scenario);
    }
    k.set(c, value);
  }
  if (c.scenario == "electrowetting_translate" || c.scenario == "electrowetting_split") {
    c.gamma = c.eps * c.eps;
  }
  validate(c);
  return c;
}

ScenarioConfig resolve_config(const ConfigValues& values) {
  const auto it = values.find("scenario");
  return apply_overrides(preset(it == values.end() ? "lubrication" : it->second), values);
}

void validate(const ScenarioConfig& c) {
  if (std::find(kScenarios.begin(), kScenarios.end(), c.scenario) == kScenarios.end()) {
    throw std::invalid_argument("unknown scenario '" + c.scenario + "'");
  }
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) {
      throw std::invalid_argument("config: " + what);
    }
  };
  require(c.nx >= 1 && c.ny >= 1, "nx and ny must be >= 1");
  require(c.degree == 1 || c.degree == 2, "degree must be 1 or 2");
  require(c.domain.xmax > c.domain.xmin && c.domain.ymax > c.domain.ymin, "domain must have positive extent");
  require(c.dt > 0.0, "dt must be positive");
  require(c.t_end >= c.t_start(), "t_end must not precede the start time");
  require(c.newton_tolerance > 0.0 && c.newton_max_iterations >= 1, "invalid Newton settings");
  const bool exact = c.scenario == "manufactured" || c.scenario == "selfsimilar";
  require(exact || c.bc == BcKind::noflux, "scenario " + c.scenario + " supports only noflux boundaries");
  if (c.scenario == "manufactured") {
    require(c.gamma > 0.0, "gamma must be positive");
  }
  if (c.scenario == "selfsimilar") {
    require(c.L > 0.0 && c.t0 > 0.0, "L and t0 must be positive");
  }
  if (c.scenario == "lubrication") {
    require(c.delta >= 0.0 && c.sigma > 0.0 && c.xi >= 0.0, "delta, xi >= 0 and sigma > 0 required");
  }
  if (c.scenario != "manufactured" && c.scenario != "selfsimilar" && c.scenario != "lubrication") {
    require(c.eps > 0.0, "eps must be positive");
  }
  if (c.scenario == "spinodal" || c.scenario == "ostwald") {
    require(c.mean >= -1.0 && c.mean <= 1.0, "mean must lie in [-1, 1]");
  }
  steps_for(c.t_start(), c.t_end, c.dt);
}

std::string to_text(const ScenarioConfig& c) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : keys()) {
    if (!k.applies(c.scenario)) {
      continue;
    }
    if (k.section != section) {
      section = k.section;
      out << (out.tellp() > 0 ? "\n" : "") << '[' << section << "]\n";
    }
    out << k.name << " = " << k.get(c) << '\n';
  }
  return out.str();
}

}  // namespace chfem
