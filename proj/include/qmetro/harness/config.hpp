// Copyright 2026 The qmetro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qmetro/bounds.hpp"
#include "qmetro/error.hpp"
#include "qmetro/families.hpp"

/// Run configuration for the batch front-end.
///
/// A config is an INI file with one level of sections:
///
///   [run]        scheme, tol, epsilon, step, oracle, symmetry_tol, output
///   [family]     name, d, alpha, alpha_im, nu, gamma, n_photons
///   [family_a]   \ the two families of a compare run
///   [family_b]   /
///   [sweep]      parameter, from, to, steps, spacing, match_n_total
///   [compare]    match, anchor
namespace qmetro::harness {

enum class Command { bound, validate, sweep, compare };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::bound: return "bound";
    case Command::validate: return "validate";
    case Command::sweep: return "sweep";
    case Command::compare: return "compare";
  }
  return "unknown";
}

inline Command command_from_string(const std::string& name) {
  for (Command c : {Command::bound, Command::validate, Command::sweep,
                    Command::compare}) {
    if (name == to_string(c)) return c;
  }
  fail(ErrorKind::config, "unknown command '" + name + "'");
}

enum class Spacing { linear, log };

struct SweepAxis {
  std::string parameter;
  double from = 0.0;
  double to = 0.0;
  int steps = 1;
  Spacing spacing = Spacing::linear;
  std::optional<double> match_n_total;

  /// Axis values in order; integer parameters are rounded.
  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
      const double t = steps == 1 ? 0.0 : static_cast<double>(k) / (steps - 1);
      double v = spacing == Spacing::linear
                     ? from + t * (to - from)
                     : std::exp(std::log(from) + t * (std::log(to) - std::log(from)));
      if (k == steps - 1 && steps > 1) v = to;
      if (is_integer_parameter()) v = std::round(v);
      out.push_back(v);
    }
    return out;
  }

  bool is_integer_parameter() const {
    return parameter == "d" || parameter == "n_photons";
  }
};

struct CompareRule {
  std::string match = "n_total";
  char anchor = 'b';
};

struct RunConfig {
  Command command = Command::bound;
  std::vector<FamilySpec> families;
  std::optional<Scheme> scheme;
  std::optional<SweepAxis> sweep;
  std::optional<CompareRule> compare;
  double tol = 1e-9;
  double epsilon = kDefaultEpsilon;
  double step = kDefaultStep;
  double symmetry_tol = kDefaultSymmetryTol;
  bool oracle = false;
  std::optional<std::string> output;

  Scheme scheme_for(const FamilySpec& spec) const {
    return scheme.value_or(natural_scheme(spec.family));
  }
};

/// Sets one family parameter from a sweep value.
inline void set_parameter(FamilySpec& spec, const std::string& name, double value) {
  if (name == "alpha") {
    const double phase = spec.alpha && std::abs(*spec.alpha) > 0.0
                             ? std::arg(*spec.alpha)
                             : 0.0;
    spec.alpha = std::polar(value, phase);
  } else if (name == "nu") {
    spec.nu = value;
  } else if (name == "gamma") {
    spec.gamma = GammaChoice::fixed(value);
  } else if (name == "n_photons") {
    spec.n_photons = static_cast<int>(value);
  } else if (name == "d") {
    spec.d = static_cast<int>(value);
  } else {
    fail(ErrorKind::config, "unknown sweep parameter '" + name + "'");
  }
}

namespace detail {

using boost::property_tree::ptree;

inline void check_keys(const ptree& section, const std::string& name,
                       const std::set<std::string>& allowed) {
  for (const auto& [key, value] : section) {
    if (!allowed.contains(key)) {
      fail(ErrorKind::config, "unknown key '" + key + "' in [" + name + "]");
    }
  }
}

inline double to_real(const std::string& text, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::config, "parameter '" + field + "' is not a number: '" +
                                text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    fail(ErrorKind::config, "parameter '" + field + "' is not a finite number: '" +
                                text + "'");
  }
  return v;
}

inline int to_int(const std::string& text, const std::string& field) {
  const double v = to_real(text, field);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    fail(ErrorKind::config, "parameter '" + field + "' must be an integer");
  }
  return static_cast<int>(v);
}

inline std::optional<std::string> get(const ptree& section, const std::string& key) {
  if (auto v = section.get_optional<std::string>(key)) return *v;
  return std::nullopt;
}

inline FamilySpec parse_family(const ptree& section, const std::string& name) {
  check_keys(section, name,
             {"name", "d", "alpha", "alpha_im", "nu", "gamma", "n_photons"});
  FamilySpec spec;
  const auto family = get(section, "name");
  if (!family) fail(ErrorKind::config, "[" + name + "] requires 'name'");
  spec.family = family_from_string(*family);
  if (auto v = get(section, "d")) spec.d = to_int(*v, "d");
  const auto re = get(section, "alpha");
  const auto im = get(section, "alpha_im");
  if (re || im) {
    spec.alpha = Amplitude{re ? to_real(*re, "alpha") : 0.0,
                           im ? to_real(*im, "alpha_im") : 0.0};
  }
  if (auto v = get(section, "nu")) spec.nu = to_real(*v, "nu");
  if (auto v = get(section, "gamma")) {
    spec.gamma = *v == "auto" ? GammaChoice::automatic()
                              : GammaChoice::fixed(to_real(*v, "gamma"));
  }
  if (auto v = get(section, "n_photons")) spec.n_photons = to_int(*v, "n_photons");
  return spec;
}

inline bool to_bool(const std::string& text, const std::string& field) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(ErrorKind::config, "parameter '" + field + "' must be true or false");
}

}  // namespace detail

/// Parses and validates a config for the given command.
inline RunConfig parse_config(std::istream& in, Command command) {
  using detail::get;
  detail::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    fail(ErrorKind::config, std::string("malformed config: ") + e.what());
  }
  for (const auto& [name, section] : tree) {
    static const std::set<std::string> sections{
        "run", "family", "family_a", "family_b", "sweep", "compare"};
    if (!sections.contains(name)) {
      fail(ErrorKind::config, "unknown section [" + name + "]");
    }
    if (section.empty() && !section.data().empty()) {
      fail(ErrorKind::config, "key '" + name + "' outside of a section");
    }
  }

  RunConfig cfg;
  cfg.command = command;
  const detail::ptree empty;
  const auto& run = tree.get_child("run", empty);
  detail::check_keys(run, "run",
                     {"scheme", "tol", "epsilon", "step", "oracle",
                      "symmetry_tol", "output"});
  if (auto v = get(run, "scheme")) {
    if (*v == "parallel") {
      cfg.scheme = Scheme::parallel;
    } else if (*v == "imaging") {
      cfg.scheme = Scheme::imaging;
    } else {
      fail(ErrorKind::config, "parameter 'scheme' must be parallel or imaging");
    }
  }
  if (auto v = get(run, "tol")) cfg.tol = detail::to_real(*v, "tol");
  if (auto v = get(run, "epsilon")) cfg.epsilon = detail::to_real(*v, "epsilon");
  if (auto v = get(run, "step")) cfg.step = detail::to_real(*v, "step");
  if (auto v = get(run, "symmetry_tol")) {
    cfg.symmetry_tol = detail::to_real(*v, "symmetry_tol");
  }
  if (auto v = get(run, "oracle")) cfg.oracle = detail::to_bool(*v, "oracle");
  if (auto v = get(run, "output")) cfg.output = *v;
  if (!(cfg.tol > 0.0)) fail(ErrorKind::config, "parameter 'tol' must be > 0");
  if (!(cfg.step > 0.0 && cfg.step <= kMaxStep)) {
    fail(ErrorKind::config, "parameter 'step' must lie in (0, 1e-2]");
  }

  if (command == Command::compare) {
    for (const char* name : {"family_a", "family_b"}) {
      const auto section = tree.get_child_optional(name);
      if (!section) {
        fail(ErrorKind::config, std::string("compare requires [") + name + "]");
      }
      cfg.families.push_back(detail::parse_family(*section, name));
    }
    if (tree.get_child_optional("family")) {
      fail(ErrorKind::config, "compare uses [family_a] and [family_b], not [family]");
    }
    const auto section = tree.get_child_optional("compare");
    if (!section) fail(ErrorKind::config, "compare requires a [compare] section");
    detail::check_keys(*section, "compare", {"match", "anchor"});
    CompareRule rule;
    const auto match = get(*section, "match");
    if (!match) fail(ErrorKind::config, "[compare] requires 'match'");
    if (*match != "n_total") {
      fail(ErrorKind::config, "parameter 'match' supports only n_total");
    }
    rule.match = *match;
    if (auto v = get(*section, "anchor")) {
      if (*v != "a" && *v != "b") {
        fail(ErrorKind::config, "parameter 'anchor' must be a or b");
      }
      rule.anchor = (*v)[0];
    }
    cfg.compare = rule;
    if (cfg.families[0].d != cfg.families[1].d) {
      fail(ErrorKind::config, "compared families must share 'd'");
    }
  } else {
    const auto section = tree.get_child_optional("family");
    if (!section) fail(ErrorKind::config, "missing [family] section");
    cfg.families.push_back(detail::parse_family(*section, "family"));
    if (tree.get_child_optional("compare")) {
      fail(ErrorKind::config, "[compare] is only valid for compare runs");
    }
  }

  if (const auto section = tree.get_child_optional("sweep")) {
    if (command != Command::sweep && command != Command::compare) {
      fail(ErrorKind::config, "[sweep] is only valid for sweep and compare runs");
    }
    detail::check_keys(*section, "sweep",
                       {"parameter", "from", "to", "steps", "spacing",
                        "match_n_total"});
    SweepAxis axis;
    const auto param = get(*section, "parameter");
    const auto from = get(*section, "from");
    const auto to = get(*section, "to");
    const auto steps = get(*section, "steps");
    if (!param || !from || !to || !steps) {
      fail(ErrorKind::config, "[sweep] requires parameter, from, to and steps");
    }
    axis.parameter = *param;
    axis.from = detail::to_real(*from, "from");
    axis.to = detail::to_real(*to, "to");
    axis.steps = detail::to_int(*steps, "steps");
    if (auto v = get(*section, "spacing")) {
      if (*v == "linear") {
        axis.spacing = Spacing::linear;
      } else if (*v == "log") {
        axis.spacing = Spacing::log;
      } else {
        fail(ErrorKind::config, "parameter 'spacing' must be linear or log");
      }
    }
    if (auto v = get(*section, "match_n_total")) {
      axis.match_n_total = detail::to_real(*v, "match_n_total");
    }
    if (axis.steps < 1) fail(ErrorKind::config, "parameter 'steps' must be >= 1");
    if (axis.steps == 1 ? !(axis.from <= axis.to) : !(axis.from < axis.to)) {
      fail(ErrorKind::config, "parameter 'from' must be below 'to'");
    }
    if (axis.spacing == Spacing::log && !(axis.from > 0.0)) {
      fail(ErrorKind::config, "log spacing needs 'from' > 0");
    }
    // The swept parameter must exist for the family it drives.
    FamilySpec probe = cfg.families.front();
    const bool applicable =
        axis.parameter == "d" ||
        (axis.parameter == "alpha" && probe.alpha) ||
        (axis.parameter == "nu" && probe.nu) ||
        (axis.parameter == "gamma" && probe.gamma) ||
        (axis.parameter == "n_photons" && probe.n_photons);
    if (!applicable) {
      fail(ErrorKind::config, "sweep parameter '" + axis.parameter +
                                  "' does not apply to family " +
                                  std::string(to_string(probe.family)));
    }
    if (axis.match_n_total) {
      if (!probe.alpha) {
        fail(ErrorKind::config,
             "match_n_total needs a family with an 'alpha' parameter");
      }
      if (axis.parameter == "alpha") {
        fail(ErrorKind::config, "match_n_total cannot be combined with an alpha sweep");
      }
    }
    cfg.sweep = axis;
  } else if (command == Command::sweep) {
    fail(ErrorKind::config, "sweep requires a [sweep] section");
  }

  for (auto& spec : cfg.families) {
    spec.epsilon = cfg.epsilon;
    validate(spec);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path, Command command) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot open config '" + path + "'");
  return parse_config(in, command);
}

inline RunConfig parse_config_text(const std::string& text, Command command) {
  std::istringstream in(text);
  return parse_config(in, command);
}

}  // namespace qmetro::harness
