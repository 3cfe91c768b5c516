#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "omo/core.hpp"
#include "omo/domain.hpp"
#include "omo/equilibrium.hpp"
#include "omo/integral.hpp"
#include "omo/learners.hpp"
#include "omo/networks.hpp"
#include "omo/ome.hpp"

namespace omo {

/// Fully resolved experiment configuration. Parsed from flat
/// `key = value` text with `[section]` headers and `#` comments; every key
/// is validated before any computation happens and unknown keys are
/// rejected with file:line positions. `eta`, `gamma` accept the literal
/// `auto` (encoded as <= 0 here).
struct ExperimentConfig {
  // [experiment]
  GameFamily family = GameFamily::MLN;
  int n_firms = 5;
  int controls_per_firm = 2;
  int pool_size = 10;
  long rounds = 1000;
  std::uint64_t seed = 0;
  // [domain]
  std::string domain_kind = "box";
  double box_lower = 0.0;
  double box_upper = 1.0;
  double ball_radius = 1.0;
  // [learner]
  Algo algo = Algo::OMoMD;
  double eta = 0.0;  // <= 0: tuned from radius/Lipschitz/horizon
  RegularizerKind regularizer = RegularizerKind::EuclideanHalfSq;
  // [quadrature]
  QuadKind rule_kind = QuadKind::GaussLegendre;
  int quad_nodes = 16;
  // [solver]
  double gamma = 0.0;  // <= 0: 0.5 / Lipschitz bound
  double tol = 1e-8;
  long max_iter = 1000000;
  // [networks]
  double delta = 0.05;
  ParamRanges ranges;
  // [output]
  std::string out_dir = "out";

  static ExperimentConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse(in, path);
  }

  static ExperimentConfig parse(std::istream& in, const std::string& name);

  void validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (n_firms < 1) fail("n_firms must be at least 1");
    if (controls_per_firm < 1) fail("controls_per_firm must be at least 1");
    if (pool_size < 1) fail("pool_size must be at least 1");
    if (rounds < 1) fail("T must be at least 1");
    if (domain_kind != "box" && domain_kind != "ball" && domain_kind != "simplex")
      fail("domain must be box, ball or simplex");
    if (domain_kind == "box" && !(box_lower < box_upper))
      fail("box_lower must be below box_upper");
    if (domain_kind == "ball" && !(ball_radius > 0.0)) fail("ball_radius must be positive");
    if (eta > 0.0 && !std::isfinite(eta)) fail("eta must be finite or auto");
    if (regularizer == RegularizerKind::NegativeEntropy && domain_kind != "simplex")
      fail("regularizer entropy pairs only with domain simplex");
    if (quad_nodes < 2) fail("quadrature nodes must be at least 2");
    if (gamma > 0.0 && !std::isfinite(gamma)) fail("gamma must be finite or auto");
    if (!(tol > 0.0)) fail("solver tol must be positive");
    if (max_iter < 1) fail("solver max_iter must be at least 1");
    if (!std::isfinite(delta)) fail("delta must be finite");
    if (ranges.d_min > ranges.d_max || ranges.k_min > ranges.k_max || ranges.b_min > ranges.b_max)
      fail("parameter range is empty");
    if (out_dir.empty()) fail("output dir must not be empty");
  }

  Index dim() const { return static_cast<Index>(n_firms) * controls_per_firm; }

  Domain make_domain() const {
    if (domain_kind == "ball") return Domain::ball(Vector::Zero(dim()), ball_radius);
    if (domain_kind == "simplex") return Domain::simplex(dim());
    return Domain::cube(dim(), box_lower, box_upper);
  }

  NetworkSpec network_spec() const {
    NetworkSpec s;
    s.family = family;
    s.n_firms = n_firms;
    s.controls_per_firm = controls_per_firm;
    s.ranges = ranges;
    s.delta = delta;
    s.seed = seed;
    return s;
  }

  SolverConfig solver_config() const { return SolverConfig{gamma, tol, max_iter}; }

  LearnerConfig learner_config() const { return LearnerConfig{algo, eta, regularizer}; }

  QuadratureRule quadrature() const {
    return rule_kind == QuadKind::GaussLegendre ? QuadratureRule::gauss_legendre(quad_nodes)
                                                : QuadratureRule::composite_trapezoid(quad_nodes);
  }

  /// Every resolved key, defaults included, for the run metadata file.
  std::vector<std::pair<std::string, std::string>> metadata_entries() const {
    auto num = [](double v) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      return std::string(buf);
    };
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("experiment.family", to_string(family));
    kv.emplace_back("experiment.n_firms", std::to_string(n_firms));
    kv.emplace_back("experiment.controls_per_firm", std::to_string(controls_per_firm));
    kv.emplace_back("experiment.pool_size", std::to_string(pool_size));
    kv.emplace_back("experiment.T", std::to_string(rounds));
    kv.emplace_back("experiment.seed", std::to_string(seed));
    kv.emplace_back("domain.domain", domain_kind);
    if (domain_kind == "box") {
      kv.emplace_back("domain.box_lower", num(box_lower));
      kv.emplace_back("domain.box_upper", num(box_upper));
    }
    if (domain_kind == "ball") kv.emplace_back("domain.ball_radius", num(ball_radius));
    kv.emplace_back("learner.algo", to_string(algo));
    kv.emplace_back("learner.eta", eta > 0.0 ? num(eta) : "auto");
    kv.emplace_back("learner.regularizer", to_string(regularizer));
    kv.emplace_back("quadrature.rule",
                    rule_kind == QuadKind::GaussLegendre ? "gauss_legendre" : "trapezoid");
    kv.emplace_back("quadrature.nodes", std::to_string(quad_nodes));
    kv.emplace_back("solver.gamma", gamma > 0.0 ? num(gamma) : "auto");
    kv.emplace_back("solver.tol", num(tol));
    kv.emplace_back("solver.max_iter", std::to_string(max_iter));
    kv.emplace_back("networks.delta", num(delta));
    kv.emplace_back("networks.d_min", num(ranges.d_min));
    kv.emplace_back("networks.d_max", num(ranges.d_max));
    kv.emplace_back("networks.k_min", num(ranges.k_min));
    kv.emplace_back("networks.k_max", num(ranges.k_max));
    kv.emplace_back("networks.b_min", num(ranges.b_min));
    kv.emplace_back("networks.b_max", num(ranges.b_max));
    kv.emplace_back("output.dir", out_dir);
    return kv;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_long(const std::string& s, long& out) {
  try {
    std::size_t pos = 0;
    out = std::stol(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

inline bool parse_u64(const std::string& s, std::uint64_t& out) {
  try {
    std::size_t pos = 0;
    out = std::stoull(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

inline bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& name) {
  ExperimentConfig cfg;
  bool firms_explicit = false;
  bool controls_explicit = false;
  std::string section;
  std::string line;
  int lineno = 0;

  auto err = [&name, &lineno](const std::string& msg) -> ConfigError {
    return ConfigError(name + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string s = detail::trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw err("unterminated section header");
      section = detail::trim(s.substr(1, s.size() - 2));
      if (section != "experiment" && section != "domain" && section != "learner" &&
          section != "quadrature" && section != "solver" && section != "networks" &&
          section != "output")
        throw err("unknown section '" + section + "'");
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw err("expected key = value");
    std::string key = detail::trim(s.substr(0, eq));
    std::string value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw err("empty key");
    if (value.empty()) throw err("empty value for '" + key + "'");
    if (section.empty()) throw err("key '" + key + "' appears before any [section]");
    const std::string full = section + "." + key;

    auto want_long = [&](long lo) {
      long v = 0;
      if (!detail::parse_long(value, v) || v < lo)
        throw err("'" + full + "' expects an integer >= " + std::to_string(lo));
      return v;
    };
    auto want_double = [&]() {
      double v = 0.0;
      if (!detail::parse_double(value, v)) throw err("'" + full + "' expects a number");
      return v;
    };
    auto want_auto_or_positive = [&]() {
      if (value == "auto") return 0.0;
      double v = 0.0;
      if (!detail::parse_double(value, v) || !(v > 0.0))
        throw err("'" + full + "' expects 'auto' or a positive number");
      return v;
    };

    if (full == "experiment.family") {
      if (value == "mln")
        cfg.family = GameFamily::MLN;
      else if (value == "supply_chain")
        cfg.family = GameFamily::SupplyChain;
      else
        throw err("family must be mln or supply_chain");
      // Family picks the shape defaults unless the keys were set explicitly.
      if (!firms_explicit) cfg.n_firms = cfg.family == GameFamily::MLN ? 5 : 3;
      if (!controls_explicit) cfg.controls_per_firm = cfg.family == GameFamily::MLN ? 2 : 4;
    } else if (full == "experiment.n_firms") {
      cfg.n_firms = static_cast<int>(want_long(1));
      firms_explicit = true;
    } else if (full == "experiment.controls_per_firm") {
      cfg.controls_per_firm = static_cast<int>(want_long(1));
      controls_explicit = true;
    } else if (full == "experiment.pool_size") {
      cfg.pool_size = static_cast<int>(want_long(1));
    } else if (full == "experiment.T") {
      long v = 0;
      if (!detail::parse_long(value, v) || v < 0) throw err("'experiment.T' expects an integer >= 0");
      cfg.rounds = v;  // 0 is parseable; validate() rejects it before any work
    } else if (full == "experiment.seed") {
      std::uint64_t v = 0;
      if (!detail::parse_u64(value, v)) throw err("'experiment.seed' expects an unsigned integer");
      cfg.seed = v;
    } else if (full == "domain.domain") {
      if (value != "box" && value != "ball" && value != "simplex")
        throw err("domain must be box, ball or simplex");
      cfg.domain_kind = value;
    } else if (full == "domain.box_lower") {
      cfg.box_lower = want_double();
    } else if (full == "domain.box_upper") {
      cfg.box_upper = want_double();
    } else if (full == "domain.ball_radius") {
      cfg.ball_radius = want_double();
    } else if (full == "learner.algo") {
      if (value == "omod")
        cfg.algo = Algo::OMoD;
      else if (value == "omomd")
        cfg.algo = Algo::OMoMD;
      else
        throw err("algo must be omod or omomd");
    } else if (full == "learner.eta") {
      cfg.eta = want_auto_or_positive();
    } else if (full == "learner.regularizer") {
      if (value == "euclidean")
        cfg.regularizer = RegularizerKind::EuclideanHalfSq;
      else if (value == "entropy")
        cfg.regularizer = RegularizerKind::NegativeEntropy;
      else
        throw err("regularizer must be euclidean or entropy");
    } else if (full == "quadrature.rule") {
      if (value == "gauss_legendre")
        cfg.rule_kind = QuadKind::GaussLegendre;
      else if (value == "trapezoid")
        cfg.rule_kind = QuadKind::CompositeTrapezoid;
      else
        throw err("rule must be gauss_legendre or trapezoid");
    } else if (full == "quadrature.nodes") {
      cfg.quad_nodes = static_cast<int>(want_long(2));
    } else if (full == "solver.gamma") {
      cfg.gamma = want_auto_or_positive();
    } else if (full == "solver.tol") {
      double v = want_double();
      if (!(v > 0.0)) throw err("solver tol must be positive");
      cfg.tol = v;
    } else if (full == "solver.max_iter") {
      cfg.max_iter = want_long(1);
    } else if (full == "networks.delta") {
      cfg.delta = want_double();
    } else if (full == "networks.d_min") {
      cfg.ranges.d_min = want_double();
    } else if (full == "networks.d_max") {
      cfg.ranges.d_max = want_double();
    } else if (full == "networks.k_min") {
      cfg.ranges.k_min = want_double();
    } else if (full == "networks.k_max") {
      cfg.ranges.k_max = want_double();
    } else if (full == "networks.b_min") {
      cfg.ranges.b_min = want_double();
    } else if (full == "networks.b_max") {
      cfg.ranges.b_max = want_double();
    } else if (full == "output.dir") {
      cfg.out_dir = value;
    } else {
      throw err("unknown key '" + full + "'");
    }
  }
  return cfg;
}

}  // namespace omo
