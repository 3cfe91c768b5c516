// Command-line front end: `run` plays an adversarial equilibration
// experiment and writes trace.csv / metadata.txt / plot.svg; `verify` runs
// the self-check suite; `gen` writes a solved game pool; `integrate`
// evaluates one path integral. Exit codes: 0 success, 1 check or I/O
// failure, 2 configuration error, 3 solver non-convergence.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "omo/omo.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitSolverFailure = 3;

struct MapSpecError {
  std::size_t column;
  std::string message;
};

// Parses "v1,v2,..." into a vector, tracking the absolute column base for
// error reporting.
omo::Vector parse_vector(const std::string& text, std::size_t column_base) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                  : comma - pos);
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument("trailing characters");
      vals.push_back(v);
    } catch (...) {
      throw MapSpecError{column_base + pos + 1, "expected a number, got '" + tok + "'"};
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  omo::Vector out(static_cast<omo::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out[static_cast<omo::Index>(i)] = vals[i];
  return out;
}

// Parses "r1c1,r1c2|r2c1,r2c2|..." into a square matrix.
omo::Matrix parse_matrix(const std::string& text, std::size_t column_base) {
  std::vector<omo::Vector> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t bar = text.find('|', pos);
    std::string row = text.substr(pos, bar == std::string::npos ? std::string::npos : bar - pos);
    rows.push_back(parse_vector(row, column_base + pos));
    if (bar == std::string::npos) break;
    pos = bar + 1;
  }
  const auto n = static_cast<omo::Index>(rows.size());
  omo::Matrix m(n, n);
  for (omo::Index r = 0; r < n; ++r) {
    if (rows[static_cast<std::size_t>(r)].size() != n)
      throw MapSpecError{column_base + 1, "matrix rows must form a square"};
    m.row(r) = rows[static_cast<std::size_t>(r)];
  }
  return m;
}

// Map specs:
//   saddle | rotation2d
//   quadratic:Q=<matrix>;c=<vector>
//   affine:A=<matrix>;b=<vector>
//   network@<path>         (a file written by `gen` or write_network)
omo::MonotoneMap parse_map_spec(const std::string& spec) {
  if (spec == "saddle") return omo::MonotoneMap::saddle_game();
  if (spec == "rotation2d") return omo::MonotoneMap::rotation2d();
  if (spec.rfind("network@", 0) == 0) {
    std::string path = spec.substr(8);
    std::ifstream in(path);
    if (!in) throw MapSpecError{9, "cannot open network file '" + path + "'"};
    return omo::read_network(in);
  }
  auto parse_two_fields = [&spec](const std::string& head, const std::string& f1,
                                  const std::string& f2) {
    std::string body = spec.substr(head.size());
    std::size_t semi = body.find(';');
    if (semi == std::string::npos)
      throw MapSpecError{head.size() + 1, "expected '" + f1 + "=...;" + f2 + "=...'"};
    std::string first = body.substr(0, semi);
    std::string second = body.substr(semi + 1);
    if (first.rfind(f1 + "=", 0) != 0)
      throw MapSpecError{head.size() + 1, "expected '" + f1 + "='"};
    if (second.rfind(f2 + "=", 0) != 0)
      throw MapSpecError{head.size() + semi + 2, "expected '" + f2 + "='"};
    omo::Matrix m = parse_matrix(first.substr(f1.size() + 1), head.size() + f1.size() + 1);
    omo::Vector v = parse_vector(second.substr(f2.size() + 1),
                                 head.size() + semi + 1 + f2.size() + 1);
    return std::pair{m, v};
  };
  if (spec.rfind("quadratic:", 0) == 0) {
    auto [q, c] = parse_two_fields("quadratic:", "Q", "c");
    return omo::MonotoneMap::quadratic_gradient(q, c);
  }
  if (spec.rfind("affine:", 0) == 0) {
    auto [a, b] = parse_two_fields("affine:", "A", "b");
    return omo::MonotoneMap::affine_psd(a, b);
  }
  throw MapSpecError{1, "unknown map family '" + spec +
                            "' (expected saddle, rotation2d, quadratic:, affine:, network@)"};
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::string> out_dir) {
  omo::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = omo::ExperimentConfig::parse_file(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    cfg.validate();
  } catch (const omo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  try {
    omo::RunArtifacts art = omo::run_experiment(cfg);
    std::cout << "wrote " << art.trace_csv.string() << " (" << art.rounds << " rounds)\n";
    std::cout << "wrote " << art.metadata.string() << "\n";
    std::cout << "wrote " << art.plot_svg.string() << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", art.final_avg_regret_n);
    std::cout << "final avg regret_n = " << buf << "\n";
    return kExitOk;
  } catch (const omo::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
}

int cmd_verify(int quad_nodes, bool inject_nonmonotone) {
  omo::VerifyOptions opts;
  opts.quad_nodes = quad_nodes;
  opts.inject_nonmonotone = inject_nonmonotone;
  std::vector<omo::CheckResult> results;
  try {
    results = omo::run_verification(opts);
  } catch (const std::exception& e) {
    std::cerr << "verification aborted: " << e.what() << "\n";
    return kExitCheckFailure;
  }
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  int failures = 0;
  for (const auto& r : results) {
    failures += r.pass ? 0 : 1;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
              << std::string(width - r.name.size() + 2, ' ') << r.detail << "\n";
  }
  std::cout << results.size() - static_cast<std::size_t>(failures) << "/" << results.size()
            << " checks passed\n";
  return failures == 0 ? kExitOk : kExitCheckFailure;
}

int cmd_gen(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::string> out_dir) {
  omo::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = omo::ExperimentConfig::parse_file(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    cfg.validate();
  } catch (const omo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  try {
    const omo::Domain domain = cfg.make_domain();
    omo::VIPool pool = omo::gen_pool(cfg.network_spec(), cfg.pool_size, domain,
                                     cfg.solver_config());
    std::filesystem::create_directories(cfg.out_dir);
    std::filesystem::path pool_path = std::filesystem::path(cfg.out_dir) / "pool.txt";
    std::filesystem::path meta_path = std::filesystem::path(cfg.out_dir) / "pool_meta.txt";
    std::ofstream out(pool_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + pool_path.string());
    omo::write_pool(out, pool);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + pool_path.string());
    // One standalone file per network so `integrate --map network@<path>`
    // can consume individual entries.
    for (std::size_t i = 0; i < pool.entries.size(); ++i) {
      std::filesystem::path net_path =
          std::filesystem::path(cfg.out_dir) / ("network_" + std::to_string(i) + ".txt");
      std::ofstream net(net_path, std::ios::binary);
      if (!net) throw std::runtime_error("cannot write " + net_path.string());
      omo::write_network(net, pool.entries[i].map);
      net.flush();
      if (!net) throw std::runtime_error("failed writing " + net_path.string());
    }
    std::ofstream meta(meta_path, std::ios::binary);
    if (!meta) throw std::runtime_error("cannot write " + meta_path.string());
    for (const auto& [k, v] : cfg.metadata_entries()) meta << k << " = " << v << "\n";
    meta << "derived.domain = " << domain.describe() << "\n";
    meta << "derived.rng = splitmix64 counter streams; pool entry i uses derive(seed, i)\n";
    std::cout << "wrote " << pool_path.string() << " (" << pool.entries.size()
              << " entries)\n";
    std::cout << "wrote " << meta_path.string() << "\n";
    return kExitOk;
  } catch (const omo::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
}

int cmd_integrate(const std::string& map_spec, const std::string& from_text,
                  const std::string& to_text, const std::string& rule_name, int nodes) {
  try {
    omo::MonotoneMap map = parse_map_spec(map_spec);
    omo::Vector a = parse_vector(from_text, 0);
    omo::Vector b = parse_vector(to_text, 0);
    omo::QuadratureRule rule = rule_name == "trapezoid"
                                   ? omo::QuadratureRule::composite_trapezoid(nodes)
                                   : omo::QuadratureRule::gauss_legendre(nodes);
    double value = omo::line_integral(map, a, b, rule);
    double eps = omo::quad_error_estimate(map, a, b, rule);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    std::cout << "integral = " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.3g", eps);
    std::cout << "eps_q = " << buf << "\n";
    return kExitOk;
  } catch (const MapSpecError& e) {
    std::cerr << "map spec error at column " << e.column << ": " << e.message << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online monotone optimization toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;

  CLI::App* run = app.add_subcommand("run", "play an adversarial experiment, write artifacts");
  run->add_option("--config", config_path, "experiment config file");
  run->add_option("--seed", seed_override, "override the master seed");
  run->add_option("--out", out_override, "override the output directory");

  CLI::App* verify = app.add_subcommand("verify", "run the self-check suite");
  int verify_nodes = 16;
  bool inject = false;
  verify->add_option("--force-gl-nodes", verify_nodes,
                     "force the quadrature node count (fault-injection aid)");
  verify->add_flag("--inject-nonmonotone", inject,
                   "add a known non-monotone map to the audit (must be caught)");

  CLI::App* gen = app.add_subcommand("gen", "generate and solve a game pool, write pool files");
  gen->add_option("--config", config_path, "experiment config file");
  gen->add_option("--seed", seed_override, "override the master seed");
  gen->add_option("--out", out_override, "override the output directory");

  CLI::App* integrate = app.add_subcommand("integrate", "print one path integral");
  std::string map_spec, from_text, to_text;
  std::string rule_name = "gauss_legendre";
  int nodes = 16;
  integrate->add_option("--map", map_spec, "map spec, e.g. saddle or affine:A=...;b=...")
      ->required();
  integrate->add_option("--from", from_text, "start point v1,v2,...")->required();
  integrate->add_option("--to", to_text, "end point v1,v2,...")->required();
  integrate->add_option("--rule", rule_name, "gauss_legendre or trapezoid")
      ->check(CLI::IsMember({"gauss_legendre", "trapezoid"}));
  integrate->add_option("--nodes", nodes, "quadrature node count")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (run->parsed()) return cmd_run(config_path, seed_override, out_override);
  if (verify->parsed()) return cmd_verify(verify_nodes, inject);
  if (gen->parsed()) return cmd_gen(config_path, seed_override, out_override);
  return cmd_integrate(map_spec, from_text, to_text, rule_name, nodes);
}
