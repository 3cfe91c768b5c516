#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "omo/config.hpp"
#include "omo/networks.hpp"
#include "omo/ome.hpp"
#include "omo/regret.hpp"
#include "omo/svg.hpp"

namespace omo {

struct RunArtifacts {
  std::filesystem::path trace_csv;
  std::filesystem::path metadata;
  std::filesystem::path plot_svg;
  double final_avg_regret_n = 0.0;
  long rounds = 0;
};

namespace detail {

inline std::string format_vector(const Vector& v) {
  std::string out;
  char buf[64];
  for (Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    if (i) out += " ";
    out += buf;
  }
  return out;
}

inline void write_kv(std::ostream& os,
                     const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
}

}  // namespace detail

/// End-to-end adversarial run: generate and solve the pool, play the
/// learning loop, emit trace.csv + metadata + plot.svg into the output
/// directory. On solver non-convergence whatever rounds exist are still
/// flushed before the error propagates (so a failed run leaves evidence).
inline RunArtifacts run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  const Domain domain = cfg.make_domain();
  const SolverConfig solver = cfg.solver_config();
  const QuadratureRule rule = cfg.quadrature();

  std::filesystem::create_directories(cfg.out_dir);
  RunArtifacts art;
  art.trace_csv = std::filesystem::path(cfg.out_dir) / "trace.csv";
  art.metadata = std::filesystem::path(cfg.out_dir) / "metadata.txt";
  art.plot_svg = std::filesystem::path(cfg.out_dir) / "plot.svg";

  auto flush_trace = [&art](const RegretTrace& trace) {
    std::ofstream out(art.trace_csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + art.trace_csv.string());
    trace.write_csv(out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + art.trace_csv.string());
  };

  VIPool pool{{}, domain, cfg.seed};
  OmeResult result{RegretTrace(Vector::Zero(domain.dim())), Vector(), 0, 0, 0, 0, 0};
  try {
    pool = gen_pool(cfg.network_spec(), cfg.pool_size, domain, solver);
    result = run_ome(pool, cfg.learner_config(), cfg.rounds, rule, solver);
  } catch (const SolverError&) {
    flush_trace(result.trace);
    throw;
  }
  flush_trace(result.trace);

  // Metadata: every resolved config key plus everything derived at runtime.
  std::ofstream meta(art.metadata, std::ios::binary);
  if (!meta) throw std::runtime_error("cannot write " + art.metadata.string());
  auto kv = cfg.metadata_entries();
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  kv.emplace_back("derived.domain", domain.describe());
  kv.emplace_back("derived.dim", std::to_string(domain.dim()));
  kv.emplace_back("derived.eta_used", num(result.eta));
  kv.emplace_back("derived.lipschitz_bound", num(result.lipschitz));
  kv.emplace_back("derived.radius", num(result.radius));
  kv.emplace_back("derived.theoretical_regret_bound", num(result.theoretical_bound));
  kv.emplace_back("derived.regret_certificate", num(result.certificate));
  kv.emplace_back("derived.u_T", detail::format_vector(result.comparator));
  double gamma_used =
      solver.gamma > 0.0 ? solver.gamma : 0.5 / std::max(result.lipschitz, 1e-12);
  kv.emplace_back("derived.gamma_used", num(gamma_used));
  for (std::size_t i = 0; i < pool.entries.size(); ++i)
    kv.emplace_back("derived.pool_residual_" + std::to_string(i),
                    num(vi_residual(pool.entries[i].map, domain, pool.entries[i].x_star,
                                    gamma_used)));
  // Quadrature error: exact-rule floor for polynomial fields, refinement
  // difference otherwise, probed on the widest segment available.
  double eps_q = pool.entries.empty()
                     ? kPolynomialQuadTol
                     : quad_error_estimate(pool.entries.front().map, result.comparator,
                                           domain.center_point(), rule);
  kv.emplace_back("derived.eps_q", num(eps_q));
  kv.emplace_back("derived.rng", "splitmix64 counter streams; pool entry i uses derive(seed, i)");
  kv.emplace_back("derived.comparator_note",
                  "u_T is the equilibrium of the uniformly averaged pool; the adversary is not "
                  "uniform, so this is a surrogate for the best fixed decision and the long-run "
                  "average regret can drop below zero once the play outperforms it");
  detail::write_kv(meta, kv);
  meta.flush();
  if (!meta) throw std::runtime_error("failed writing " + art.metadata.string());

  // Plot: running averages of both regret notions and the per-round
  // optimality gap.
  const auto& recs = result.trace.records();
  std::vector<double> avg_n(recs.size()), avg_s(recs.size()), avg_inf(recs.size());
  double cs = 0.0, ci = 0.0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    cs += recs[i].regret_s;
    ci += recs[i].loss_inf;
    avg_n[i] = result.trace.cum_regret_n_at(i) / static_cast<double>(i + 1);
    avg_s[i] = cs / static_cast<double>(i + 1);
    avg_inf[i] = ci / static_cast<double>(i + 1);
  }
  std::ofstream svg(art.plot_svg, std::ios::binary);
  if (!svg) throw std::runtime_error("cannot write " + art.plot_svg.string());
  write_line_plot_svg(svg, std::string("adversarial equilibration, ") + to_string(cfg.family) +
                               ", " + to_string(cfg.algo),
                      {{"avg regret_n", "#1f77b4", avg_n},
                       {"avg regret_s", "#d62728", avg_s},
                       {"avg loss_inf", "#2ca02c", avg_inf}});
  svg.flush();
  if (!svg) throw std::runtime_error("failed writing " + art.plot_svg.string());

  art.final_avg_regret_n = result.trace.avg_regret_n();
  art.rounds = result.trace.rounds();
  return art;
}

}  // namespace omo
