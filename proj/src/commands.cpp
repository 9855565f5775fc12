#include "pberg/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "pberg/acceptance.hpp"
#include "pberg/closed_forms.hpp"
#include "pberg/error.hpp"
#include "pberg/kernels.hpp"
#include "pberg/parallel.hpp"
#include "pberg/schwarz.hpp"
#include "pberg/weighted_bergman.hpp"

namespace pberg {
namespace {

using nlohmann::json;
using Progress = std::function<void(const std::string&)>;

template <class T>
std::vector<T> or_default(const std::vector<T>& v, std::vector<T> def) {
  return v.empty() ? def : v;
}

Cell ll(long long v) { return v; }

ReportTable table(const RunConfig& c, std::vector<std::string> columns) {
  ReportTable t;
  t.experiment = c.command;
  t.columns = std::move(columns);
  t.config_hash = c.hash();
  return t;
}

std::vector<double> log_radii(int n, double lo, double hi) {
  std::vector<double> r;
  for (int i = 0; i < n; ++i) r.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return r;
}

std::vector<cplx> default_points(const RunConfig& c) {
  if (!c.z.empty()) return c.z;
  if (c.domain_kind == "annulus") return {0.7};
  if (c.domain_kind == "punctured") return {0.3};
  return {0.0};
}

CommandOutput cmd_kernel(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"z_re", "z_im", "p", "N", "value", "converged", "iterations", "first_order_residual"});
  const Domain d = c.domain();
  const auto zs = default_points(c);
  for (double p : or_default(c.p, {2.0})) {
    const KernelLab lab(d, p, c.lab());
    const auto reps = par::parallel_map(zs.size(), [&](std::size_t i) { return lab.kernel_diag(zs[i]); });
    for (const KernelReport& r : reps)
      out.table.add({r.z.real(), r.z.imag(), p, ll(r.N), r.value, r.converged, ll(r.iterations),
                     r.first_order_residual},
                    "solver");
  }
  out.results["points"] = out.table.rows.size();
  return out;
}

CommandOutput cmd_offdiag(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"zeta_re", "zeta_im", "z_re", "z_im", "p", "N", "value_re", "value_im", "abs"});
  const Domain d = c.domain();
  const auto zs = default_points(c);
  const auto zetas = or_default(c.zeta, {0.5});
  const bool oracle = d.kind() == DomainKind::UnitDisc;
  for (double p : or_default(c.p, {2.0})) {
    const KernelLab lab(d, p, c.lab());
    for (cplx zeta : zetas) {
      for (cplx z : zs) {
        const cplx K = lab.kernel_offdiag(zeta, z);
        out.table.add({zeta.real(), zeta.imag(), z.real(), z.imag(), p, ll(c.N), K.real(), K.imag(), std::abs(K)},
                      "solver");
        if (oracle) {
          const cplx E = disc_kernel_closed(p, zeta, z);
          out.table.add({zeta.real(), zeta.imag(), z.real(), z.imag(), p, std::monostate{}, E.real(), E.imag(),
                         std::abs(E)},
                        "oracle");
        }
      }
    }
  }
  return out;
}

CommandOutput cmd_metric(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"z_re", "z_im", "X_re", "X_im", "p", "N", "K", "M", "B", "converged"});
  const Domain d = c.domain();
  const auto zs = default_points(c);
  const auto Xs = or_default(c.X, {1.0});
  for (double p : or_default(c.p, {2.0})) {
    const KernelLab lab(d, p, c.lab());
    for (cplx z : zs)
      for (cplx X : Xs) {
        const MetricReport m = lab.metric(z, X);
        out.table.add({z.real(), z.imag(), X.real(), X.imag(), p, ll(m.N), m.K, m.M, m.B, m.converged}, "solver");
      }
  }
  return out;
}

CommandOutput cmd_levi(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"z_re", "z_im", "X_re", "X_im", "p", "N", "levi", "B", "levi_over_B2", "hsc_lhs",
                        "hsc_rhs", "unreliable"});
  const Domain d = c.domain();
  struct Job { cplx z, X; };
  std::vector<Job> jobs;
  for (cplx z : default_points(c))
    for (cplx X : or_default(c.X, {1.0})) jobs.push_back({z, X});
  for (double p : or_default(c.p, {2.0})) {
    const KernelLab lab(d, p, c.lab());
    const auto reps = par::parallel_map(jobs.size(), [&](std::size_t i) { return lab.hsc_testdisc(jobs[i].z, jobs[i].X); });
    for (const HscReport& h : reps)
      out.table.add({h.z.real(), h.z.imag(), h.X.real(), h.X.imag(), p, ll(c.N), h.levi, h.B, h.levi / (h.B * h.B),
                     h.lhs, h.rhs, h.unreliable},
                    "solver", h.pass);
  }
  return out;
}

CommandOutput cmd_thm1_deriv(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"z_re", "z_im", "p", "N", "h", "lhs_x", "lhs_y", "rhs_x", "rhs_y", "relative"});
  const Domain d = c.domain();
  const auto zs = or_default(c.z, {d.has_hole() ? cplx(0.7) : cplx(0.3)});
  for (double p : or_default(c.p, {2.0})) {
    const KernelLab lab(d, p, c.lab());
    const double h = lab.config().fd_step;
    const auto reps = par::parallel_map(zs.size(), [&](std::size_t i) { return lab.derivative_identity(zs[i], h); });
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const DerivativeIdentity& r = reps[i];
      out.table.add({zs[i].real(), zs[i].imag(), p, ll(c.N), h, r.lhs[0], r.lhs[1], r.rhs[0], r.rhs[1], r.relative},
                    "solver", r.relative <= 1e-3);
    }
  }
  return out;
}

CommandOutput cmd_thm2(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"z_re", "z_im", "p", "N", "K", "residual", "same_space_residual", "floored_nodes"});
  const Domain d = c.domain();
  const auto zs = or_default(c.z, {d.has_hole() ? cplx(0.7) : cplx(0.4)});
  for (double p : or_default(c.p, {1.0, 1.5, 2.0}))
    for (cplx z : zs) {
      const Thm2Report r = thm2_residual(d, p, z, c.lab());
      out.table.add({z.real(), z.imag(), p, ll(r.N), r.K, r.residual, r.same_space_residual, ll(r.floored_nodes)},
                    "solver", r.residual <= 1e-2);
    }
  return out;
}

CommandOutput cmd_ns_metric(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"z_re", "z_im", "p", "N", "K2p", "Kp", "coefficient", "unreliable"});
  const Domain d = c.domain();
  const bool punct = d.kind() == DomainKind::PuncturedDisc;
  const auto zs = or_default(c.z, punct ? std::vector<cplx>{0.1, 0.03, 0.01} : std::vector<cplx>{0.3});
  json fits = json::array();
  for (double p : or_default(c.p, {1.0})) {
    const NsMetric ns(d, p, c.lab());
    for (cplx z : zs) {
      const NsMetricReport r = ns.coefficient(z);
      out.table.add({z.real(), z.imag(), p, ll(c.N), r.K2p, r.Kp, r.coefficient.value, r.coefficient.unreliable},
                    "solver");
    }
    if (punct) {
      const PoleFit f = ns.fit_pole(or_default(c.radii, {0.005, 0.01, 0.02, 0.04, 0.08}));
      fits.push_back({{"p", p}, {"a_minus1", f.a[0]}, {"a0", f.a[1]}, {"a1", f.a[2]},
                      {"max_relative_residual", f.max_relative_residual}});
    }
  }
  if (punct) out.results["pole_fits"] = fits;
  return out;
}

CommandOutput cmd_schwarz(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"region", "p", "N", "s", "exact_eig", "area_ratio", "multistarts"});
  const Domain d = c.domain();
  const RegionPtr E = parse_region(c.region);
  const SchwarzOptions opt = c.schwarz();
  json checks = json::array();
  for (double p : or_default(c.p, {2.0})) {
    SchwarzResult r = schwarz_general(*E, d, p, opt);
    Cell eig = std::monostate{};
    if (r.exact_eig) eig = *r.exact_eig;
    out.table.add({r.region, p, ll(r.N), r.s, eig, r.area_ratio, ll(r.multistarts)}, "solver");
    if (d.kind() == DomainKind::UnitDisc) {
      // Distance from E to the boundary, measured on the grid.
      const QuadGrid g = build_grid(d, c.n_r, c.n_theta);
      double dist = INFINITY;
      for (cplx z : g.nodes)
        if (E->contains(z)) dist = std::min(dist, d.boundary_distance(z));
      if (std::isfinite(dist)) {
        bound_checks(r, dist, d);
        for (const BoundCheck& b : r.bound_checks)
          checks.push_back({{"p", p}, {"name", b.name}, {"value", b.value}, {"satisfied", b.satisfied}, {"d", dist}});
      }
    }
  }
  out.results["bound_checks"] = checks;
  return out;
}

CommandOutput cmd_schwarz_dim(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"p", "eps", "one_minus_s"});
  json fits = json::array();
  for (double p : or_default(c.p, {2.0})) {
    const SchwarzDimFit f = schwarz_dim_sweep(c.domain(), p, or_default(c.eps, {0.2, 0.1, 0.05}), c.schwarz());
    for (std::size_t i = 0; i < f.eps.size(); ++i) out.table.add({p, f.eps[i], f.one_minus_s[i]}, "solver");
    fits.push_back({{"p", p}, {"slope", f.slope}, {"dimension", f.dimension}});
  }
  out.results["fits"] = fits;
  return out;
}

CommandOutput cmd_bm_bound(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"s", "p", "bound"});
  for (double p : or_default(c.p, {2.0}))
    for (double s : or_default(c.s, {0.25, 0.5, 0.75})) out.table.add({s, p, bm_bound(s, p)}, "oracle");
  return out;
}

CommandOutput cmd_chebyshev(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"p", "radius", "inside", "outside", "dist_h1", "dist_h2", "candidates", "min_candidate"});
  for (double p : or_default(c.p, {1.0})) {
    const ChebyshevDemo r = nonchebyshev_demo(p, c.candidates, c.seed, c.schwarz());
    const double half = 0.5 * std::numbers::pi;
    out.table.add({p, r.radius, r.inside, r.outside, r.dist_h1, r.dist_h2, ll(r.candidates), r.min_candidate},
                  "solver", r.min_candidate >= half - 1e-6);
  }
  return out;
}

CommandOutput cmd_puncture_asym(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"p", "r", "K", "asym", "lower", "upper"});
  const auto radii = or_default(c.radii, log_radii(8, 1e-3, 0.2));
  json fits = json::array();
  for (double p : or_default(c.p, {1.0})) {
    const std::vector<double> K = punctured_samples(p, radii, c.lab());
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const PunctureBounds b = punctured_bounds(p, radii[i]);
      Cell lower = std::monostate{};
      if (b.lower) lower = *b.lower;
      out.table.add({p, radii[i], K[i], punctured_asym(p, radii[i]), lower, b.upper}, "solver");
    }
    const AsymptoticFit f = fit_puncture(p, radii, K);
    const double a = p * f.k_p;
    fits.push_back({{"p", p},
                    {"k_p", f.k_p},
                    {"A", f.A},
                    {"B", f.B},
                    {"A_expected", (2 - a) / (2 * std::numbers::pi)},
                    {"B_expected", (4 - a) / (2 * std::numbers::pi)},
                    {"max_relative_residual",
                     *std::max_element(f.relative_residuals.begin(), f.relative_residuals.end())}});
  }
  out.results["fits"] = fits;
  return out;
}

CommandOutput cmd_oracle(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"oracle", "p", "zeta_re", "zeta_im", "z_re", "z_im", "value_re", "value_im", "lower", "upper"});
  const std::string& name = c.oracle;
  const auto ps = or_default(c.p, {2.0});
  const auto zs = default_points(c);
  const auto zetas = or_default(c.zeta, {0.5});
  const Cell none = std::monostate{};
  auto add = [&](Cell p, std::optional<cplx> zeta, cplx z, std::optional<cplx> v, Cell lo, Cell hi) {
    out.table.add({name, p, zeta ? Cell(zeta->real()) : none, zeta ? Cell(zeta->imag()) : none, z.real(), z.imag(),
                   v ? Cell(v->real()) : none, v ? Cell(v->imag()) : none, lo, hi},
                  "oracle");
  };
  if (name == "szego") {
    for (cplx z : zs) add(none, std::nullopt, z, szego_diag(z), none, none);
    return out;
  }
  for (double p : ps) {
    for (cplx z : zs) {
      if (name == "disc-diag") {
        add(p, std::nullopt, z, disc_diag_closed(p, z), none, none);
      } else if (name == "punctured-asym") {
        add(p, std::nullopt, z, punctured_asym(p, z), none, none);
      } else if (name == "punctured-bounds") {
        const PunctureBounds b = punctured_bounds(p, z);
        add(p, std::nullopt, z, std::nullopt, b.lower ? Cell(*b.lower) : none, b.upper);
      } else if (name == "b6-corridor") {
        const Corridor b = lemma_b6_bounds(p, c.domain(), z);
        add(p, std::nullopt, z, std::nullopt, b.lower, b.upper);
      } else if (name == "disc-offdiag" || name == "weighted-disc") {
        for (cplx zeta : zetas)
          add(p, zeta, z, name == "disc-offdiag" ? disc_kernel_closed(p, zeta, z) : weighted_disc_closed(p, zeta, z),
              none, none);
      } else {
        fail(ErrorCode::Config,
             "unknown oracle '" + name +
                 "' (disc-diag, disc-offdiag, punctured-asym, punctured-bounds, weighted-disc, b6-corridor, szego)");
      }
    }
  }
  return out;
}

CommandOutput cmd_hardy(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"p", "r", "mean"});
  Eigen::VectorXcd f(c.coeffs.empty() ? 1 : static_cast<Eigen::Index>(c.coeffs.size()));
  if (c.coeffs.empty()) f[0] = 1.0;
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) f[static_cast<Eigen::Index>(i)] = c.coeffs[i];
  json per_p = json::array();
  for (double p : or_default(c.p, {1.0, 2.0})) {
    const HardyMeans h = hardy_means(p, f, c.levels);
    for (std::size_t i = 0; i < h.radii.size(); ++i) out.table.add({p, h.radii[i], h.means[i]}, "oracle");
    per_p.push_back({{"p", p}, {"norm_pow", h.norm_pow}, {"hl_ratio", hl_ratio(p, f)}});
  }
  const Carleman cc = carleman_check(f);
  out.results["hardy"] = per_p;
  out.results["carleman"] = {{"lhs", cc.lhs}, {"rhs", cc.rhs}, {"holds", cc.lhs <= cc.rhs * (1 + 1e-12)}};
  return out;
}

CommandOutput cmd_rp_explore(const RunConfig& c) {
  CommandOutput out;
  out.table = table(c, {"p", "r", "K"});
  json mins = json::array();
  for (double p : or_default(c.p, {1.0})) {
    const RpExploration e = rp_exploration(p, c.lab());
    for (std::size_t i = 0; i < e.radii.size(); ++i) out.table.add({p, e.radii[i], e.values[i]}, "solver");
    mins.push_back({{"p", p}, {"r_p", e.r_p}, {"phi", e.phi}});
  }
  out.results["minima"] = mins;
  return out;
}

CommandOutput cmd_verify(const RunConfig& c, const Progress& progress) {
  CommandOutput out;
  out.table = table(c, {"id", "title", "detail"});
  AcceptanceOptions opt;
  opt.seed = c.seed;
  opt.only = c.criteria;
  const auto results = run_acceptance(opt, [&](const CriterionResult& r) {
    if (!progress) return;
    char t[32];
    std::snprintf(t, sizeof t, "  [%.1fs]", r.seconds);
    progress(format_result(r) + t);
  });
  int failed = 0;
  for (const CriterionResult& r : results) {
    out.table.add({ll(r.id), r.title, r.detail}, "solver", r.pass);
    if (!r.pass) ++failed;
  }
  out.results["criteria"] = results.size();
  out.results["failed"] = failed;
  out.exit_status = failed == 0 ? 0 : 1;
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> n{"kernel", "offdiag", "metric", "levi", "thm1-deriv", "thm2",
                                          "ns-metric", "schwarz", "schwarz-dim", "bm-bound", "chebyshev-demo",
                                          "puncture-asym", "oracle", "hardy", "rp-explore", "verify"};
  return n;
}

CommandOutput run_command(const RunConfig& c, const Progress& progress) {
  const std::string& n = c.command;
  if (n == "kernel") return cmd_kernel(c);
  if (n == "offdiag") return cmd_offdiag(c);
  if (n == "metric") return cmd_metric(c);
  if (n == "levi") return cmd_levi(c);
  if (n == "thm1-deriv") return cmd_thm1_deriv(c);
  if (n == "thm2") return cmd_thm2(c);
  if (n == "ns-metric") return cmd_ns_metric(c);
  if (n == "schwarz") return cmd_schwarz(c);
  if (n == "schwarz-dim") return cmd_schwarz_dim(c);
  if (n == "bm-bound") return cmd_bm_bound(c);
  if (n == "chebyshev-demo") return cmd_chebyshev(c);
  if (n == "puncture-asym") return cmd_puncture_asym(c);
  if (n == "oracle") return cmd_oracle(c);
  if (n == "hardy") return cmd_hardy(c);
  if (n == "rp-explore") return cmd_rp_explore(c);
  if (n == "verify") return cmd_verify(c, progress);
  fail(ErrorCode::Config, "unknown command '" + n + "'");
}

nlohmann::json summary_json(const CommandOutput& out, const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["config"] = c.canonical();
  j["config_hash"] = c.hash();
  j["results"] = out.results;
  j["rows"] = rows_json(out.table);
  j["exit_status"] = out.exit_status;
  return j;
}

std::vector<std::filesystem::path> emit(const CommandOutput& out, const RunConfig& c) {
  std::vector<std::filesystem::path> written;
  const std::filesystem::path dir(c.out_dir);
  if (c.format != "json") {
    written.push_back(dir / (c.command + ".csv"));
    write_text(written.back(), to_csv(out.table));
  }
  if (c.format != "csv") {
    written.push_back(dir / (c.command + ".json"));
    write_text(written.back(), dump_json(summary_json(out, c)));
  }
  return written;
}

}  // namespace pberg
