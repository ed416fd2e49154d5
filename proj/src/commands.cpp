#include "anosov/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "anosov/automorphic.hpp"
#include "anosov/smfourier.hpp"
#include "anosov/xray.hpp"

namespace anosov {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// inf and nan are not JSON numbers
json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void stamp(json& j, const RunConfig& cfg) {
  j["config_hash"] = cfg.hash;
  j["version"] = kToolVersion;
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.out_dir);
  return dir / name;
}

void write_json(const RunConfig& cfg, const std::string& name, json j) {
  stamp(j, cfg);
  std::ofstream out(out_path(cfg, name));
  if (!out) throw ConfigError("cannot write " + name);
  out << j.dump(2) << "\n";
}

// tidy CSV; the first line is a comment with hash and version
void write_csv(const RunConfig& cfg, const std::string& name, const std::string& header,
               const std::string& rows) {
  std::ofstream out(out_path(cfg, name));
  if (!out) throw ConfigError("cannot write " + name);
  out << "# config_hash=" << cfg.hash << " version=" << kToolVersion << "\n" << header << "\n" << rows;
}

SurfaceModel surface_of(const RunConfig& cfg) {
  if (!cfg.doc.contains("surface")) throw ConfigError("config needs a 'surface' spec");
  return parse_surface(cfg.doc["surface"]);
}

TerminatorOptions terminator_options(const RunConfig& cfg) {
  TerminatorOptions o;
  o.beta_max = cfg.tolerance("beta_max", o.beta_max);
  o.tol = cfg.tolerance("tol", o.tol);
  o.T_max = cfg.tolerance("T_max", o.T_max);
  o.phases = cfg.integer("phases", o.phases);
  if (o.phases < 1) throw ConfigError("'phases' must be positive");
  o.workers = cfg.workers;
  return o;
}

VerdictOptions verdict_options(const RunConfig& cfg) {
  VerdictOptions o;
  o.n_dir = cfg.integer("n_dir", o.n_dir);
  o.T_window = cfg.tolerance("T_window", o.T_window);
  o.kappa_floor = cfg.tolerance("kappa_floor", o.kappa_floor);
  o.n_closed = cfg.integer("n_closed", o.n_closed);
  o.n_random = cfg.integer("n_random", o.n_random);
  o.random_length = cfg.tolerance("random_length", o.random_length);
  o.dt = cfg.tolerance("dt", o.dt);
  if (o.n_dir < 0 || o.n_closed < 0 || o.n_random < 0)
    throw ConfigError("pool sizes must be non-negative");
  o.seed = cfg.seed;
  o.terminator = terminator_options(cfg);
  return o;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// random SM point of the octagon, position reduced
UnitTangent octagon_sample(std::mt19937_64& rng, const FuchsianOctagon& oct) {
  std::uniform_real_distribution<double> U(-1, 1), A(0, 2 * M_PI);
  for (;;) {
    const cplx z(U(rng) * oct.vertex_radius(), U(rng) * oct.vertex_radius());
    if (oct.contains(z)) return {z.real(), z.imag(), A(rng)};
  }
}

}  // namespace

json to_json(const TerminatorCertificate& c) {
  json j;
  j["beta_lo"] = c.beta_lo;
  j["beta_hi"] = num_or_null(c.beta_hi);
  j["exceeds_beta_max"] = c.exceeds_beta_max;
  j["beta_max"] = c.beta_max;
  if (c.exceeds_beta_max) j["beta_ter"] = "> " + fmt(c.beta_max);
  j["profiles"] = c.profiles;
  j["evidence"] = json::array();
  for (const auto& e : c.evidence)
    j["evidence"].push_back({{"beta", e.beta},
                             {"profile", e.profile},
                             {"first_conjugate_time", e.time ? json(*e.time) : json(nullptr)}});
  return j;
}

json to_json(const GulliverParams& p) {
  return {{"b", p.b},   {"r1", p.r1},       {"r2", p.r2},   {"r3", p.r3},
          {"eps", p.eps}, {"delta", p.delta}, {"R", p.R}, {"R_prime", p.Rp},
          {"beta_target", p.beta_target}};
}

json to_json(const Feasibility& f) {
  return {{"cond1", f.cond1},
          {"cond2", f.cond2},
          {"margin1", num_or_null(f.margin1)},
          {"margin2", num_or_null(f.margin2)},
          {"feasible", f.feasible()},
          {"caps_below_two", f.caps_below_two}};
}

json to_json(const TrappingReport& t) {
  return {{"trapped", t.trapped},         {"min_max_abs_K", t.min_max_abs_K},
          {"n_dir", t.n_dir},             {"T_window", t.T_window},
          {"kappa_floor", t.kappa_floor}, {"note", t.note}};
}

json cmd_pestov(const RunConfig& cfg) {
  const SurfaceModel model = surface_of(cfg);
  const int n_fields = cfg.integer("n_fields", 20);
  const int N = cfg.integer("N_modes", 4);
  const int band = cfg.integer("band", 3);
  if (n_fields < 1 || N < 1 || band < 0) throw ConfigError("n_fields, N_modes >= 1 and band >= 0");
  json rep;
  std::ostringstream csv;
  if (auto torus = std::get_if<ConformalTorus>(&model)) {
    std::vector<int> grids{torus->grid().nx(), 2 * torus->grid().nx()};
    if (cfg.doc.contains("grids")) {
      try {
        grids = cfg.doc["grids"].get<std::vector<int>>();
      } catch (const json::exception&) {
        throw ConfigError("'grids' must be a list of integers");
      }
    }
    if (grids.empty()) throw ConfigError("'grids' must not be empty");
    for (int n : grids)
      if (n < 2 * band + 2) throw ConfigError("grid too coarse for the requested band");
    std::vector<double> worst(grids.size(), 0);
    for (std::size_t gi = 0; gi < grids.size(); ++gi) {
      TorusChart chart(torus->resampled(grids[gi], grids[gi]));
      std::mt19937_64 rng(cfg.seed);
      for (int f = 0; f < n_fields; ++f) {
        const double r = pestov_residual(random_field(chart, N, rng, band)).residual;
        worst[gi] = std::max(worst[gi], r);
        csv << f << "," << grids[gi] << "," << fmt(r) << "\n";
      }
    }
    rep["chart"] = "conformal-torus";
    rep["grids"] = grids;
    rep["max_residual"] = worst;
    json ratios = json::array();
    for (std::size_t gi = 1; gi < grids.size(); ++gi)
      ratios.push_back(num_or_null(worst[gi - 1] / worst[gi]));
    rep["refinement_ratio"] = ratios;
  } else if (auto oct = std::get_if<FuchsianOctagon>(&model)) {
    OctagonSpectrum spec(*oct);
    RepresentationChart chart = RepresentationChart::octagon(spec);
    std::mt19937_64 rng(cfg.seed);
    double worst = 0;
    for (int f = 0; f < n_fields; ++f) {
      const double r = pestov_residual(random_field(chart, N, rng)).residual;
      worst = std::max(worst, r);
      csv << f << ",0," << fmt(r) << "\n";
    }
    rep["chart"] = chart.name();
    rep["max_residual"] = {worst};
  } else {
    throw ConfigError("pestov needs a conformal_torus or octagon surface");
  }
  rep["n_fields"] = n_fields;
  rep["N_modes"] = N;
  write_json(cfg, "pestov.json", rep);
  write_csv(cfg, "pestov.csv", "field,grid,residual", csv.str());
  stamp(rep, cfg);
  return rep;
}

json cmd_terminator(const RunConfig& cfg) {
  const SurfaceModel model = surface_of(cfg);
  const VerdictOptions vo = verdict_options(cfg);
  const auto pool = sample_profiles(model, vo);
  if (pool.empty()) throw InsufficientData("terminator: empty profile pool");
  const TerminatorCertificate c = terminator_bisect(pool, vo.terminator);
  json rep = to_json(c);
  write_json(cfg, "certificate.json", rep);
  std::ostringstream csv;
  for (const auto& e : c.evidence)
    csv << fmt(e.beta) << "," << e.profile << "," << (e.time ? fmt(*e.time) : "") << "\n";
  write_csv(cfg, "evidence.csv", "beta,profile,first_conjugate_time", csv.str());
  stamp(rep, cfg);
  return rep;
}

json cmd_anosov(const RunConfig& cfg) {
  const SurfaceModel model = surface_of(cfg);
  const AnosovReport r = anosov_verdict(model, verdict_options(cfg));
  json rep;
  rep["verdict"] = r.verdict;
  rep["trapping"] = to_json(r.trapping);
  rep["certificate"] = to_json(r.certificate);
  rep["notes"] = r.notes;
  write_json(cfg, "verdict.json", rep);
  stamp(rep, cfg);
  return rep;
}

json cmd_xray(const RunConfig& cfg) {
  const SurfaceModel model = surface_of(cfg);
  const auto* oct = std::get_if<FuchsianOctagon>(&model);
  if (!oct) throw ConfigError("xray needs the octagon surface");
  const int m = cfg.integer("m", 2);
  if (m < 0 || m > 3) throw ConfigError("'m' must be 0..3");
  const int max_len = cfg.integer("max_len", 6);
  const int samples = cfg.integer("samples", 256);
  const int n_pot = cfg.integer("n_potential", 6);
  const int n_other = cfg.integer("n_other", 6);
  const double kappa = cfg.tolerance("kappa", 2.0);
  const double threshold = cfg.tolerance("threshold", 1e-6);
  if (max_len < 1 || samples < 8 || n_pot < 0 || n_other < 0)
    throw ConfigError("invalid xray sizes");

  auto pool = octagon_geodesic_pool(*oct, max_len, samples);
  if (pool.empty()) throw InsufficientData("xray: empty geodesic pool");
  std::mt19937_64 rng(cfg.seed);
  std::vector<cplx> centers;
  for (int i = 0; i < n_pot + n_other; ++i) {
    const UnitTangent p = octagon_sample(rng, *oct);
    centers.emplace_back(p.x, p.y);
  }
  InvariantBumps bumps(*oct, centers, kappa);
  std::vector<std::size_t> pot, other;
  for (int i = 0; i < n_pot; ++i) pot.push_back(std::size_t(i));
  for (int i = 0; i < n_other; ++i) other.push_back(std::size_t(n_pot + i));
  const auto basis = octagon_tensor_basis(bumps, m, pot, other);
  if (basis.empty()) throw InsufficientData("xray: empty tensor basis");

  // transforms of the potential elements, relative to the transform of |f|
  double pot_res = 0;
  for (const auto& f : basis)
    if (f.potential)
      for (const auto& g : pool) {
        const double a = ray_transform_abs(f, g);
        if (a > 0) pot_res = std::max(pot_res, std::abs(ray_transform(f, g)) / a);
      }
  const auto sampler = [oct](std::mt19937_64& r) { return octagon_sample(r, *oct); };
  const SInjectivityReport r =
      sinjectivity_experiment(pool, basis, sampler, threshold, 2000, cfg.seed, cfg.workers);
  json rep = {{"m", m},
              {"sigma_min", r.sigma_min},
              {"sigma_gap", r.sigma_gap},
              {"kernel_dim", r.kernel_dim},
              {"non_potential_residual", r.non_potential_residual},
              {"pool_size", r.pool_size},
              {"n_basis", r.n_basis},
              {"potential_count", r.potential_count},
              {"potential_transform_residual", pot_res},
              {"threshold", threshold}};
  if (r.underdetermined) rep["warning"] = "pool smaller than basis; kernel not interpreted";
  write_json(cfg, "xray.json", rep);
  std::ostringstream csv;
  for (std::size_t i = 0; i < r.sigma.size(); ++i) csv << i << "," << fmt(r.sigma[i]) << "\n";
  write_csv(cfg, "sigma.csv", "index,sigma", csv.str());
  stamp(rep, cfg);
  return rep;
}

json cmd_invariant(const RunConfig& cfg) {
  const SurfaceModel model = surface_of(cfg);
  const std::string vname = cfg.str("variant", "w0");
  Variant variant;
  if (vname == "w0") variant = Variant::w0;
  else if (vname == "w1") variant = Variant::w1;
  else if (vname == "wm") variant = Variant::wm;
  else throw ConfigError("'variant' must be w0, w1 or wm");
  const int m = variant == Variant::w0 ? 0 : variant == Variant::w1 ? 1 : cfg.integer("m", 2);
  const int N = cfg.integer("N_modes", 32);
  const double reg = cfg.tolerance("reg", 1e-10);
  const double tol = cfg.tolerance("tol", 1e-6);
  const std::string data_kind = cfg.str("data", "random");
  if (data_kind != "random" && data_kind != "constant") throw ConfigError("'data' must be random or constant");
  if (variant == Variant::wm && m < 2) throw ConfigError("variant wm needs m >= 2");
  if (N < m + 2) throw ConfigError("'N_modes' must be at least m + 2");

  std::unique_ptr<OctagonSpectrum> spec;
  std::unique_ptr<Chart> chart;
  if (auto oct = std::get_if<FuchsianOctagon>(&model)) {
    spec = std::make_unique<OctagonSpectrum>(*oct);
    chart = std::make_unique<RepresentationChart>(RepresentationChart::octagon(*spec, 12, std::max(4, m)));
  } else if (auto t = std::get_if<ConformalTorus>(&model)) {
    if (double(t->grid().size()) * (2 * N + 1) > 2e4)
      throw ConfigError("torus too large for the dense solver; reduce nx, ny or N_modes");
    chart = std::make_unique<TorusChart>(*t);
  } else {
    throw ConfigError("invariant needs a conformal_torus or octagon surface");
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> G(0, 1);
  SMField data(*chart, m);
  if (variant == Variant::w0) {
    if (data_kind == "constant") data[0].setConstant(cplx(cfg.num("c", 1.0), 0));
    else data = random_field(*chart, 0, rng);
  } else if (auto rc = dynamic_cast<const RepresentationChart*>(chart.get())) {
    // holomorphic ladders starting at m, the conjugate on their partners
    const auto& comps = rc->components();
    for (std::size_t i = 0; i + 1 < comps.size(); ++i)
      if (comps[i].kind == RepresentationChart::Component::holomorphic && comps[i].m == m) {
        const cplx c(G(rng), G(rng));
        data[m](Eigen::Index(i)) = c;
        data[-m](Eigen::Index(i + 1)) = std::conj(c);
      }
  } else {
    // c e^{-m lambda} lies in the kernel of eta_-
    const auto& tc = static_cast<const TorusChart&>(*chart);
    const cplx c(G(rng), G(rng));
    const auto& lam = tc.torus().lambda();
    for (std::size_t i = 0; i < lam.size(); ++i) {
      data[m](Eigen::Index(i)) = c * std::exp(-m * lam[i]);
      data[-m](Eigen::Index(i)) = std::conj(c) * std::exp(-m * lam[i]);
    }
  }

  const ExtensionResult r = invariant_extension(variant, data, N, std::max(m, 1), reg, tol);
  json ladder = json::array();
  std::ostringstream lcsv, wcsv;
  for (const auto& e : r.ladder) {
    ladder.push_back({{"k", e.k}, {"residual", e.residual}, {"boundary", e.boundary}});
    lcsv << e.k << "," << fmt(e.residual) << "," << (e.boundary ? 1 : 0) << "\n";
  }
  for (int k = -r.w.N; k <= r.w.N; ++k)
    for (Eigen::Index i = 0; i < r.w[k].size(); ++i)
      wcsv << k << "," << i << "," << fmt(r.w[k](i).real()) << "," << fmt(r.w[k](i).imag()) << "\n";
  json rep = {{"variant", vname},
              {"m", m},
              {"N_modes", N},
              {"chart", chart->name()},
              {"interior_residual", r.interior_residual},
              {"prescribed_error", r.prescribed_error},
              {"odd_interior", r.odd_interior},
              {"data_defect", r.data_defect},
              {"decay_slope", r.decay_slope},
              {"solver_residual", r.solver_residual},
              {"ok", r.ok},
              {"ladder", ladder}};
  write_json(cfg, "diagnostics.json", rep);
  write_json(cfg, "w.json", {{"chart", chart->name()}, {"N_modes", r.w.N}, {"dim", chart->dim()},
                             {"data", "w.csv"}});
  write_csv(cfg, "w.csv", "k,index,re,im", wcsv.str());
  write_csv(cfg, "ladder.csv", "k,residual,boundary", lcsv.str());
  stamp(rep, cfg);
  if (!r.ok)
    throw SolverFailure("invariant: residual " + fmt(r.interior_residual) + " above tolerance " + fmt(tol));
  return rep;
}

json cmd_gulliver(const RunConfig& cfg) {
  if (!cfg.doc.contains("beta_target") || !cfg.doc["beta_target"].is_number())
    throw ConfigError("gulliver needs a numeric 'beta_target'");
  const double beta = cfg.doc["beta_target"].get<double>();
  const double dt = cfg.tolerance("dt", 0.01);
  GulliverRun run;
  try {
    run = gulliver_certify(beta, terminator_options(cfg), dt);
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  const CurvatureProfile prof = synth_profile(run.params, run.dt);
  json params = to_json(run.params);
  params["feasibility"] = to_json(run.feasibility);
  json cert = to_json(run.certificate);
  cert["dt"] = run.dt;
  cert["T_max"] = run.T_max;
  cert["hill_estimate"] = num_or_null(periodic_terminator_estimate(prof));
  // beta_hi always carries a detected conjugate point, so beta_hi <= 2 gives beta_Ter < 2
  cert["window_ok"] = !run.certificate.exceeds_beta_max &&
                      run.certificate.beta_lo >= beta - terminator_options(cfg).tol &&
                      run.certificate.beta_hi <= 2;
  write_json(cfg, "params.json", params);
  write_json(cfg, "certificate.json", cert);
  const std::string pc = profile_csv(prof);
  const auto nl = pc.find('\n');
  write_csv(cfg, "profile.csv", pc.substr(0, nl), pc.substr(nl + 1));
  json rep = {{"params", params}, {"certificate", cert}};
  stamp(rep, cfg);
  return rep;
}

json run_command(const std::string& name, const RunConfig& cfg) {
  if (name == "pestov") return cmd_pestov(cfg);
  if (name == "terminator") return cmd_terminator(cfg);
  if (name == "anosov") return cmd_anosov(cfg);
  if (name == "xray") return cmd_xray(cfg);
  if (name == "invariant") return cmd_invariant(cfg);
  if (name == "gulliver") return cmd_gulliver(cfg);
  throw ConfigError("unknown command '" + name + "'");
}

}  // namespace anosov
