// Batch driver: one subcommand per pipeline, INI configuration with one
// section per subcommand, CSV/JSON artifacts in the output directory.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "glcorner/critfield.hpp"
#include "glcorner/diagnostics.hpp"
#include "glcorner/parallel.hpp"
#include "glcorner/version.hpp"
#include "output.hpp"

using namespace glc;
using cli::Artifacts;
using cli::flag;
using cli::num;
using cli::Table;

namespace {

constexpr const char* kOutEnv = "GLCORNER_OUT";
constexpr const char* kJobsEnv = "GLCORNER_JOBS";

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParameter:
    case ErrorKind::kInvalidGeometry:
    case ErrorKind::kMeshingFailure:
    case ErrorKind::kConditioningError:
    case ErrorKind::kUndefinedRatio: return 2;
    case ErrorKind::kConvergenceFailure:
    case ErrorKind::kNoRoot:
    case ErrorKind::kSolverError:
    case ErrorKind::kNumericalInstability: return 3;
    case ErrorKind::kAccuracyNotMet: return 4;
  }
  return 3;
}

struct Globals {
  std::string out = "out";
  int jobs = 1;
  std::uint64_t seed = 2024;
  std::vector<double> vertices = {0, 0, 1, 0, 1, 1, 0, 1};
  double mu1_accuracy = 1e-3;
};

struct Context {
  const Globals& g;
  PolygonDomain& poly;
  Artifacts& art;

  DescentOptions descent() const {
    DescentOptions d;
    d.seed = g.seed;
    return d;
  }
  Mu1Options mu1_options() const {
    Mu1Options o;
    o.accuracy = g.mu1_accuracy;
    return o;
  }
};

PolygonDomain make_domain(const std::vector<double>& v) {
  require(v.size() % 2 == 0, ErrorKind::kInvalidGeometry, "vertex list needs an even number of coordinates");
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i + 1 < v.size(); i += 2) pts.push_back({v[i], v[i + 1]});
  return PolygonDomain::create(pts);
}

// Lambda1 = smallest corner energy, Theta0 from the sector at pi.
struct Constants {
  CornerSpectrum spectrum;
  double Lambda1 = 0.0;
  double Theta0 = 0.0;
};

Constants constants(Context& c) {
  Mu1Cache cache(c.mu1_options());
  Constants k;
  k.spectrum = corner_spectrum(c.poly, cache, c.g.jobs);
  k.Lambda1 = k.spectrum.lambdas.front();
  k.Theta0 = k.spectrum.theta0;
  return k;
}

// ---- subcommands ---------------------------------------------------------------

struct SectorMu1Args {
  std::vector<double> alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double h_layer = 0.4;
  int refinements = 3;
};

void run_sector_mu1(Context& c, const SectorMu1Args& a) {
  require(!a.alphas.empty(), ErrorKind::kInvalidParameter, "alpha list is empty");
  Mu1Options o = c.mu1_options();
  o.h_layer = a.h_layer;
  o.refinements = a.refinements;
  std::vector<Mu1Result> res(a.alphas.size());
  parallel_for(a.alphas.size(), c.g.jobs, [&](std::size_t i) { res[i] = mu1(a.alphas[i] * M_PI, o); });
  Table t{{"alpha_over_pi", "alpha", "mu1", "error", "h_error", "R_error", "R", "h", "nodes"}, {}};
  int violations = 0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& r = res[i];
    t.add({num(a.alphas[i]), num(r.alpha), num(r.value), num(r.error), num(r.h_error), num(r.R_error), num(r.R),
           num(r.h), num(r.nodes)});
    if (i > 0 && a.alphas[i] > a.alphas[i - 1] && a.alphas[i] <= 1.0 && !(r.value > res[i - 1].value)) ++violations;
  }
  c.art.csv("sector-mu1.csv", t);
  std::cout << "monotonicity violations on (0, pi]: " << violations << "\n";
}

void run_theta0(Context& c) {
  const Theta0Result r = theta0(c.mu1_options());
  Table t{{"theta0", "error", "sector", "sector_error", "fiber", "fiber_error", "consistent"}, {}};
  t.add({num(r.value), num(r.error), num(r.sector.value), num(r.sector.error), num(r.fiber.theta0),
         num(r.fiber.error), flag(r.consistent)});
  c.art.csv("theta0.csv", t);
  std::cout << "Theta0 = " << num(r.value) << " +- " << num(r.error) << "\n";
}

struct SpectrumArgs {
  std::vector<double> B = {50, 100, 200, 400};
  int refinements = 1;
  double h_layer = 0.4;
};

void run_polygon_spectrum(Context& c, const SpectrumArgs& a) {
  PolygonSpectrumOptions o;
  o.refinements = a.refinements;
  o.h_layer = a.h_layer;
  const SpectralCurve curve = lambda1_curve(c.poly, a.B, o, c.g.jobs);
  Table t{{"B", "lambda1", "error", "lambda1_over_B", "slope"}, {}};
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    const auto& s = curve.samples[i];
    t.add({num(s.B), num(s.lambda1), num(s.error), num(s.lambda1 / s.B), num(curve.slopes[i])});
  }
  c.art.csv("polygon-spectrum.csv", t);
}

struct Hc3Args {
  std::vector<double> kappas = {6, 8, 12, 16};
  double tol = 1e-3;
  std::vector<int> orders = {1, 2};
  int refinements = 2;
};

void run_hc3(Context& c, const Hc3Args& a) {
  const Constants k = constants(c);
  CritFieldOptions o;
  o.spectrum.refinements = a.refinements;
  const auto res = solve_hc3_sweep(c.poly, a.kappas, a.tol, k.Lambda1, k.Theta0, o, c.g.jobs);
  Table t{{"kappa", "H_lin", "residual", "lambda1_at_root", "lambda1_error", "H_Lambda1_over_kappa", "bracket_lo",
           "bracket_hi", "evaluations", "monotone"},
          {}};
  for (const auto& r : res)
    t.add({num(r.kappa), num(r.H_lin), num(r.residual), num(r.lambda1_at_root), num(r.lambda1_error),
           num(r.H_lin * k.Lambda1 / r.kappa), num(r.bracket[0]), num(r.bracket[1]), num(r.evaluations),
           flag(r.monotone)});
  c.art.csv("hc3.csv", t);
  nlohmann::ordered_json fits = nlohmann::ordered_json::array();
  for (int J : a.orders) {
    nlohmann::ordered_json f;
    f["J"] = J;
    try {
      const ExpansionFit fit = fit_expansion(res, J, k.Lambda1);
      f["etas"] = fit.etas;
      f["fit_residual"] = fit.fit_residual;
      f["condition"] = fit.condition;
    } catch (const Error& e) {
      f["error"] = e.what();
    }
    fits.push_back(f);
  }
  c.art.json("hc3_fit.json", {{"Lambda1", k.Lambda1}, {"Theta0", k.Theta0}, {"fits", fits}});
}

struct GlArgs {
  double kappa = 10;
  double H = 0;  // 0: use mu
  double mu = 0.55;
  std::string mode = "frozen";
  std::string init = "best";
  int refinements = 0;
  double box_factor = 3.0;
  double tol = 1e-7;
  int max_iter = 4000;

  double field() const { return H > 0 ? H : kappa / mu; }
};

struct GlRun {
  Mesh mesh;
  MinimizationOutcome outcome;
};

GlRun minimize(Context& c, const GlArgs& a) {
  require(a.kappa > 0 && a.field() > 0, ErrorKind::kInvalidParameter, "kappa and H must be positive");
  require(a.refinements >= 0, ErrorKind::kInvalidParameter, "refinements must be nonnegative");
  const double H = a.field(), b = a.kappa * H;
  DescentOptions d = c.descent();
  d.tol = a.tol;
  d.max_iter = a.max_iter;
  GlRun r;
  if (a.mode == "coupled") {
    BoxMesh box = make_box_mesh(c.poly, field_sizing(c.poly, b, {}), a.box_factor);
    for (int l = 0; l < a.refinements; ++l) box = refine_uniform(box);
    CoupledOptions co;
    co.psi = d;
    co.base = make_polygon_gauge(c.poly, b);
    if (a.init != "best") co.psi.init = init_from_string(a.init);
    r.outcome = minimize_coupled(box, a.kappa, H, co);
    r.mesh = box.domain;
    return r;
  }
  r.mesh = make_field_mesh(c.poly, b, {});
  for (int l = 0; l < a.refinements; ++l) r.mesh = refine_uniform(r.mesh);
  const GaugeField gauge = make_polygon_gauge(c.poly, b);
  if (a.init == "best") {
    r.outcome = minimize_frozen_multistart(r.mesh, a.kappa, H, gauge, d);
  } else {
    d.init = init_from_string(a.init);
    r.outcome = minimize_frozen(r.mesh, a.kappa, H, gauge, d);
  }
  return r;
}

void run_gl_min(Context& c, const GlArgs& a) {
  const GlRun r = minimize(c, a);
  const auto& o = r.outcome;
  Table t{{"kappa", "H", "mode", "energy", "l2", "max_abs", "trivial", "iterations", "grad_norm", "nodes", "sweeps",
           "curl_l2"},
          {}};
  t.add({num(a.kappa), num(a.field()), a.mode, num(o.energy), num(o.l2), num(o.max_abs), flag(o.trivial_flag),
         num(o.iterations), num(o.grad_norm), num(r.mesh.node_count()), num(o.sweeps), num(o.curl_l2)});
  c.art.csv("gl-min.csv", t);
  std::ostringstream state;
  save_state(state, o.state, r.mesh);
  c.art.text("gl-min_state.json", state.str());
}

struct OnsetArgs {
  std::vector<double> kappas = {8, 12};
  double tol_rel = 0.002;
  int refinements = 1;
  double hc3_tol = 1e-3;
};

void run_onset(Context& c, const OnsetArgs& a) {
  const Constants k = constants(c);
  OnsetOptions o;
  o.Lambda1 = k.Lambda1;
  o.Theta0 = k.Theta0;
  o.refinements = a.refinements;
  o.descent = c.descent();
  const auto lin = solve_hc3_sweep(c.poly, a.kappas, a.hc3_tol, k.Lambda1, k.Theta0, {}, c.g.jobs);
  std::vector<OnsetResult> res(a.kappas.size());
  parallel_for(a.kappas.size(), c.g.jobs, [&](std::size_t i) {
    res[i] = detect_onset(c.poly, a.kappas[i], a.tol_rel * a.kappas[i] / k.Lambda1, o);
  });
  Table t{{"kappa", "H_star", "bracket_lo", "bracket_hi", "probes", "monotone", "H_lin", "rel_diff"}, {}};
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& r = res[i];
    t.add({num(a.kappas[i]), num(r.H_star), num(r.bracket[0]), num(r.bracket[1]), num(r.probes), flag(r.monotone),
           num(lin[i].H_lin), num(std::abs(r.H_star - lin[i].H_lin) / lin[i].H_lin)});
    for (const auto& w : r.warnings) std::cerr << "kappa " << a.kappas[i] << ": " << w << "\n";
  }
  c.art.csv("onset.csv", t);
}

struct DecayArgs {
  std::vector<double> kappas = {10, 15, 20, 30};
  double mu = 0.55;
  std::vector<double> epsilons = {0.0, 0.1, 0.2, 0.3};
  std::vector<double> Ms = {2, 3, 4};
  std::vector<double> mass_Ms = {2, 4, 6, 8};
  std::string target = "corners";
  int refinements = 1;
};

void run_decay(Context& c, const DecayArgs& a) {
  require(a.kappas.size() >= 2, ErrorKind::kInvalidParameter, "need at least two kappa values");
  require(a.target == "corners" || a.target == "boundary", ErrorKind::kInvalidParameter, "unknown decay target");
  const Constants k = constants(c);
  const std::vector<int> sigma = select_corners(k.spectrum, a.mu);
  require(a.target == "boundary" || !sigma.empty(), ErrorKind::kInvalidParameter,
          "no corner has mu1 <= mu (corner regime not reached)");
  Table t{{"kappa", "H", "epsilon", "M", "weighted_mass", "near_mass", "ratio", "fitted_rate"}, {}};
  Table m{{"kappa", "H", "M", "sigma_prime_fraction", "off_corner"}, {}};
  for (std::size_t s = 0; s < k.spectrum.mu_by_corner.size(); ++s) m.columns.push_back("corner_" + std::to_string(s));
  std::map<std::pair<double, double>, std::vector<double>> series;
  for (double kappa : a.kappas) {
    GlArgs g;
    g.kappa = kappa;
    g.mu = a.mu;
    g.refinements = a.refinements;
    const GlRun r = minimize(c, g);
    require(!r.outcome.trivial_flag, ErrorKind::kUndefinedRatio, "normal state at kappa " + num(kappa));
    for (double e : a.epsilons)
      for (double M : a.Ms) {
        const AgmonReport rep = a.target == "corners" ? agmon_corner(r.mesh, r.outcome, sigma, e, M)
                                                      : agmon_boundary(r.mesh, r.outcome, e, M);
        t.add({num(kappa), num(g.field()), num(e), num(M), num(rep.weighted_mass), num(rep.near_mass),
               num(rep.ratio), num(rep.fitted_rate)});
        series[{e, M}].push_back(rep.ratio);
      }
    for (double M : a.mass_Ms) {
      const CornerMassProfile p = corner_mass_profile(r.mesh, r.outcome, k.spectrum, a.mu, M);
      std::vector<std::string> row = {num(kappa), num(g.field()), num(M), num(p.sigma_prime_fraction),
                                      num(p.off_corner)};
      for (double f : p.fraction) row.push_back(num(f));
      m.add(row);
    }
  }
  Table tr{{"epsilon", "M", "slope", "stderr", "positive_trend"}, {}};
  for (const auto& [key, ratios] : series) {
    const Trend tt = linear_trend(a.kappas, ratios);
    tr.add({num(key.first), num(key.second), num(tt.slope), num(tt.stderr_slope), flag(tt.positive)});
  }
  c.art.csv("decay.csv", t);
  c.art.csv("decay_mass.csv", m);
  c.art.csv("decay_trend.csv", tr);
}

struct CornerEnergyArgs {
  double mu = 0.55;
  std::vector<double> kappas = {15, 30};
  int levels = 2;
  double R = 20;
  int sector_refinements = 2;
  double sector_tol = 1e-3;
};

void run_corner_energy(Context& c, const CornerEnergyArgs& a) {
  std::set<double> seen;
  std::vector<double> angles;
  for (double al : c.poly.angles())
    if (seen.insert(std::round(al * 1e9) / 1e9).second) angles.push_back(al);
  SectorModelOptions so;
  so.refinements = a.sector_refinements;
  so.descent = c.descent();
  std::vector<SectorModelResult> sectors(angles.size());
  parallel_for(angles.size(), c.g.jobs, [&](std::size_t i) {
    sectors[i] = sector_model(angles[i], a.mu, a.mu, a.R, a.sector_tol, so);
  });
  // Equal angles share one run; give each corner its exact angle.
  std::vector<SectorModelResult> by_corner;
  for (double al : c.poly.angles())
    for (const auto& s : sectors)
      if (std::abs(s.alpha - al) <= 1e-9) {
        by_corner.push_back(s);
        by_corner.back().alpha = al;
        break;
      }
  Table st{{"alpha", "energy", "error", "max_abs", "decay_rate", "trivial"}, {}};
  for (const auto& s : sectors)
    st.add({num(s.alpha), num(s.energy), num(s.error), num(s.max_abs), num(s.decay_rate), flag(s.trivial)});
  Table t{{"kappa", "H", "mu", "gl_energy", "gl_error", "corner_sum", "corner_sum_error", "rel_gap", "degenerate"},
          {}};
  DescentOptions d = c.descent();
  for (double kappa : a.kappas) {
    const double H = kappa / a.mu;
    const LeveledEnergy e = frozen_energy_levels(c.poly, kappa, H, a.levels, d);
    const EnergyReport r = energy_vs_corner_sum(e.energy, c.poly, by_corner, a.mu);
    t.add({num(kappa), num(H), num(a.mu), num(e.energy), num(e.error), num(r.corner_sum), num(r.corner_sum_error),
           num(r.rel_gap), flag(r.degenerate)});
  }
  c.art.csv("corner-energy.csv", t);
  c.art.csv("corner-energy_sectors.csv", st);
}

void run_sanity(Context& c, const GlArgs& a) {
  const GlRun r = minimize(c, a);
  const SanityReport s = minimizer_sanity(r.mesh, r.outcome);
  Table t{{"item", "lhs", "rhs", "holds"}, {}};
  for (const auto& it : s.items) t.add({it.name, num(it.lhs), num(it.rhs), flag(it.holds)});
  c.art.csv("sanity.csv", t);
  c.art.json("sanity.json", {{"all_hold", s.all_hold},
                             {"field_constant", std::isnan(s.field_constant) ? nlohmann::ordered_json()
                                                                             : nlohmann::ordered_json(s.field_constant)},
                             {"energy", r.outcome.energy},
                             {"trivial", r.outcome.trivial_flag}});
  std::cout << (s.all_hold ? "all bounds hold" : "bound violated") << "\n";
}

// Hash input: the effective configuration without the output directory and
// worker count, which do not change results. Quotes, brackets and blanks are
// dropped since a list read back from a file renders differently.
std::string hashed_config(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("out=", 0) == 0 || line.rfind("jobs=", 0) == 0) continue;
    for (char ch : line)
      if (ch != '"' && ch != '[' && ch != ']' && ch != ' ') out += ch;
    out += '\n';
  }
  return out;
}

// Globals plus the section of the subcommand that ran.
// Output directory and worker count are rewritten with the values after the
// environment overrides.
std::string effective_config(const std::string& text, const std::string& sub, const Globals& g) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    const std::string key = line.substr(0, line.find('='));
    const auto dot = key.find('.');
    if (key == "out") out += "out=\"" + g.out + "\"\n";
    else if (key == "jobs") out += "jobs=" + std::to_string(g.jobs) + "\n";
    else if (dot == std::string::npos || key.compare(0, dot, sub) == 0) out += line + "\n";
  }
  return out;
}

bool on_command_line(int argc, char** argv, const char* name) {
  const std::size_t n = std::strlen(name);
  for (int i = 1; i < argc; ++i)
    if (std::strncmp(argv[i], name, n) == 0 && (argv[i][n] == '\0' || argv[i][n] == '=')) return true;
  return false;
}

void add_gl_options(CLI::App* s, GlArgs& a) {
  s->add_option("--kappa", a.kappa, "GL parameter");
  s->add_option("--H", a.H, "applied field (0: kappa / mu)");
  s->add_option("--mu", a.mu, "kappa / H when --H is 0");
  s->add_option("--mode", a.mode)->check(CLI::IsMember({"frozen", "coupled"}));
  s->add_option("--init", a.init, "best = lower of linear-mode and random")
      ->check(CLI::IsMember({"best", "zero", "linear-mode", "random"}));
  s->add_option("--refinements", a.refinements);
  s->add_option("--box-factor", a.box_factor);
  s->add_option("--tol", a.tol, "relative gradient tolerance");
  s->add_option("--max-iter", a.max_iter);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corner superconductivity and magnetic Schroedinger spectra"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "INI file; [subcommand] sections set subcommand options");
  app.set_version_flag("--version", kVersion);
  Globals g;
  app.add_option("--out", g.out, "output directory (env " + std::string(kOutEnv) + ")");
  app.add_option("--jobs", g.jobs, "worker threads (env " + std::string(kJobsEnv) + ")")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "seed for random starts");
  app.add_option("--vertices", g.vertices, "polygon as x0 y0 x1 y1 ...");
  app.add_option("--mu1-accuracy", g.mu1_accuracy, "target error of corner energies");
  app.require_subcommand(1);
  app.fallthrough();

  SectorMu1Args sm;
  auto* s_mu1 = app.add_subcommand("sector-mu1", "ground energy of sectors versus opening angle");
  s_mu1->add_option("--alphas", sm.alphas, "openings as multiples of pi");
  s_mu1->add_option("--h-layer", sm.h_layer);
  s_mu1->add_option("--refinements", sm.refinements);
  auto* s_theta = app.add_subcommand("theta0", "half-plane constant, sector and 1D cross-check");
  SpectrumArgs sp;
  auto* s_spec = app.add_subcommand("polygon-spectrum", "lambda1(B) of the polygon");
  s_spec->add_option("--B", sp.B, "field strengths");
  s_spec->add_option("--refinements", sp.refinements);
  s_spec->add_option("--h-layer", sp.h_layer);
  Hc3Args hc;
  auto* s_hc3 = app.add_subcommand("hc3", "linear critical field and expansion fit");
  s_hc3->add_option("--kappas", hc.kappas);
  s_hc3->add_option("--tol", hc.tol, "bound on |lambda1(kappa H) - kappa^2| / kappa^2");
  s_hc3->add_option("--orders", hc.orders, "fit orders J");
  s_hc3->add_option("--refinements", hc.refinements);
  GlArgs gl;
  auto* s_gl = app.add_subcommand("gl-min", "minimize the GL energy");
  add_gl_options(s_gl, gl);
  OnsetArgs on;
  auto* s_on = app.add_subcommand("onset", "nonlinear onset field against the linear one");
  s_on->add_option("--kappas", on.kappas);
  s_on->add_option("--tol-rel", on.tol_rel, "bracket width relative to kappa / Lambda1");
  s_on->add_option("--refinements", on.refinements);
  s_on->add_option("--hc3-tol", on.hc3_tol);
  DecayArgs de;
  auto* s_de = app.add_subcommand("decay", "Agmon ratios and corner mass over a kappa sweep");
  s_de->add_option("--kappas", de.kappas);
  s_de->add_option("--mu", de.mu, "kappa / H");
  s_de->add_option("--epsilons", de.epsilons);
  s_de->add_option("--Ms", de.Ms, "near-zone radii in magnetic lengths");
  s_de->add_option("--mass-Ms", de.mass_Ms, "corner-zone radii in units of 1/kappa");
  s_de->add_option("--target", de.target)->check(CLI::IsMember({"corners", "boundary"}));
  s_de->add_option("--refinements", de.refinements);
  CornerEnergyArgs ce;
  auto* s_ce = app.add_subcommand("corner-energy", "GL minimum against the sum of corner energies");
  s_ce->add_option("--mu", ce.mu);
  s_ce->add_option("--kappas", ce.kappas);
  s_ce->add_option("--levels", ce.levels, "mesh levels of the GL minimum");
  s_ce->add_option("--R", ce.R, "sector truncation radius");
  s_ce->add_option("--sector-refinements", ce.sector_refinements);
  s_ce->add_option("--sector-tol", ce.sector_tol);
  GlArgs sa;
  auto* s_sa = app.add_subcommand("sanity", "a-priori bounds at a computed minimizer");
  add_gl_options(s_sa, sa);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  // Environment beats the config file, the command line beats both.
  if (const char* v = std::getenv(kOutEnv); v && *v && !on_command_line(argc, argv, "--out")) g.out = v;
  if (const char* v = std::getenv(kJobsEnv); v && *v && !on_command_line(argc, argv, "--jobs")) {
    char* end = nullptr;
    const long j = std::strtol(v, &end, 10);
    if (*end != '\0' || j < 1) {
      std::cerr << kJobsEnv << " must be a positive integer\n";
      return 2;
    }
    g.jobs = static_cast<int>(j);
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string config = effective_config(app.config_to_str(true, false), sub->get_name(), g);
  try {
    PolygonDomain poly = make_domain(g.vertices);
    Artifacts art(sub->get_name(), hashed_config(config), g.out);
    Context c{g, poly, art};
    if (sub == s_mu1) run_sector_mu1(c, sm);
    else if (sub == s_theta) run_theta0(c);
    else if (sub == s_spec) run_polygon_spectrum(c, sp);
    else if (sub == s_hc3) run_hc3(c, hc);
    else if (sub == s_gl) run_gl_min(c, gl);
    else if (sub == s_on) run_onset(c, on);
    else if (sub == s_de) run_decay(c, de);
    else if (sub == s_ce) run_corner_energy(c, ce);
    else if (sub == s_sa) run_sanity(c, sa);
    art.text(sub->get_name() + ".ini", config);
    for (const auto& p : art.commit()) std::cout << "wrote " << p.string() << "\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
