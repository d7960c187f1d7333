// photon: run verification experiments from a TOML config.
//
//   photon <check-forms|boost-check|number-density|tail-fit> --config FILE
//          [--out DIR] [--tolerance X] [--seed N] [--grid-scale S]
//
// Exit codes: 0 pass, 1 usage or config error, 2 tolerance breach.

#include "config.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace photon;
using namespace photon::cli;
using nlohmann::json;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_config = 1;
constexpr int exit_breach = 2;

struct Overrides {
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  int grid_scale = 1;
  std::optional<std::string> out;
};

struct RunResult {
  json results;
  bool pass = true;
  std::vector<json> grids;
  json section;
  double tolerance = 0.0;
};

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json scaled_grid(const Config& c, int scale) {
  if (!c.grid) throw ConfigError("config: missing required table [grid]");
  json d = *c.grid;
  if (scale == 1) return d;
  if (d["type"] == "spherical") {
    for (const char* k : {"n_r", "n_theta", "n_phi"}) d[k] = d[k].get<std::int64_t>() * scale;
  } else {
    if (scale & (scale - 1)) throw ConfigError("--grid-scale must be a power of two for Cartesian grids");
    d["n"] = d["n"].get<std::int64_t>() * scale;
  }
  return d;
}

GridPtr make_grid(const json& d) {
  try {
    return grid_from_descriptor(d);
  } catch (const Error& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

WaveFunctionK build_state(const StateSpec& s, const GridPtr& grid, std::uint64_t seed) {
  WaveFunctionK wf = [&]() -> WaveFunctionK {
    if (s.kind == "gaussian") return states::gaussian(grid, s.center, s.width, s.helicity, s.form, s.shift);
    if (s.kind == "two_helicity") return states::two_helicity(grid, s.chi_prime, s.center, s.width, s.form);
    if (s.kind == "random") return states::random_superposition(grid, s.seed.value_or(seed), s.modes, s.form);
    if (s.kind == "laguerre") {
      auto f = states::radial_laguerre(s.order);
      return s.helicity > 0 ? make_wavefunction(grid, f, {}, s.form) : make_wavefunction(grid, {}, f, s.form);
    }
    LocalizedSpec ls;
    ls.position = s.position;
    ls.time = s.time;
    ls.sigma = s.helicity;
    ls.chi = parse_chi(s.chi);
    return localized_state(grid, ls, s.form);
  }();
  // A localized state carries its time in its phase; the others are evolved.
  if (s.kind != "localized" && s.time != 0.0) wf = evolve(wf, s.time);
  return s.normalize ? normalize(wf) : wf;
}

json states_json(const Config& c, const std::vector<std::string>& names, std::uint64_t seed) {
  json a = json::array();
  for (const auto& n : names) a.push_back(c.state(n).to_json(seed));
  return a;
}

// ---------------------------------------------------------------- commands

RunResult check_forms(const Config& c, const Overrides& o, std::uint64_t seed) {
  if (!c.check_forms) throw ConfigError("config: missing required table [check_forms]");
  RunResult r;
  r.tolerance = o.tolerance.value_or(c.tolerance.value_or(1e-9));
  const json gd = scaled_grid(c, o.grid_scale);
  const GridPtr grid = make_grid(gd);
  r.grids.push_back(grid->descriptor());

  std::vector<std::string> used;
  json pairs = json::array();
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [a, b] : c.check_forms->pairs) {
    const auto phi = build_state(c.state(a), grid, seed);
    const auto psi = build_state(c.state(b), grid, seed);
    for (const auto& n : {a, b})
      if (std::find(used.begin(), used.end(), n) == used.end()) used.push_back(n);
    const auto rep = compare_forms(phi, psi);
    json j = rep.to_json();
    j.erase("grid");
    j["phi"] = a;
    j["psi"] = b;
    j["pass"] = rep.max_deviation <= r.tolerance;
    pairs.push_back(j);
    if (rep.max_deviation >= worst) {
      worst = rep.max_deviation;
      worst_name = a + "/" + b + ": " + rep.worst_pair;
    }
  }
  r.pass = worst <= r.tolerance;
  r.results = {{"pairs", pairs}, {"max_relative_deviation", worst}, {"worst", worst_name}};
  r.section = {{"check_forms", {{"pairs", json(c.check_forms->pairs)}}}, {"states", states_json(c, used, seed)}};
  if (!r.pass)
    std::cerr << "tolerance breach: max relative deviation " << fmt(worst) << " > " << fmt(r.tolerance) << " ("
              << worst_name << ")\n";
  return r;
}

RunResult boost_check(const Config& c, const Overrides& o, std::uint64_t seed) {
  if (!c.boost_check) throw ConfigError("config: missing required table [boost_check]");
  const auto& s = *c.boost_check;
  RunResult r;
  r.tolerance = o.tolerance.value_or(c.tolerance.value_or(1e-6));
  const json gd = scaled_grid(c, o.grid_scale);
  const GridPtr grid = make_grid(gd);
  if (!(s.direction.norm() > 0.0)) throw ConfigError("boost_check.direction: must be non-zero");
  const Boost boost(s.rapidity, s.direction);
  const auto phi = build_state(c.state(s.phi), grid, seed);
  const auto psi = build_state(c.state(s.psi), grid, seed);
  const GridPtr target = boosted_grid(*grid, boost);
  r.grids = {grid->descriptor(), target->descriptor()};

  const double defect = invariance_defect(embed(phi), embed(psi), boost, target);
  const double k_max = gd["k_max"].get<double>();
  const auto ladder = invariance_ladder(phi, psi, boost, refinement_grids(k_max, static_cast<std::size_t>(s.ladder_levels)));
  const bool monotone = ladder_converges(ladder);
  json lj = json::array();
  for (const auto& step : ladder) lj.push_back({{"grid", step.grid}, {"defect", step.defect}});

  json helicity = json::object();
  double leakage = 0.0;
  for (const auto& [name, wf] : {std::pair{s.phi, &phi}, std::pair{s.psi, &psi}}) {
    const bool single = (wf->helicity_norm_squared(+1) > 0.0) != (wf->helicity_norm_squared(-1) > 0.0);
    if (!single || helicity.contains(name)) continue;
    const auto h = helicity_invariance_check(*wf, boost, target);
    helicity[name] = {{"max_leakage", h.max_leakage},
                      {"max_magnitude_error", h.max_magnitude_error},
                      {"max_gauge_part", h.max_gauge_part},
                      {"max_wigner_angle", h.max_wigner_angle}};
    leakage = std::max(leakage, h.max_leakage);
  }
  constexpr double leakage_tolerance = 1e-10;

  r.pass = defect <= r.tolerance && monotone && leakage <= leakage_tolerance;
  r.results = {{"rapidity", s.rapidity},
               {"direction", vec_json(boost.direction())},
               {"defect", defect},
               {"refinement_ladder", lj},
               {"ladder_monotone", monotone},
               {"helicity", helicity},
               {"leakage_tolerance", leakage_tolerance}};
  r.section = {{"boost_check",
                {{"rapidity", s.rapidity},
                 {"direction", vec_json(s.direction)},
                 {"phi", s.phi},
                 {"psi", s.psi},
                 {"ladder_levels", s.ladder_levels}}},
               {"states", states_json(c, {s.phi, s.psi}, seed)}};
  if (defect > r.tolerance) std::cerr << "tolerance breach: defect " << fmt(defect) << " > " << fmt(r.tolerance) << "\n";
  if (!monotone) std::cerr << "tolerance breach: refinement ladder is not decreasing by 10x per step\n";
  if (leakage > leakage_tolerance) std::cerr << "tolerance breach: helicity leakage " << fmt(leakage) << "\n";
  return r;
}

/// (w^2/2)^{3/2} exp(-w^2 |r + a|^2 / 4) exp(i k0.(r + a)): the number
/// amplitude of exp(-|k - k0|^2 / w^2) exp(i k.a) at t = 0, chi = 0.
cdouble gaussian_profile(const StateSpec& s, const Vec3& r) {
  const Vec3 x = r + s.shift;
  const double w2 = s.width * s.width;
  return std::pow(0.5 * w2, 1.5) * std::exp(-0.25 * w2 * x.squaredNorm()) * std::exp(I * s.center.dot(x));
}

RunResult number_density(const Config& c, const Overrides& o, std::uint64_t seed, const fs::path& out) {
  if (!c.number_density) throw ConfigError("config: missing required table [number_density]");
  const auto& s = *c.number_density;
  RunResult r;
  r.tolerance = o.tolerance.value_or(c.tolerance.value_or(1e-9));
  const json gd = scaled_grid(c, o.grid_scale);
  if (gd["type"] != "cartesian") throw ConfigError("number_density: needs a cartesian grid");
  const GridPtr grid = make_grid(gd);
  const auto& cg = static_cast<const CartesianGrid&>(*grid);
  r.grids.push_back(grid->descriptor());
  const StateSpec& spec = c.state(s.state);
  const auto wf = build_state(spec, grid, seed);
  const ChiSpec chi = parse_chi(s.chi);

  const auto amp = number_amplitude(wf, s.time, chi, AmplitudePath::fft);
  const double dv = cg.cell_volume_r();
  const double norm2 = wf.norm_squared();
  const double probability = amp.total_probability();
  json checks{{"total_probability", probability}, {"probability_error", std::abs(probability - norm2)}};
  double worst = std::abs(probability - norm2);

  if (spec.kind == "localized" && s.time == spec.time && s.chi == spec.chi) {
    const auto site = cg.r_index(spec.position);
    if (site) {
      const auto& v = amp.helicity(spec.helicity);
      const double peak = std::abs(v[*site]);
      double off = 0.0;
      for (int sigma : {+1, -1}) {
        const auto& w = amp.helicity(sigma);
        for (std::size_t i = 0; i < w.size(); ++i)
          if (!(sigma == spec.helicity && i == *site)) off = std::max(off, std::abs(w[i]));
      }
      checks["delta_site_probability"] = std::norm(v[*site]) * dv;
      checks["max_off_site_residual"] = off / peak;
      worst = std::max(worst, off / peak);
    } else {
      checks["delta_site_probability"] = nullptr;
    }
  }
  if (spec.kind == "gaussian" && s.time == 0.0 && spec.time == 0.0 && chi.kind == ChiSpec::Kind::zero) {
    const double f = wf.analytic_scale();
    double err = 0.0, peak = 0.0;
    const auto& v = amp.helicity(spec.helicity);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const cdouble exact = f * gaussian_profile(spec, cg.r_point(i));
      err = std::max(err, std::abs(v[i] - exact));
      peak = std::max(peak, std::abs(exact));
    }
    checks["max_profile_error"] = err / peak;
    worst = std::max(worst, err / peak);
  }
  if (s.path_check_points > 0) {
    std::vector<Vec3> pts;
    std::vector<std::size_t> idx;
    const std::size_t stride = std::max<std::size_t>(1, grid->size() / static_cast<std::size_t>(s.path_check_points));
    // Start from the node of largest density so the comparison is not all tail.
    std::size_t top = 0;
    for (std::size_t i = 1; i < amp.size(); ++i)
      if (amp.density(i) > amp.density(top)) top = i;
    for (int p = 0; p < s.path_check_points; ++p) {
      idx.push_back((top + static_cast<std::size_t>(p) * stride) % grid->size());
      pts.push_back(cg.r_point(idx.back()));
    }
    const auto quad = number_amplitude(wf, s.time, chi, AmplitudePath::quadrature, pts);
    double diff = 0.0, scale = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p)
      for (int h = 0; h < 2; ++h) {
        diff = std::max(diff, std::abs(quad.values[h][p] - amp.values[h][idx[p]]));
        scale = std::max(scale, std::abs(amp.values[h][idx[p]]));
      }
    const double rel = scale > 0.0 ? diff / scale : diff;
    checks["path_difference"] = rel;
    worst = std::max(worst, rel);
  }

  std::ofstream csv(out / "number_density.csv");
  csv << "x,y,z,abs_c_plus,abs_c_minus,density,probability\n";
  for (std::size_t i = 0; i < amp.size(); ++i) {
    const Vec3 p = cg.r_point(i);
    const double d = amp.density(i);
    csv << fmt(p.x()) << ',' << fmt(p.y()) << ',' << fmt(p.z()) << ',' << fmt(std::abs(amp.values[0][i])) << ','
        << fmt(std::abs(amp.values[1][i])) << ',' << fmt(d) << ',' << fmt(d * dv) << '\n';
  }

  r.pass = worst <= r.tolerance;
  r.results = {{"checks", checks}, {"max_residual", worst}, {"csv", "number_density.csv"}, {"time", s.time}};
  r.section = {{"number_density",
                {{"state", s.state}, {"time", s.time}, {"chi", s.chi}, {"path_check_points", s.path_check_points}}},
               {"states", states_json(c, {s.state}, seed)}};
  if (!r.pass) std::cerr << "tolerance breach: residual " << fmt(worst) << " > " << fmt(r.tolerance) << "\n";
  return r;
}

RunResult tail_fit(const Config& c, const Overrides& o, const fs::path& out) {
  const TailFitSpec s = c.tail_fit.value_or(TailFitSpec{});
  RunResult r;
  r.tolerance = o.tolerance.value_or(c.tolerance.value_or(0.1));
  TailFitRequest req;
  req.alpha = s.alpha;
  req.radii = log_spaced(s.r_min, s.r_max, static_cast<std::size_t>(s.n_radii));
  req.epsilons = s.epsilons;
  req.k_scale = s.k_scale;
  TailFitReport rep;
  try {
    rep = tail_exponent(req);
  } catch (const Error& e) {
    throw ConfigError(std::string("tail_fit: ") + e.what());
  }

  std::optional<double> expected = s.expected_slope;
  if (!expected && s.alpha != 0.0) expected = -3.0 - s.alpha;
  json checks{{"max_quadrature_error", rep.max_quadrature_error},
              {"max_extrapolation_error", rep.max_extrapolation_error},
              {"quadrature_tolerance", s.quadrature_tolerance}};
  bool pass = rep.max_quadrature_error <= s.quadrature_tolerance &&
              rep.max_extrapolation_error <= s.quadrature_tolerance;
  if (rep.limit_vanishes) {
    // No power law survives eps -> 0; the check is that the extrapolated
    // field is zero to the certification tolerance.
    checks["limit_vanishes"] = true;
  } else if (expected) {
    checks["expected_slope"] = *expected;
    checks["slope_error"] = std::abs(rep.slope - *expected);
    pass = pass && std::abs(rep.slope - *expected) <= r.tolerance;
  }

  std::ofstream csv(out / "tail_fit.csv");
  csv << "r,abs_amplitude,density,closed_form,abs_amplitude_eps_min\n";
  for (std::size_t i = 0; i < rep.radii.size(); ++i) {
    const double f = rep.extrapolated[i];
    csv << fmt(rep.radii[i]) << ',' << fmt(std::abs(f)) << ',' << fmt(f * f) << ',' << fmt(rep.closed_form[i]) << ','
        << fmt(std::abs(rep.values[i].back())) << '\n';
  }

  r.pass = pass;
  r.results = {{"fit", rep.to_json()}, {"checks", checks}, {"csv", "tail_fit.csv"}};
  json section{{"alpha", s.alpha},
               {"r_min", s.r_min},
               {"r_max", s.r_max},
               {"n_radii", s.n_radii},
               {"epsilons", rep.epsilons},
               {"k_scale", s.k_scale},
               {"quadrature_tolerance", s.quadrature_tolerance}};
  if (expected) section["expected_slope"] = *expected;
  r.section = {{"tail_fit", section}};
  if (!r.pass) std::cerr << "tolerance breach: tail fit failed its checks (slope " << fmt(rep.slope) << ")\n";
  return r;
}

int run(const std::string& command, const std::string& config_path, const Overrides& o) {
  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  Config c;
  try {
    c = parse_config(toml::parse_file(config_path));
  } catch (const toml::parse_error& e) {
    std::cerr << "config error: " << config_path << ": " << e.description() << " (line " << e.source().begin.line
              << ")\n";
    return exit_config;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  }
  const std::uint64_t seed = o.seed.value_or(c.seed);
  const fs::path out = o.out.value_or(c.out_dir);

  RunResult r;
  try {
    fs::create_directories(out);
    if (command == "check-forms") r = check_forms(c, o, seed);
    else if (command == "boost-check") r = boost_check(c, o, seed);
    else if (command == "number-density") r = number_density(c, o, seed, out);
    else r = tail_fit(c, o, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const Error& e) {
    std::cerr << "config error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_config;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  }

  json config{{"tolerance", r.tolerance}, {"seed", seed}, {"grid_scale", o.grid_scale}};
  if (c.grid && command != "tail-fit") config["grid"] = scaled_grid(c, o.grid_scale);
  config.update(r.section);
  json report{{"tool", "photon"},
              {"version", photon::version},
              {"command", command},
              {"config", config},
              {"grids", r.grids},
              {"results", r.results},
              {"pass", r.pass}};
  const std::string stem = command;
  std::ofstream(out / (stem + ".json")) << report.dump(2) << "\n";
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json meta{{"started_utc", started},
            {"finished_utc", utc_now()},
            {"elapsed_seconds", elapsed},
            {"threads", thread_count()},
            {"config_path", config_path},
            {"out_dir", out.string()}};
  std::ofstream(out / (stem + ".meta.json")) << meta.dump(2) << "\n";
  std::cout << command << ": " << (r.pass ? "pass" : "FAIL") << " (report " << (out / (stem + ".json")).string()
            << ")\n";
  return r.pass ? exit_pass : exit_breach;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-photon formalism checks"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides o;
  std::string out;
  double tolerance = 0.0;
  std::uint64_t seed = 0;

  std::vector<std::string> names{"check-forms", "boost-check", "number-density", "tail-fit"};
  for (const auto& n : names) {
    auto* sub = app.add_subcommand(n);
    sub->add_option("--config", config_path, "TOML experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides out_dir)");
    sub->add_option("--tolerance", tolerance, "tolerance override")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for random states");
    sub->add_option("--grid-scale", o.grid_scale, "grid refinement multiplier")->check(CLI::Range(1, 64));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--out")) o.out = out;
    if (sub->count("--tolerance")) o.tolerance = tolerance;
    if (sub->count("--seed")) o.seed = seed;
    return run(sub->get_name(), config_path, o);
  }
  return exit_config;
}
