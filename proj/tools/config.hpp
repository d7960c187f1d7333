#pragma once
// Experiment configuration: TOML in, validated structs out.
//
// Every table is read through a KeyReader that remembers which keys were
// consumed; leftovers are reported as unknown keys. The resolved config
// (defaults filled in, overrides applied) is re-emitted as JSON in reports.

#include "photon/photon.hpp"

#include <json.hpp>
#include <toml.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace photon::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class KeyReader {
 public:
  KeyReader(const toml::table& t, std::string path) : t_(t), path_(std::move(path)) {}

  bool has(const std::string& k) const { return t_.contains(k); }

  template <typename T>
  std::optional<T> get(const std::string& k) {
    seen_.insert(k);
    const toml::node* n = t_.get(k);
    if (!n) return std::nullopt;
    if constexpr (std::is_same_v<T, double>) {
      if (auto v = n->value<double>()) return *v;  // accepts integers too
    } else if constexpr (std::is_same_v<T, std::int64_t>) {
      if (auto v = n->value_exact<std::int64_t>()) return *v;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (auto v = n->value_exact<bool>()) return *v;
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (auto v = n->value_exact<std::string>()) return *v;
    } else if constexpr (std::is_same_v<T, Vec3>) {
      if (const auto* a = n->as_array(); a && a->size() == 3) {
        Vec3 out;
        bool ok = true;
        for (std::size_t i = 0; i < 3; ++i) {
          const auto v = (*a)[i].value<double>();
          ok = ok && v.has_value();
          if (v) out[static_cast<Eigen::Index>(i)] = *v;
        }
        if (ok) return out;
      }
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (const auto* a = n->as_array()) {
        std::vector<double> out;
        for (const auto& e : *a) {
          const auto v = e.value<double>();
          if (!v) fail(k, "a list of numbers");
          out.push_back(*v);
        }
        return out;
      }
    }
    fail(k, type_name<T>());
  }

  template <typename T>
  T require(const std::string& k) {
    auto v = get<T>(k);
    if (!v) throw ConfigError(path_ + ": missing required key '" + k + "'");
    return *v;
  }

  template <typename T>
  T value(const std::string& k, T fallback) {
    auto v = get<T>(k);
    return v ? *v : fallback;
  }

  const toml::table* table(const std::string& k) {
    seen_.insert(k);
    const toml::node* n = t_.get(k);
    if (!n) return nullptr;
    if (!n->is_table()) fail(k, "a table");
    return n->as_table();
  }

  const toml::array* array(const std::string& k) {
    seen_.insert(k);
    const toml::node* n = t_.get(k);
    if (!n) return nullptr;
    if (!n->is_array()) fail(k, "an array");
    return n->as_array();
  }

  void finish() const {
    for (const auto& [key, node] : t_) {
      const std::string name(key.str());
      if (!seen_.count(name)) throw ConfigError(path_ + ": unknown key '" + name + "'");
    }
  }

  const std::string& path() const { return path_; }

 private:
  template <typename T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, double>) return "a number";
    if constexpr (std::is_same_v<T, std::int64_t>) return "an integer";
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    if constexpr (std::is_same_v<T, std::string>) return "a string";
    if constexpr (std::is_same_v<T, Vec3>) return "a list of three numbers";
    return "a list of numbers";
  }

  [[noreturn]] void fail(const std::string& k, const char* what) const {
    throw ConfigError(path_ + "." + k + ": expected " + what);
  }

  const toml::table& t_;
  std::string path_;
  std::set<std::string> seen_;
};

inline nlohmann::json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

struct StateSpec {
  std::string name;
  std::string kind;  // gaussian | two_helicity | random | laguerre | localized
  Form form = Form::landau_peierls;
  bool normalize = true;
  int helicity = +1;
  Vec3 center = Vec3::Zero();
  double width = 1.0;
  Vec3 shift = Vec3::Zero();
  double chi_prime = 0.0;
  std::optional<std::uint64_t> seed;
  int modes = 3;
  int order = 0;
  Vec3 position = Vec3::Zero();
  double time = 0.0;
  std::string chi = "zero";

  nlohmann::json to_json(std::uint64_t global_seed) const {
    nlohmann::json j{{"name", name}, {"kind", kind}, {"form", form_name(form)}, {"normalize", normalize}};
    if (kind == "gaussian") {
      j.update({{"helicity", helicity}, {"center", vec_json(center)}, {"width", width}, {"shift", vec_json(shift)}});
    } else if (kind == "two_helicity") {
      j.update({{"chi_prime", chi_prime}, {"center", vec_json(center)}, {"width", width}});
    } else if (kind == "random") {
      j.update({{"seed", seed.value_or(global_seed)}, {"modes", modes}});
    } else if (kind == "laguerre") {
      j.update({{"helicity", helicity}, {"order", order}});
    } else if (kind == "localized") {
      j.update({{"helicity", helicity}, {"position", vec_json(position)}, {"chi", chi}});
    }
    j["time"] = time;
    return j;
  }

  static const char* form_name(Form f) {
    switch (f) {
      case Form::vector_potential: return "vector-potential";
      case Form::landau_peierls: return "landau-peierls";
      case Form::electric_field: return "electric-field";
    }
    return "";
  }
};

inline Form parse_form(const std::string& s, const std::string& where) {
  if (s == "vector-potential") return Form::vector_potential;
  if (s == "landau-peierls") return Form::landau_peierls;
  if (s == "electric-field") return Form::electric_field;
  throw ConfigError(where + ": form must be vector-potential, landau-peierls or electric-field");
}

struct CheckFormsSpec {
  std::vector<std::pair<std::string, std::string>> pairs;
};

struct BoostCheckSpec {
  double rapidity = 0.5;
  Vec3 direction = Vec3(0, 0, 1);
  std::string phi, psi;
  int ladder_levels = 4;
};

struct NumberDensitySpec {
  std::string state;
  double time = 0.0;
  std::string chi = "zero";
  int path_check_points = 8;
};

struct TailFitSpec {
  double alpha = 0.5;
  double r_min = 10.0, r_max = 100.0;
  int n_radii = 16;
  std::vector<double> epsilons;  // empty: default ladder
  double k_scale = 1.0;
  std::optional<double> expected_slope;
  double quadrature_tolerance = 1e-10;
};

struct Config {
  std::optional<double> tolerance;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::optional<nlohmann::json> grid;  // descriptor form
  std::vector<StateSpec> states;
  std::optional<CheckFormsSpec> check_forms;
  std::optional<BoostCheckSpec> boost_check;
  std::optional<NumberDensitySpec> number_density;
  std::optional<TailFitSpec> tail_fit;

  const StateSpec& state(const std::string& name) const {
    for (const auto& s : states)
      if (s.name == name) return s;
    throw ConfigError("unknown state '" + name + "'");
  }
};

inline nlohmann::json read_grid(const toml::table& t) {
  KeyReader r(t, "grid");
  const std::string type = r.require<std::string>("type");
  nlohmann::json d{{"type", type}};
  if (type == "spherical") {
    for (const char* k : {"n_r", "n_theta", "n_phi"}) {
      const auto v = r.require<std::int64_t>(k);
      if (v < 2) throw ConfigError(std::string("grid.") + k + ": must be >= 2");
      d[k] = v;
    }
    d["k_max"] = r.require<double>("k_max");
    d["radial_rule"] = r.value<std::string>("radial_rule", "gauss-legendre");
  } else if (type == "cartesian") {
    const auto n = r.require<std::int64_t>("n");
    if (n < 8) throw ConfigError("grid.n: must be a power of two >= 8");
    d["n"] = n;
    d["k_max"] = r.require<double>("k_max");
    d["centering"] = r.value<std::string>("centering", "cell");
    d["center"] = vec_json(r.value<Vec3>("center", Vec3::Zero()));
  } else {
    throw ConfigError("grid.type: must be 'spherical' or 'cartesian'");
  }
  r.finish();
  return d;
}

inline StateSpec read_state(const toml::table& t, std::size_t index) {
  KeyReader r(t, "states[" + std::to_string(index) + "]");
  StateSpec s;
  s.name = r.require<std::string>("name");
  s.kind = r.require<std::string>("kind");
  s.form = parse_form(r.value<std::string>("form", "landau-peierls"), r.path());
  s.normalize = r.value<bool>("normalize", true);
  s.time = r.value<double>("time", 0.0);
  auto read_helicity = [&] {
    const auto h = r.value<std::int64_t>("helicity", 1);
    if (h != 1 && h != -1) throw ConfigError(r.path() + ".helicity: must be 1 or -1");
    s.helicity = static_cast<int>(h);
  };
  if (s.kind == "gaussian") {
    read_helicity();
    s.center = r.value<Vec3>("center", Vec3::Zero());
    s.width = r.value<double>("width", 1.0);
    s.shift = r.value<Vec3>("shift", Vec3::Zero());
  } else if (s.kind == "two_helicity") {
    s.chi_prime = r.value<double>("chi_prime", 0.0);
    s.center = r.value<Vec3>("center", Vec3::Zero());
    s.width = r.value<double>("width", 1.0);
  } else if (s.kind == "random") {
    if (auto v = r.get<std::int64_t>("seed")) s.seed = static_cast<std::uint64_t>(*v);
    s.modes = static_cast<int>(r.value<std::int64_t>("modes", 3));
  } else if (s.kind == "laguerre") {
    read_helicity();
    s.order = static_cast<int>(r.value<std::int64_t>("order", 0));
    if (s.order < 0 || s.order > 2) throw ConfigError(r.path() + ".order: must be 0, 1 or 2");
  } else if (s.kind == "localized") {
    read_helicity();
    s.position = r.value<Vec3>("position", Vec3::Zero());
    s.chi = r.value<std::string>("chi", "zero");
  } else {
    throw ConfigError(r.path() + ".kind: must be gaussian, two_helicity, random, laguerre or localized");
  }
  if (!(s.width > 0.0)) throw ConfigError(r.path() + ".width: must be positive");
  r.finish();
  return s;
}

inline Config parse_config(const toml::table& root) {
  KeyReader r(root, "config");
  Config c;
  c.tolerance = r.get<double>("tolerance");
  c.seed = static_cast<std::uint64_t>(r.value<std::int64_t>("seed", 0));
  c.out_dir = r.value<std::string>("out_dir", "out");
  if (const auto* g = r.table("grid")) c.grid = read_grid(*g);
  if (const auto* a = r.array("states")) {
    for (std::size_t i = 0; i < a->size(); ++i) {
      const auto* t = (*a)[i].as_table();
      if (!t) throw ConfigError("states[" + std::to_string(i) + "]: expected a table");
      c.states.push_back(read_state(*t, i));
      for (std::size_t j = 0; j + 1 < c.states.size(); ++j)
        if (c.states[j].name == c.states.back().name)
          throw ConfigError("duplicate state name '" + c.states.back().name + "'");
    }
  }
  if (const auto* t = r.table("check_forms")) {
    KeyReader s(*t, "check_forms");
    CheckFormsSpec spec;
    const auto* pairs = s.array("pairs");
    if (!pairs || pairs->empty()) throw ConfigError("check_forms.pairs: need at least one [phi, psi] pair");
    for (const auto& p : *pairs) {
      const auto* a = p.as_array();
      if (!a || a->size() != 2 || !(*a)[0].is_string() || !(*a)[1].is_string())
        throw ConfigError("check_forms.pairs: each entry must be [\"phi\", \"psi\"]");
      spec.pairs.emplace_back(*(*a)[0].value<std::string>(), *(*a)[1].value<std::string>());
    }
    s.finish();
    c.check_forms = spec;
  }
  if (const auto* t = r.table("boost_check")) {
    KeyReader s(*t, "boost_check");
    BoostCheckSpec spec;
    spec.rapidity = s.value<double>("rapidity", spec.rapidity);
    spec.direction = s.value<Vec3>("direction", spec.direction);
    spec.phi = s.require<std::string>("phi");
    spec.psi = s.require<std::string>("psi");
    spec.ladder_levels = static_cast<int>(s.value<std::int64_t>("ladder_levels", 4));
    if (spec.ladder_levels < 2) throw ConfigError("boost_check.ladder_levels: must be >= 2");
    s.finish();
    c.boost_check = spec;
  }
  if (const auto* t = r.table("number_density")) {
    KeyReader s(*t, "number_density");
    NumberDensitySpec spec;
    spec.state = s.require<std::string>("state");
    spec.time = s.value<double>("time", 0.0);
    spec.chi = s.value<std::string>("chi", "zero");
    spec.path_check_points = static_cast<int>(s.value<std::int64_t>("path_check_points", 8));
    s.finish();
    c.number_density = spec;
  }
  if (const auto* t = r.table("tail_fit")) {
    KeyReader s(*t, "tail_fit");
    TailFitSpec spec;
    spec.alpha = s.value<double>("alpha", spec.alpha);
    spec.r_min = s.value<double>("r_min", spec.r_min);
    spec.r_max = s.value<double>("r_max", spec.r_max);
    spec.n_radii = static_cast<int>(s.value<std::int64_t>("n_radii", spec.n_radii));
    spec.epsilons = s.value<std::vector<double>>("epsilons", {});
    spec.k_scale = s.value<double>("k_scale", spec.k_scale);
    spec.expected_slope = s.get<double>("expected_slope");
    spec.quadrature_tolerance = s.value<double>("quadrature_tolerance", spec.quadrature_tolerance);
    if (spec.n_radii < 3) throw ConfigError("tail_fit.n_radii: must be >= 3");
    s.finish();
    c.tail_fit = spec;
  }
  r.finish();
  return c;
}

}  // namespace photon::cli
