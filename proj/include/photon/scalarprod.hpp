#pragma once
// The scalar product in its five equivalent forms, and the position operator.
//
//   invariant   int d^3k / omega  Phi^(1/2)mu* Psi^(1/2)_mu      (metric -,+,+,+)
//   alpha_pair  int d^3k          Phi^(-a)mu*  Psi^(a)_mu
//   transverse  int d^3k          Phi^(-a)*  . Psi^(a)           (3-vectors)
//   qed         sum_sigma int d^3k d_sigma* c_sigma
//   real_space  int d^3r          Phi^(-a)*(r) . Psi^(a)(r)
//
// Transverse states are embedded as 4-vectors with a zero time component.
// Each form is evaluated from its own integrand; agreement between them is a
// numerical statement, not an identity baked into the code.

#include "photon/gradient.hpp"
#include "photon/wavefunction.hpp"

#include <json.hpp>

#include <array>
#include <map>
#include <string>

namespace photon {

namespace detail {

inline void require_same_grid(const WaveFunctionK& a, const WaveFunctionK& b) {
  if (!same_grid(a.grid(), b.grid()))
    throw Error(ErrorCode::incompatible_grids, "states live on different grids");
}

inline CVec4 embed_transverse(const CVec3& v) {
  CVec4 out;
  out << cdouble{}, v[0], v[1], v[2];
  return out;
}

/// Phi^mu* g_{mu nu} Psi^nu with g = diag(-1, 1, 1, 1).
inline cdouble minkowski_dot(const CVec4& phi, const CVec4& psi) {
  return -std::conj(phi[0]) * psi[0] + std::conj(phi[1]) * psi[1] + std::conj(phi[2]) * psi[2] +
         std::conj(phi[3]) * psi[3];
}

template <typename Fn>
cdouble reduce_nodes(const KSpaceGrid& grid, Fn&& term) {
  std::vector<cdouble> terms(grid.size());
  parallel_for(terms.size(), [&](std::size_t i) { terms[i] = term(i); });
  return pairwise_sum(terms);
}

}  // namespace detail

/// Lorentz-invariant form: both states in the alpha = 1/2 form, measure
/// d^3k / omega.
inline cdouble sp_invariant(const WaveFunctionK& phi, const WaveFunctionK& psi) {
  detail::require_same_grid(phi, psi);
  return detail::reduce_nodes(phi.grid(), [&](std::size_t i) {
    const KNode& n = phi.grid().node(i);
    const CVec4 a = detail::embed_transverse(phi.vector_sample(i, Form::electric_field));
    const CVec4 b = detail::embed_transverse(psi.vector_sample(i, Form::electric_field));
    return n.weight / n.omega() * detail::minkowski_dot(a, b);
  });
}

/// 4-vector pairing of phi in form -alpha with psi in form alpha.
inline cdouble sp_alpha_pair(const WaveFunctionK& phi, const WaveFunctionK& psi, Form form) {
  detail::require_same_grid(phi, psi);
  const Form left = conjugate(form);
  return detail::reduce_nodes(phi.grid(), [&](std::size_t i) {
    const CVec4 a = detail::embed_transverse(phi.vector_sample(i, left));
    const CVec4 b = detail::embed_transverse(psi.vector_sample(i, form));
    return phi.grid().node(i).weight * detail::minkowski_dot(a, b);
  });
}

/// Transverse-gauge 3-vector pairing, optionally assembled in a chi basis.
inline cdouble sp_transverse(const WaveFunctionK& phi, const WaveFunctionK& psi, Form form,
                             const ChiSpec& chi = ChiSpec::zero()) {
  detail::require_same_grid(phi, psi);
  const Form left = conjugate(form);
  const bool plain = chi.kind == ChiSpec::Kind::zero && chi.time_shift == 0.0;
  return detail::reduce_nodes(phi.grid(), [&](std::size_t i) {
    const CVec3 a = plain ? phi.vector_sample(i, left) : phi.vector_sample(i, left, chi);
    const CVec3 b = plain ? psi.vector_sample(i, form) : psi.vector_sample(i, form, chi);
    return phi.grid().node(i).weight * a.dot(b);  // Eigen's dot conjugates the left operand
  });
}

/// Helicity-diagonal QED form on raw amplitude samples.
inline cdouble sp_qed(const KSpaceGrid& grid, std::span<const cdouble> d_plus,
                      std::span<const cdouble> d_minus, std::span<const cdouble> c_plus,
                      std::span<const cdouble> c_minus) {
  if (d_plus.size() != grid.size() || d_minus.size() != grid.size() || c_plus.size() != grid.size() ||
      c_minus.size() != grid.size())
    throw Error(ErrorCode::incompatible_grids, "amplitude samples do not match the grid");
  return detail::reduce_nodes(grid, [&](std::size_t i) {
    return grid.node(i).weight * (std::conj(d_plus[i]) * c_plus[i] + std::conj(d_minus[i]) * c_minus[i]);
  });
}

inline cdouble sp_qed(const WaveFunctionK& phi, const WaveFunctionK& psi) {
  detail::require_same_grid(phi, psi);
  return sp_qed(phi.grid(), phi.amplitudes(+1), phi.amplitudes(-1), psi.amplitudes(+1),
                psi.amplitudes(-1));
}

/// Local real-space form. phi_r must carry the conjugate form of psi_r.
inline cdouble sp_rspace(const WaveFunctionR& phi, const WaveFunctionR& psi) {
  if (phi.form != conjugate(psi.form))
    throw Error(ErrorCode::form_pairing,
                "real-space scalar product pairs alpha with -alpha; got alpha = " +
                    std::to_string(alpha(phi.form)) + " and " + std::to_string(alpha(psi.form)));
  if (!phi.grid || !psi.grid || !same_grid(*phi.grid, *psi.grid))
    throw Error(ErrorCode::incompatible_grids, "fields live on different r-grids");
  if (phi.t != psi.t) throw Error(ErrorCode::invalid_argument, "fields must be taken at the same time");
  std::vector<cdouble> terms(phi.components[0].size());
  parallel_for(terms.size(), [&](std::size_t i) {
    cdouble s{};
    for (int c = 0; c < 3; ++c) s += std::conj(phi.components[c][i]) * psi.components[c][i];
    terms[i] = s;
  });
  return pairwise_sum(terms) * phi.grid->cell_volume_r();
}

/// Values of every form for one state pair.
struct ScalarProductReport {
  std::map<std::string, cdouble> values;
  double scale = 0.0;          // ||phi|| ||psi||, the Cauchy-Schwarz bound
  double max_deviation = 0.0;  // max pairwise |a - b| / scale
  std::string worst_pair;
  nlohmann::json grid;

  nlohmann::json to_json() const {
    nlohmann::json v = nlohmann::json::object();
    for (const auto& [name, z] : values) v[name] = {z.real(), z.imag()};
    return {{"values", v},
            {"scale", scale},
            {"max_relative_deviation", max_deviation},
            {"worst_pair", worst_pair},
            {"grid", grid}};
  }
};

/// Evaluates the invariant, alpha-pair (alpha = -1/2, 0, 1/2), transverse,
/// QED and (on Cartesian grids) real-space forms.
inline ScalarProductReport compare_forms(const WaveFunctionK& phi, const WaveFunctionK& psi) {
  ScalarProductReport r;
  r.grid = phi.grid().descriptor();
  r.values["invariant"] = sp_invariant(phi, psi);
  for (Form f : {Form::vector_potential, Form::landau_peierls, Form::electric_field}) {
    const std::string suffix = f == Form::vector_potential ? "-1/2" : (f == Form::landau_peierls ? "0" : "+1/2");
    r.values["alpha_pair(" + suffix + ")"] = sp_alpha_pair(phi, psi, f);
    r.values["transverse(" + suffix + ")"] = sp_transverse(phi, psi, f);
  }
  r.values["qed"] = sp_qed(phi, psi);
  // The local form compares fields at one common time.
  if (phi.grid().kind() == GridKind::cartesian && phi.time() == psi.time()) {
    const auto a = synthesize_real_space(convert_alpha(phi, Form::vector_potential));
    const auto b = synthesize_real_space(convert_alpha(psi, Form::electric_field));
    r.values["real_space"] = sp_rspace(a, b);
  }
  r.scale = std::sqrt(phi.norm_squared() * psi.norm_squared());
  for (auto i = r.values.begin(); i != r.values.end(); ++i)
    for (auto j = std::next(i); j != r.values.end(); ++j) {
      const double d = relative_deviation(i->second, j->second, r.scale);
      if (d >= r.max_deviation) {
        r.max_deviation = d;
        r.worst_pair = i->first + " vs " + j->first;
      }
    }
  return r;
}

/// Components of r_hat psi: c_sigma -> exp(-i sigma chi) i grad[c_sigma exp(i sigma chi)].
///
/// `at_time`, when given, first evolves psi to that time (the operator then
/// acts on the phase-evolved amplitude); by default the carried time is used.
inline std::array<WaveFunctionK, 3> apply_position_operator(const WaveFunctionK& psi,
                                                            const ChiSpec& chi = ChiSpec::zero(),
                                                            std::optional<double> at_time = std::nullopt) {
  if (!chi.differentiable())
    throw Error(ErrorCode::unsupported_chi, "a tabulated chi has no gradient; use zero or minus_phi");
  const WaveFunctionK state = at_time ? evolve(psi, *at_time - psi.time()) : psi;
  const KSpaceGrid& grid = state.grid();
  const std::size_t size = grid.size();

  std::array<std::array<std::vector<cdouble>, 2>, 3> comp;  // [axis][helicity]
  int h = 0;
  for (int sigma : {+1, -1}) {
    const auto c = state.amplitudes(sigma);
    std::vector<cdouble> f(size), back(size);
    for (std::size_t i = 0; i < size; ++i) {
      const cdouble p = chi.phase(grid.node(i), i, sigma);
      f[i] = c[i] * p;
      back[i] = std::conj(p);
    }
    auto g = k_gradient(grid, f);
    for (int a = 0; a < 3; ++a) {
      comp[a][h].resize(size);
      for (std::size_t i = 0; i < size; ++i) comp[a][h][i] = I * g[a][i] * back[i];
    }
    ++h;
  }
  return {WaveFunctionK(state.grid_ptr(), std::move(comp[0][0]), std::move(comp[0][1]), state.form(), state.time()),
          WaveFunctionK(state.grid_ptr(), std::move(comp[1][0]), std::move(comp[1][1]), state.form(), state.time()),
          WaveFunctionK(state.grid_ptr(), std::move(comp[2][0]), std::move(comp[2][1]), state.form(), state.time())};
}

/// <psi| r_hat |psi> / <psi|psi> per component (complex, so reality can be checked).
inline std::array<cdouble, 3> position_expectation(const WaveFunctionK& psi,
                                                   const ChiSpec& chi = ChiSpec::zero()) {
  const auto r = apply_position_operator(psi, chi);
  const double n2 = psi.norm_squared();
  return {sp_qed(psi, r[0]) / n2, sp_qed(psi, r[1]) / n2, sp_qed(psi, r[2]) / n2};
}

/// max_j |<r_j^(-alpha) phi | psi> - <phi | r_j^(alpha) psi>| using the
/// transverse form with phi in form -alpha and psi in form alpha.
inline double hermiticity_defect(const WaveFunctionK& phi, const WaveFunctionK& psi, Form form,
                                 const ChiSpec& chi = ChiSpec::zero()) {
  const auto rphi = apply_position_operator(phi, chi);
  const auto rpsi = apply_position_operator(psi, chi);
  double worst = 0.0;
  for (int a = 0; a < 3; ++a) {
    const cdouble lhs = sp_transverse(rphi[a], psi, form);
    const cdouble rhs = sp_transverse(phi, rpsi[a], form);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

/// || (r_a r_b - r_b r_a) psi || maximised over the three component pairs.
inline double position_commutator_norm(const WaveFunctionK& psi, const ChiSpec& chi = ChiSpec::zero()) {
  const auto r1 = apply_position_operator(psi, chi);
  std::array<std::array<WaveFunctionK, 3>, 3> r2{apply_position_operator(r1[0], chi),
                                                 apply_position_operator(r1[1], chi),
                                                 apply_position_operator(r1[2], chi)};
  double worst = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      // r_a (r_b psi) - r_b (r_a psi)
      const auto& ab = r2[b][a];
      const auto& ba = r2[a][b];
      std::vector<double> terms(psi.grid().size());
      for (std::size_t i = 0; i < terms.size(); ++i)
        terms[i] = psi.grid().node(i).weight *
                   (std::norm(ab.c_plus()[i] - ba.c_plus()[i]) + std::norm(ab.c_minus()[i] - ba.c_minus()[i]));
      worst = std::max(worst, std::sqrt(pairwise_sum(terms)));
    }
  return worst;
}

}  // namespace photon
