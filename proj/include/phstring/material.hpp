#pragma once

// Constitutive laws for geometrically exact strings. Each law is a stored
// energy density W(C) in the squared stretch C = d_s r . d_s r, with
// conjugate stress S = 2 dW/dC and tension N(nu) = dU/dnu in the stretch
// nu = sqrt(C). The secant-slope discrete derivative of W is what the
// energy-consistent time stepper evaluates instead of dW/dC.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace phstring {

enum class MaterialKind { Hyperelastic, LinearElastic, StVenantKirchhoff };

// Axial law with stiffness EA > 0. W(1) = 0, S(1) = 0 and W(C) >= 0 for
// C > 0 hold for every kind.
struct MaterialLaw {
  MaterialKind kind = MaterialKind::Hyperelastic;
  double axial_stiffness = 1.0;  // EA [N]
};

inline std::string to_string(MaterialKind kind) {
  switch (kind) {
    case MaterialKind::Hyperelastic: return "hyperelastic";
    case MaterialKind::LinearElastic: return "linear-elastic";
    case MaterialKind::StVenantKirchhoff: return "st-venant-kirchhoff";
  }
  return "?";
}

inline MaterialKind material_kind_from_string(std::string_view name) {
  if (name == "hyperelastic") return MaterialKind::Hyperelastic;
  if (name == "linear-elastic") return MaterialKind::LinearElastic;
  if (name == "st-venant-kirchhoff") return MaterialKind::StVenantKirchhoff;
  throw std::invalid_argument("unknown material kind: " + std::string(name));
}

namespace detail {

inline void check_strain(double c, const char* where) {
  if (!(c > 0.0)) {
    throw std::domain_error(std::string(where) +
                            ": strain must be positive, got " + std::to_string(c));
  }
}

inline void check_stretch(double nu, const char* where) {
  if (!(nu > 0.0)) {
    throw std::domain_error(std::string(where) +
                            ": stretch must be positive, got " + std::to_string(nu));
  }
}

}  // namespace detail

// Formulas are arranged to stay accurate near the stress-free state C = 1:
// the naive (C - ln C - 1) loses all significant digits there, which the
// secant slope below would then amplify by 1/(C1 - C0).
inline double stored_energy_density(const MaterialLaw& law, double c) {
  detail::check_strain(c, "stored_energy_density");
  const double ea = law.axial_stiffness;
  const double e = c - 1.0;
  switch (law.kind) {
    case MaterialKind::Hyperelastic:
      return 0.25 * ea * (e - std::log1p(e));
    case MaterialKind::LinearElastic: {
      const double s = e / (std::sqrt(c) + 1.0);  // sqrt(C) - 1
      return 0.5 * ea * s * s;
    }
    case MaterialKind::StVenantKirchhoff:
      return 0.125 * ea * e * e;
  }
  throw std::logic_error("unhandled material kind");
}

// S = 2 dW/dC.
inline double stress(const MaterialLaw& law, double c) {
  detail::check_strain(c, "stress");
  const double ea = law.axial_stiffness;
  const double e = c - 1.0;
  switch (law.kind) {
    case MaterialKind::Hyperelastic:
      return 0.5 * ea * e / c;
    case MaterialKind::LinearElastic: {
      const double root = std::sqrt(c);
      return ea * e / (root * (root + 1.0));
    }
    case MaterialKind::StVenantKirchhoff:
      return 0.5 * ea * e;
  }
  throw std::logic_error("unhandled material kind");
}

// dS/dC, needed by the Newton linearization.
inline double stress_tangent(const MaterialLaw& law, double c) {
  detail::check_strain(c, "stress_tangent");
  const double ea = law.axial_stiffness;
  switch (law.kind) {
    case MaterialKind::Hyperelastic:
      return 0.5 * ea / (c * c);
    case MaterialKind::LinearElastic:
      return 0.5 * ea / (c * std::sqrt(c));
    case MaterialKind::StVenantKirchhoff:
      return 0.5 * ea;
  }
  throw std::logic_error("unhandled material kind");
}

// N(nu) = dU/dnu with U(nu) = W(nu^2); satisfies N(nu) = S(nu^2) nu.
inline double tension(const MaterialLaw& law, double nu) {
  detail::check_stretch(nu, "tension");
  const double ea = law.axial_stiffness;
  switch (law.kind) {
    case MaterialKind::Hyperelastic:
      return 0.5 * ea * (nu - 1.0 / nu);
    case MaterialKind::LinearElastic:
      return ea * (nu - 1.0);
    case MaterialKind::StVenantKirchhoff:
      return 0.5 * ea * nu * (nu * nu - 1.0);
  }
  throw std::logic_error("unhandled material kind");
}

// Below this relative gap the midpoint derivative replaces the secant.
inline constexpr double kGreenspanSwitchRel = 1e-8;

inline double greenspan_switch_tol(double c_prev, double c_next) {
  return kGreenspanSwitchRel * std::max(c_prev, c_next);
}

// Discrete derivative of W between two strain states: the secant slope
// (W(c_next) - W(c_prev)) / (c_next - c_prev) while the gap exceeds
// switch_tol, the midpoint derivative dW/dC((c_prev+c_next)/2) otherwise.
// In the secant branch, slope * (c_next - c_prev) == W(c_next) - W(c_prev)
// up to roundoff.
//
// The secant is evaluated through per-law closed forms rather than the
// literal quotient of energies; the quotient turns the rounding of W into
// noise of size eps |W| / |dC|, which stalls the Newton solve well above
// usual residual tolerances whenever an element's strain nearly repeats
// across a step.
inline double greenspan_derivative(const MaterialLaw& law, double c_prev,
                                   double c_next, double switch_tol) {
  detail::check_strain(c_prev, "greenspan_derivative");
  detail::check_strain(c_next, "greenspan_derivative");
  if (!(switch_tol > 0.0)) {
    throw std::domain_error("greenspan_derivative: switch_tol must be positive");
  }
  const double gap = c_next - c_prev;
  if (std::abs(gap) > switch_tol) {
    const double ea = law.axial_stiffness;
    switch (law.kind) {
      case MaterialKind::Hyperelastic:
        // (W1 - W0)/dC = EA/4 (1 - ln(C1/C0)/dC)
        return 0.25 * ea * (1.0 - std::log1p(gap / c_prev) / gap);
      case MaterialKind::LinearElastic: {
        // with nu = sqrt(C): EA/2 (1 - 2/(nu0 + nu1))
        const double roots = std::sqrt(c_prev) + std::sqrt(c_next);
        return 0.5 * ea * (1.0 - 2.0 / roots);
      }
      case MaterialKind::StVenantKirchhoff:
        // EA/8 ((C0 - 1) + (C1 - 1))
        return 0.125 * ea * ((c_prev - 1.0) + (c_next - 1.0));
    }
    throw std::logic_error("unhandled material kind");
  }
  return 0.5 * stress(law, 0.5 * (c_prev + c_next));
}

inline double greenspan_derivative(const MaterialLaw& law, double c_prev, double c_next) {
  return greenspan_derivative(law, c_prev, c_next, greenspan_switch_tol(c_prev, c_next));
}

// Partial derivative of greenspan_derivative with respect to c_next,
// consistent with the branch the value itself takes.
inline double greenspan_derivative_dnext(const MaterialLaw& law, double c_prev,
                                         double c_next, double switch_tol) {
  detail::check_strain(c_prev, "greenspan_derivative_dnext");
  detail::check_strain(c_next, "greenspan_derivative_dnext");
  const double gap = c_next - c_prev;
  if (std::abs(gap) > switch_tol) {
    // d/dC1 of the secant: (dW/dC(C1) - slope) / (C1 - C0)
    const double slope = greenspan_derivative(law, c_prev, c_next, switch_tol);
    return (0.5 * stress(law, c_next) - slope) / gap;
  }
  return 0.25 * stress_tangent(law, 0.5 * (c_prev + c_next));
}

inline double greenspan_derivative_dnext(const MaterialLaw& law, double c_prev, double c_next) {
  return greenspan_derivative_dnext(law, c_prev, c_next,
                                    greenspan_switch_tol(c_prev, c_next));
}

// Central-difference fallback for cross-checking the analytic partial.
inline double greenspan_derivative_dnext_fd(const MaterialLaw& law, double c_prev,
                                            double c_next, double switch_tol,
                                            double rel_step = 1e-7) {
  const double dc = rel_step * (1.0 + std::abs(c_next));
  return (greenspan_derivative(law, c_prev, c_next + dc, switch_tol) -
          greenspan_derivative(law, c_prev, c_next - dc, switch_tol)) /
         (2.0 * dc);
}

}  // namespace phstring
