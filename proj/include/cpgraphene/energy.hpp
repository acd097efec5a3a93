#pragma once

// Casimir-Polder energy of a polarizable atom at distance z above the sheet,
//
//   U_T(z) = k_B T / (eps0 c^2) sum'_l alpha(i xi_l) K(xi_l),
//   K(xi)  = int d^2k / (2 pi)^2  e^{-2 kappa z} / (2 kappa)
//            * [xi^2 r_ss - (xi^2 + 2 c^2 k^2) r_pp],
//
// over Matsubara frequencies xi_l = 2 pi k_B T l / hbar, the l = 0 term
// halved. The bracket is written as xi^2 r_ss - (2 c^2 kappa^2 - xi^2) r_pp
// so that it stays finite at xi = 0. With k dk = kappa d kappa and
// u = 2 kappa z = u0 + v,
//
//   K(xi) = e^{-u0} / (8 pi z) int_0^inf e^{-v} [...] dv,   u0 = 2 xi z / c.
//
// The zero-temperature energy replaces k_B T sum'_l by (hbar / 2 pi) int d xi.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "cpgraphene/conductivity.hpp"
#include "cpgraphene/constants.hpp"
#include "cpgraphene/errors.hpp"
#include "cpgraphene/polarizability.hpp"
#include "cpgraphene/quadrature.hpp"
#include "cpgraphene/reflection.hpp"

namespace cpgraphene {

struct EnergyQuery {
  double distance = 100e-9;  // m
  GrapheneParams graphene;
  PolarizabilityModel atom = PolarizabilityModel::rubidium_surrogate();
  double tol_k = 1e-7;
  double tol_sum = 1e-6;
  std::size_t max_matsubara_terms = 1'000'000;

  void validate() const {
    if (!(distance > 0.0)) throw ValidationError("z", "distance must be positive");
    if (!(tol_k > 0.0 && tol_k < 1.0)) throw ValidationError("tol_k", "must lie in (0, 1)");
    if (!(tol_sum > 0.0 && tol_sum < 1.0)) throw ValidationError("tol_sum", "must lie in (0, 1)");
    graphene.validate();
  }

  /// Tolerance handed to the Landau sums, well below both outer tolerances.
  double conductivity_tolerance() const { return std::max(1e-13, 1e-3 * std::min(tol_k, tol_sum)); }
};

struct EnergyResult {
  double energy = 0.0;            // J
  std::size_t l_terms_used = 0;   // Matsubara terms, or xi nodes at T = 0
  double quadrature_error = 0.0;  // J
  double truncation_error = 0.0;  // J
  bool zero_field_fallback = false;

  double combined_error() const { return std::abs(quadrature_error) + std::abs(truncation_error); }
};

inline double matsubara_frequency(std::size_t l, double T) {
  if (!(T > 0.0)) throw DomainError("matsubara_frequency: temperature must be positive");
  return 2.0 * constants::pi * constants::k_B * T * static_cast<double>(l) / constants::hbar;
}

/// Upper limit of the shifted exponent v = 2 kappa z - u0.
inline constexpr double kernel_cutoff = 60.0;

struct KernelResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

/// K(xi) for xi > 0 with an arbitrary reflection law `reflect(WaveContext)`.
template <class Reflect>
KernelResult k_integral(double xi, double z, const Reflect& reflect, double tol) {
  if (!(xi > 0.0)) throw DomainError("k_integral: xi must be positive (use zero_frequency_term)");
  if (!(z > 0.0)) throw DomainError("k_integral: distance must be positive");
  const double c = constants::c;
  const double u0 = 2.0 * xi * z / c;
  const double xi2 = xi * xi;
  auto integrand = [&](double v) {
    const double kappa = (u0 + v) / (2.0 * z);
    const ReflectionPair r = reflect(WaveContext::from_kappa(kappa, xi));
    const double weight_pp = 2.0 * c * c * kappa * kappa - xi2;
    return std::exp(-v) * (xi2 * r.r_ss - weight_pp * r.r_pp);
  };
  static constexpr std::array<double, 6> breaks = {0.0, 2.0, 6.0, 14.0, 30.0, kernel_cutoff};
  quadrature::QuadResult q;
  try {
    q = quadrature::integrate(integrand, breaks, tol);
  } catch (const ConvergenceError& err) {
    throw ConvergenceError("k_integral at xi = " + std::to_string(xi) + " rad/s, z = " + std::to_string(z) +
                           " m: " + err.what());
  }
  const double scale = std::exp(-u0) / (8.0 * constants::pi * z);
  return {scale * q.value, scale * q.error, q.evaluations};
}

/// K(xi) with the sheet's own reflection coefficients.
inline KernelResult k_integral(double xi, double z, const ConductivitySample& sigma, double tol) {
  return k_integral(xi, z, [&](const WaveContext& ctx) { return reflection_pair(ctx, sigma); }, tol);
}

/// Half-weighted l = 0 term, -k_B T alpha(0) r_pp(0) / (16 pi eps0 z^3);
/// the static r_pp does not depend on k, so the k-integral is closed form.
inline double zero_frequency_term(const EnergyQuery& q, const MagnetoConductivity& cond) {
  const double z = q.distance;
  const double T = q.graphene.temperature;
  const ReflectionPair r = reflection_pair_static(1.0 / z, cond(0.0));
  return -constants::k_B * T * q.atom(0.0) * r.r_pp / (16.0 * constants::pi * constants::epsilon_0 * z * z * z);
}

inline double zero_frequency_term(const EnergyQuery& q) {
  q.validate();
  return zero_frequency_term(q, MagnetoConductivity(q.graphene, q.conductivity_tolerance()));
}

/// Finite-temperature energy as a Matsubara sum. Summation stops once three
/// consecutive terms fall below tol_sum |sum| and the geometric tail bound
/// |t_l| q / (1 - q), q = max(observed ratio, e^{-2 xi_1 z / c}), does too.
inline EnergyResult casimir_polder_energy(const EnergyQuery& q) {
  q.validate();
  const double T = q.graphene.temperature;
  if (!(T > 0.0)) throw DomainError("casimir_polder_energy: temperature must be positive (use the T = 0 engine)");
  const double z = q.distance;
  const MagnetoConductivity cond(q.graphene, q.conductivity_tolerance());
  const double prefactor = constants::k_B * T / (constants::epsilon_0 * constants::c * constants::c);
  const double xi1 = matsubara_frequency(1, T);
  const double envelope = std::exp(-2.0 * xi1 * z / constants::c);

  EnergyResult out;
  out.zero_field_fallback = cond.zero_field_fallback();
  double sum = zero_frequency_term(q, cond);
  double quad_err = 0.0;
  double previous = sum;
  int small_run = 0;
  std::size_t l = 1;
  for (;; ++l) {
    if (l > q.max_matsubara_terms)
      throw ConvergenceError("Matsubara sum not converged after " + std::to_string(q.max_matsubara_terms) +
                             " terms (z = " + std::to_string(z) + " m, T = " + std::to_string(T) + " K)");
    const double xi = xi1 * static_cast<double>(l);
    const ConductivitySample sigma = cond(xi);
    const KernelResult kernel = k_integral(xi, z, sigma, q.tol_k);
    const double weight = prefactor * q.atom(xi);
    const double term = weight * kernel.value;
    sum += term;
    quad_err += weight * kernel.error;

    const double mag = std::abs(term);
    small_run = mag < q.tol_sum * std::abs(sum) ? small_run + 1 : 0;
    if (small_run >= 3) {
      const double observed = previous != 0.0 ? mag / std::abs(previous) : 0.0;
      const double ratio = std::max(envelope, observed);
      if (ratio < 1.0) {
        const double tail = mag * ratio / (1.0 - ratio);
        if (tail <= q.tol_sum * std::abs(sum)) {
          out.truncation_error = tail;
          break;
        }
      }
    }
    previous = term;
  }
  out.energy = sum;
  out.l_terms_used = l + 1;
  out.quadrature_error = quad_err;
  return out;
}

/// Zero-temperature energy: (hbar / (2 pi eps0 c^2)) int_0^inf alpha(i xi) K(xi) d xi
/// with step occupations in the Landau sums.
inline EnergyResult casimir_polder_energy_T0(const EnergyQuery& query) {
  EnergyQuery q = query;
  q.graphene.temperature = 0.0;
  q.validate();
  const double z = q.distance;
  const MagnetoConductivity cond(q.graphene, q.conductivity_tolerance());
  const double prefactor = constants::hbar / (2.0 * constants::pi * constants::epsilon_0 * constants::c * constants::c);
  const double s = constants::c / (2.0 * z);  // e^{-xi / s} envelope

  double inner_rel = 0.0;
  std::size_t nodes = 0;
  auto integrand = [&](double xi) {
    ++nodes;
    const ConductivitySample sigma = cond(xi);
    const KernelResult k = k_integral(xi, z, sigma, q.tol_k);
    if (k.value != 0.0) inner_rel = std::max(inner_rel, k.error / std::abs(k.value));
    return prefactor * q.atom(xi) * k.value;
  };

  // Log-spaced breakpoints resolve the low-frequency TM screening edge.
  std::array<double, 14> breaks{};
  breaks[0] = 0.0;
  for (int i = 1; i <= 11; ++i) breaks[i] = s * std::pow(10.0, i - 11);  // 1e-10 s .. s
  breaks[12] = 10.0 * s;
  breaks[13] = 70.0 * s;

  quadrature::QuadResult res;
  try {
    res = quadrature::integrate(integrand, breaks, q.tol_sum);
  } catch (const ConvergenceError& err) {
    throw ConvergenceError(std::string("zero-temperature frequency integral: ") + err.what());
  }

  EnergyResult out;
  out.energy = res.value;
  out.l_terms_used = nodes;
  out.quadrature_error = res.error + inner_rel * std::abs(res.value);
  out.truncation_error = std::abs(integrand(breaks.back())) * s;
  out.zero_field_fallback = cond.zero_field_fallback();
  return out;
}

/// T > 0 goes through the Matsubara sum, T = 0 through the frequency integral.
inline EnergyResult energy(const EnergyQuery& q) {
  return q.graphene.temperature > 0.0 ? casimir_polder_energy(q) : casimir_polder_energy_T0(q);
}

enum class Reference {
  zero_field,                   // U_T(z, B) / U_T(z, 0)
  zero_field_zero_temperature,  // U_T(z, B) / U_0(z, 0)
};

struct NormalizedEnergy {
  double ratio = 0.0;
  EnergyResult value;
  EnergyResult reference;
};

inline EnergyQuery reference_query(const EnergyQuery& q, Reference ref) {
  EnergyQuery r = q;
  r.graphene.field = 0.0;
  if (ref == Reference::zero_field_zero_temperature) r.graphene.temperature = 0.0;
  return r;
}

/// Ratio to the zero-field (optionally also zero-temperature) energy, both
/// evaluated with the query's tolerances.
inline NormalizedEnergy normalized_energy(const EnergyQuery& q, Reference ref) {
  NormalizedEnergy out;
  out.value = energy(q);
  out.reference = energy(reference_query(q, ref));
  out.ratio = out.value.energy / out.reference.energy;
  return out;
}

}  // namespace cpgraphene
