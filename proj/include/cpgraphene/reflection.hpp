#pragma once

// Diagonal reflection amplitudes of a conducting sheet with surface current
// K = sigma . E, on the imaginary frequency axis:
//
//   r_ss = -(2 sxx Z_h + eta0^2 (sxx^2 + sxy^2)) / Delta
//   r_pp =  (2 sxx Z_e + eta0^2 (sxx^2 + sxy^2)) / Delta
//   Delta = (2 + Z_h sxx)(2 + Z_e sxx) + (eta0 sxy)^2
//
// with Z_h = xi mu0 / kappa and Z_e = kappa / (xi eps0). The xi -> 0+ limit
// is taken analytically in reflection_pair_static.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "cpgraphene/conductivity.hpp"
#include "cpgraphene/constants.hpp"
#include "cpgraphene/errors.hpp"

namespace cpgraphene {

struct WaveContext {
  double k = 0.0;      // transverse wavenumber, rad/m
  double xi = 0.0;     // imaginary frequency, rad/s
  double kappa = 0.0;  // sqrt(xi^2/c^2 + k^2)

  static WaveContext from_k(double k, double xi) {
    const double q = xi / constants::c;
    return {k, xi, std::hypot(q, k)};
  }

  /// Build from kappa >= xi/c; k is recovered as sqrt(kappa^2 - xi^2/c^2).
  static WaveContext from_kappa(double kappa, double xi) {
    const double q = xi / constants::c;
    const double k2 = (kappa - q) * (kappa + q);
    return {std::sqrt(std::max(0.0, k2)), xi, kappa};
  }
};

struct ReflectionPair {
  double r_ss = 0.0;
  double r_pp = 0.0;
};

struct Impedances {
  double z_h = 0.0;  // ohm
  double z_e = 0.0;  // ohm
};

inline Impedances impedances(const WaveContext& ctx) {
  if (!(ctx.xi > 0.0)) throw DomainError("impedances: xi must be positive (use the static limit)");
  return {ctx.xi * constants::mu_0 / ctx.kappa, ctx.kappa / (ctx.xi * constants::epsilon_0)};
}

inline ReflectionPair reflection_pair(const WaveContext& ctx, double sxx, double sxy) {
  const auto [zh, ze] = impedances(ctx);
  const double hall = constants::eta_0_sq * (sxx * sxx + sxy * sxy);
  const double delta = (2.0 + zh * sxx) * (2.0 + ze * sxx) + constants::eta_0_sq * sxy * sxy;
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::logic_error("reflection_pair: non-positive determinant " + std::to_string(delta) +
                           " (sigma_xx = " + std::to_string(sxx) + " S)");
  return {-(2.0 * sxx * zh + hall) / delta, (2.0 * sxx * ze + hall) / delta};
}

inline ReflectionPair reflection_pair(const WaveContext& ctx, const ConductivitySample& s) {
  return reflection_pair(ctx, s.sigma_xx, s.sigma_xy);
}

/// Below this sigma_xx(0) the static limit takes the dissipationless Hall branch.
inline constexpr double static_branch_threshold = 1e-12;  // S

/// xi -> 0+ limit. A dissipative sheet screens the static TM field
/// completely (r_pp = 1, r_ss = 0); a dissipationless one reflects only
/// through its Hall response.
inline ReflectionPair reflection_pair_static(double k, const ConductivitySample& sigma0) {
  if (!(k > 0.0)) throw DomainError("reflection_pair_static: k must be positive");
  if (sigma0.sigma_xx >= static_branch_threshold) return {0.0, 1.0};
  const double h = constants::eta_0_sq * sigma0.sigma_xy * sigma0.sigma_xy;
  const double r = h / (4.0 + h);
  return {-r, r};
}

}  // namespace cpgraphene
