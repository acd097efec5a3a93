#pragma once

// Magneto-optical sheet conductivity of graphene on the imaginary frequency
// axis, from the Landau-level sums
//
//   sigma_xx(i xi) = e^3 v_F^2 B G / pi * sum_n { [intraband occupations]
//                      / (D_n (M_{n+1} - M_n)) + (M_n -> -M_n) }
//   sigma_xy(i xi) = -e^3 v_F^2 B / pi * sum_n [Hall occupations]
//                      * [ 1/D_n + (M_n -> -M_n) ]
//
// with G = hbar (xi + 1/tau), D_n = (M_{n+1} - M_n)^2 + G^2 and Landau levels
// M_n = sqrt(n) M_1. Everything is SI: the Gaussian B/c of the textbook form
// becomes B, so M_1 = sqrt(2 hbar e v_F^2 B) and both sums come out in
// siemens. In these units the N-th Hall plateau sits at (2N+1) e^2/(pi hbar)
// and the undoped interband limit at e^2/(4 hbar).
//
// Landau levels whose occupation is pinned (deep below or far above mu_c)
// contribute nothing except through the interband channel above the Fermi
// level, where every term has the saturated form 2 / (S (S^2 + G^2)),
// S = M_{n+1} + M_n. Because S = 2 * midpoint and M_{n+1} - M_n = M_1^2 / S,
// that tail is a midpoint-rule sum of 2/(M_1^2 (4M^2 + G^2)) in M; it is
// replaced by its integral, atan(G / 2M_N) / (M_1^2 G), minus the leading
// midpoint correction. The residual of the correction is O(1/N) of it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cpgraphene/constants.hpp"
#include "cpgraphene/errors.hpp"
#include "cpgraphene/quadrature.hpp"

namespace cpgraphene {

struct GrapheneParams {
  double fermi_velocity = 1.0e6;                         // m/s
  double scattering_time = 1.84e-13;                     // s
  double chemical_potential = 0.115 * constants::eV;     // J
  double field = 0.0;                                    // T
  double temperature = 4.0;                              // K

  /// Throws ValidationError unless v_F > 0, tau > 0, B >= 0, T >= 0.
  void validate() const {
    if (!(fermi_velocity > 0.0)) throw ValidationError("v_F", "must be positive");
    if (!(scattering_time > 0.0)) throw ValidationError("tau", "must be positive");
    if (!std::isfinite(chemical_potential)) throw ValidationError("mu_c", "must be finite");
    if (!(field >= 0.0)) throw ValidationError("B", "must be non-negative");
    if (!(temperature >= 0.0)) throw ValidationError("T", "must be non-negative");
  }
};

struct ConductivitySample {
  double xi = 0.0;             // rad/s
  double sigma_xx = 0.0;       // S
  double sigma_xy = 0.0;       // S
  std::size_t n_terms_used = 0;
  double tail_estimate = 0.0;  // relative remainder of sigma_xx
};

/// Landau energy scale M_1 = sqrt(2 hbar e v_F^2 B) in joules.
inline double landau_scale(double B, double v_F = 1.0e6) {
  if (!(B > 0.0)) throw DomainError("landau_level: field must be positive");
  return std::sqrt(2.0 * constants::hbar * constants::e * v_F * v_F * B);
}

/// M_n = sqrt(n) M_1.
inline double landau_level(std::size_t n, double B, double v_F = 1.0e6) {
  return std::sqrt(static_cast<double>(n)) * landau_scale(B, v_F);
}

/// Fermi-Dirac occupation. T = 0 is the exact step with 1/2 at E = mu.
inline double fermi_dirac(double E, double mu, double T) {
  if (T <= 0.0) {
    if (E < mu) return 1.0;
    if (E > mu) return 0.0;
    return 0.5;
  }
  const double x = (E - mu) / (constants::k_B * T);
  if (x > 0.0) {
    const double q = std::exp(-x);
    return q / (1.0 + q);
  }
  return 1.0 / (1.0 + std::exp(x));
}

/// n_F(E) + n_F(-E) - 1 for E >= 0, written as sinh(mu/kT) / (cosh(E/kT) +
/// cosh(mu/kT)) so that it is odd in mu to the last bit.
inline double occupation_imbalance(double E, double mu, double T) {
  if (T <= 0.0) {
    const double s = mu > 0.0 ? 1.0 : (mu < 0.0 ? -1.0 : 0.0);
    if (E < std::abs(mu)) return s;
    if (E > std::abs(mu)) return 0.0;
    return 0.5 * s;
  }
  const double x = E / (constants::k_B * T), m = mu / (constants::k_B * T);
  const double a = std::max(x, std::abs(m));
  const double num = std::exp(m - a) - std::exp(-m - a);
  return num / (std::exp(x - a) + std::exp(-x - a) + std::exp(m - a) + std::exp(-m - a));
}

/// Fields at which M_n(B) = |mu_c|, B_n = mu_c^2 / (2 n hbar e v_F^2), for
/// every n >= 1 with B_min <= B_n <= B_max, ascending. Empty when mu_c = 0.
inline std::vector<double> predict_crossings(const GrapheneParams& p, double B_min, double B_max) {
  if (!(B_min > 0.0)) throw DomainError("predict_crossings: B_min must be positive");
  std::vector<double> out;
  const double mu = p.chemical_potential;
  if (mu == 0.0 || B_max < B_min) return out;
  const double v = p.fermi_velocity;
  const double b1 = mu * mu / (2.0 * constants::hbar * constants::e * v * v);
  const auto n_lo = static_cast<std::size_t>(std::max(1.0, std::ceil(b1 / B_max)));
  const auto n_hi = static_cast<std::size_t>(std::floor(b1 / B_min));
  for (std::size_t n = n_hi; n >= n_lo && n >= 1; --n) {
    const double bn = b1 / static_cast<double>(n);
    if (bn >= B_min && bn <= B_max) out.push_back(bn);
  }
  return out;
}

/// Conductivity tensor for one material state, evaluable at any xi >= 0.
///
/// Construction tabulates the thermally active Landau transitions once; each
/// call then costs one pass over that band plus the saturated tail. A zero
/// field is served by the zero-field fallback: sigma_xy = 0 and sigma_xx
/// evaluated at `reference_field`, checked against twice that field.
class MagnetoConductivity {
public:
  static constexpr double reference_field = 1.0e-3;   // T
  static constexpr std::size_t hard_cap = 1'000'000;  // Landau terms
  /// Occupations beyond this many k_B T from mu_c are treated as pinned.
  static constexpr double saturation_width = 36.0;

  explicit MagnetoConductivity(const GrapheneParams& p, double tol = 1e-10)
      : params_(p), tol_(tol) {
    p.validate();
    if (!(tol > 0.0)) throw DomainError("conductivity tolerance must be positive");
    fallback_ = p.field == 0.0;
    field_ = fallback_ ? reference_field : p.field;
    build(field_);
    if (fallback_) {
      MagnetoConductivity doubled(with_field(p, 2.0 * reference_field), tol);
      const double a = (*this)(0.0).sigma_xx;
      const double b = doubled(0.0).sigma_xx;
      if (std::abs(a - b) > 1e-3 * std::abs(a))
        throw ConvergenceError("zero-field conductivity limit not converged at B_ref: " +
                               std::to_string(a) + " vs " + std::to_string(b) + " S");
    }
  }

  ConductivitySample operator()(double xi) const {
    if (!(xi >= 0.0)) throw DomainError("conductivity: xi must be non-negative");
    const double G = constants::hbar * (xi + 1.0 / params_.scattering_time);
    const double G2 = G * G;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& t : band_) {
      const double dg = t.gap * t.gap + G2;
      const double ds = t.sum * t.sum + G2;
      sxx += t.w_intra / (dg * t.gap) + t.w_inter / (ds * t.sum);
      sxy += t.w_hall * (1.0 / dg + 1.0 / ds);
    }

    std::size_t n = first_saturated_;
    std::size_t next_stop = std::max<std::size_t>(n, 64);
    double tail = 0.0, residual = 0.0;
    for (;;) {
      double mn = m1_ * std::sqrt(static_cast<double>(n));
      for (; n < next_stop; ++n) {
        const double mn1 = m1_ * std::sqrt(static_cast<double>(n + 1));
        const double s = mn + mn1;
        sxx += 2.0 / ((s * s + G2) * s);
        mn = mn1;
      }
      const double correction = midpoint_correction(mn, G);
      tail = std::atan(G / (2.0 * mn)) / (m1_ * m1_ * G) - correction;
      residual = std::abs(correction) / static_cast<double>(n);
      if (residual <= tol_ * std::abs(sxx + tail)) break;
      if (n >= hard_cap)
        throw ConvergenceError("Landau sum: tail " + std::to_string(residual / std::abs(sxx + tail)) +
                               " above tolerance at N_hard = " + std::to_string(hard_cap));
      next_stop = std::min(hard_cap, 2 * n);
    }

    const double v2 = params_.fermi_velocity * params_.fermi_velocity;
    const double scale = constants::e * constants::e * constants::e * v2 * field_ / constants::pi;
    ConductivitySample out;
    out.xi = xi;
    out.sigma_xx = scale * G * (sxx + tail);
    out.sigma_xy = fallback_ ? 0.0 : -scale * sxy;
    out.n_terms_used = band_.size() + (n - first_saturated_);
    out.tail_estimate = residual / std::abs(sxx + tail);
    return out;
  }

  const GrapheneParams& params() const noexcept { return params_; }
  bool zero_field_fallback() const noexcept { return fallback_; }
  /// Field actually entering the Landau sums (B_ref under the fallback).
  double effective_field() const noexcept { return field_; }
  std::size_t band_size() const noexcept { return band_.size(); }

private:
  struct Transition {
    double gap;      // M_{n+1} - M_n
    double sum;      // M_{n+1} + M_n
    double w_intra;  // n_F(M_n) - n_F(M_{n+1}) + n_F(-M_{n+1}) - n_F(-M_n)
    double w_inter;  // same with M_n -> -M_n
    double w_hall;   // n_F(M_n) - n_F(M_{n+1}) - n_F(-M_{n+1}) + n_F(-M_n)
  };

  static GrapheneParams with_field(GrapheneParams p, double B) {
    p.field = B;
    return p;
  }

  void build(double B) {
    m1_ = landau_scale(B, params_.fermi_velocity);
    const double mu = params_.chemical_potential;
    const double T = params_.temperature;
    const double width = T > 0.0 ? saturation_width * constants::k_B * T : 0.0;
    const double amu = std::abs(mu);

    std::size_t n_low = 0;
    if (amu > width) {
      const double b = (amu - width) / m1_;
      const double lo = std::floor(b * b) - 2.0;
      if (lo > 0.0) n_low = static_cast<std::size_t>(lo);
    }
    const double top = (amu + width) / m1_;
    const double top_sq = top * top;
    if (top_sq >= static_cast<double>(hard_cap))
      throw ConvergenceError("Landau sum: thermally active band exceeds N_hard = " +
                             std::to_string(hard_cap) + " at B = " + std::to_string(B) + " T");
    // First n with M_n strictly above |mu| + width.
    auto n_sat = static_cast<std::size_t>(std::floor(top_sq));
    while (m1_ * std::sqrt(static_cast<double>(n_sat)) <= amu + width) ++n_sat;
    n_sat = std::max<std::size_t>(n_sat, 1);

    band_.clear();
    band_.reserve(n_sat - n_low);
    auto nf = [&](double E) { return fermi_dirac(E, mu, T); };
    double mn = m1_ * std::sqrt(static_cast<double>(n_low));
    double f_pos = nf(mn), f_neg = nf(-mn);
    double h = occupation_imbalance(mn, mu, T);
    for (std::size_t n = n_low; n < n_sat; ++n) {
      const double mn1 = m1_ * std::sqrt(static_cast<double>(n + 1));
      const double g_pos = nf(mn1), g_neg = nf(-mn1);
      const double h1 = occupation_imbalance(mn1, mu, T);
      Transition t;
      t.sum = mn + mn1;
      t.gap = m1_ * m1_ / t.sum;
      t.w_intra = f_pos - g_pos + g_neg - f_neg;
      t.w_inter = f_neg - g_pos + g_neg - f_pos;
      t.w_hall = h - h1;
      if (t.w_intra != 0.0 || t.w_inter != 0.0 || t.w_hall != 0.0) band_.push_back(t);
      mn = mn1;
      f_pos = g_pos;
      f_neg = g_neg;
      h = h1;
    }
    first_saturated_ = n_sat;
  }

  // (M_1^2 / 6) * int_{M_N}^inf (12M^2 - G^2) / (M^2 (4M^2 + G^2)^3) dM,
  // mapped to t = M_N / M on (0, 1].
  double midpoint_correction(double mN, double G) const {
    const double G2 = G * G, m2 = mN * mN;
    auto integrand = [&](double t) {
      const double t2 = t * t;
      const double d = 4.0 * m2 + G2 * t2;
      return (12.0 * m2 - G2 * t2) * t2 * t2 / (mN * d * d * d);
    };
    return m1_ * m1_ / 6.0 * quadrature::gauss_legendre_20().integrate(integrand, 0.0, 1.0);
  }

  GrapheneParams params_;
  double tol_;
  bool fallback_ = false;
  double field_ = 0.0;
  double m1_ = 0.0;
  std::size_t first_saturated_ = 0;
  std::vector<Transition> band_;
};

/// One-shot evaluation of both tensor components at xi.
inline ConductivitySample conductivity(double xi, const GrapheneParams& p, double tol = 1e-10) {
  return MagnetoConductivity(p, tol)(xi);
}

inline double sigma_xx(double xi, const GrapheneParams& p, double tol = 1e-10) {
  return conductivity(xi, p, tol).sigma_xx;
}

inline double sigma_xy(double xi, const GrapheneParams& p, double tol = 1e-10) {
  return conductivity(xi, p, tol).sigma_xy;
}

}  // namespace cpgraphene
