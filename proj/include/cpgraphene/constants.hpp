#pragma once

/// CODATA 2018 values in SI units. Exact constants are exact; the rest are
/// quoted to at least 9 significant digits.
namespace cpgraphene::constants {

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double c = 299792458.0;                 // m/s (exact)
inline constexpr double hbar = 1.054571817e-34;          // J s (exact)
inline constexpr double e = 1.602176634e-19;             // C (exact)
inline constexpr double k_B = 1.380649e-23;              // J/K (exact)
inline constexpr double mu_0 = 1.25663706212e-6;         // N/A^2
inline constexpr double epsilon_0 = 8.8541878128e-12;    // F/m

/// Free-space impedance squared, mu_0 / epsilon_0 (ohm^2).
inline constexpr double eta_0_sq = mu_0 / epsilon_0;
/// Free-space impedance, 376.730313 ohm.
inline constexpr double eta_0 = 376.730313668;

inline constexpr double eV = e;                          // J per eV
/// Atomic unit of polarizability, 4 pi eps0 a0^3 (F m^2).
inline constexpr double au_polarizability = 1.64877727436e-41;

/// e^2 / (pi hbar), the N = 0 Hall plateau of the Landau-level sums.
inline constexpr double hall_quantum = e * e / (pi * hbar);

}  // namespace cpgraphene::constants
