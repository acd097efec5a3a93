#pragma once

// Atomic polarizability on the imaginary axis. Two sources:
//  * a single Lorentz oscillator, alpha(i xi) = alpha0 w0^2 / (w0^2 + xi^2);
//  * a table of Im alpha(omega), mapped through the Kramers-Kronig relation
//      alpha(i xi) = (2/pi) int_0^inf omega Im alpha(omega) / (omega^2 + xi^2) d omega.
//
// For tables the product g(omega) = omega Im alpha is interpolated linearly
// between samples and every segment is integrated in closed form. Below the
// first sample Im alpha is taken proportional to omega, above the last one
// proportional to omega^-p with p fitted over the last decade of data.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "cpgraphene/constants.hpp"
#include "cpgraphene/errors.hpp"
#include "cpgraphene/quadrature.hpp"

namespace cpgraphene {

struct LorentzOscillator {
  double static_polarizability = 0.0;  // F m^2
  double resonance = 0.0;              // rad/s
};

struct AbsorptionTable {
  std::vector<double> omega;     // rad/s, strictly ascending, > 0
  std::vector<double> im_alpha;  // F m^2, >= 0
  double tail_exponent = 0.0;    // Im alpha ~ omega^-p past the last sample
};

class PolarizabilityModel {
public:
  static constexpr std::size_t min_table_rows = 8;

  /// Ground-state rubidium surrogate: 318.8 au static polarizability, one
  /// oscillator at the D-line energy (1.59 eV).
  static PolarizabilityModel rubidium_surrogate() {
    return lorentz(318.8 * constants::au_polarizability, 1.59 * constants::eV / constants::hbar);
  }

  static PolarizabilityModel lorentz(double alpha0, double omega0) {
    if (!(alpha0 > 0.0)) throw ValidationError("alpha0", "static polarizability must be positive");
    if (!(omega0 > 0.0)) throw ValidationError("omega0", "resonance must be positive");
    PolarizabilityModel m;
    m.source_ = LorentzOscillator{alpha0, omega0};
    return m;
  }

  /// Validates and wraps a sampled Im alpha(omega).
  static PolarizabilityModel tabulated(std::vector<double> omega, std::vector<double> im_alpha) {
    if (omega.size() != im_alpha.size())
      throw ValidationError("table", "column lengths differ");
    if (omega.size() < min_table_rows)
      throw ValidationError("table", "at least " + std::to_string(min_table_rows) + " rows required, got " +
                                         std::to_string(omega.size()));
    for (std::size_t i = 0; i < omega.size(); ++i) {
      if (!(omega[i] > 0.0) || !std::isfinite(omega[i]))
        throw ValidationError("omega", "row " + std::to_string(i + 1) + ": frequency must be positive");
      if (!(im_alpha[i] >= 0.0) || !std::isfinite(im_alpha[i]))
        throw ValidationError("im_alpha", "row " + std::to_string(i + 1) + ": Im alpha must be non-negative");
      if (i > 0 && omega[i] == omega[i - 1])
        throw ValidationError("omega", "row " + std::to_string(i + 1) + ": duplicate frequency");
      if (i > 0 && omega[i] < omega[i - 1])
        throw ValidationError("omega", "row " + std::to_string(i + 1) + ": frequencies must be strictly ascending");
    }
    auto table = std::make_shared<AbsorptionTable>();
    table->omega = std::move(omega);
    table->im_alpha = std::move(im_alpha);
    table->tail_exponent = fit_tail(*table);
    PolarizabilityModel m;
    m.source_ = std::shared_ptr<const AbsorptionTable>(std::move(table));
    return m;
  }

  bool is_tabulated() const noexcept { return source_.index() == 1; }

  const LorentzOscillator* oscillator() const noexcept { return std::get_if<LorentzOscillator>(&source_); }

  const AbsorptionTable* table() const noexcept {
    auto p = std::get_if<std::shared_ptr<const AbsorptionTable>>(&source_);
    return p ? p->get() : nullptr;
  }

  /// alpha(i xi) in F m^2.
  double operator()(double xi) const {
    if (!(xi >= 0.0)) throw DomainError("alpha_imag: xi must be non-negative");
    if (const auto* osc = oscillator()) {
      const double w2 = osc->resonance * osc->resonance;
      return osc->static_polarizability * w2 / (w2 + xi * xi);
    }
    return kramers_kronig(*table(), xi);
  }

private:
  PolarizabilityModel() = default;

  static double fit_tail(const AbsorptionTable& t) {
    const std::size_t n = t.omega.size();
    if (t.im_alpha.back() == 0.0) return 0.0;
    const double w_last = t.omega.back();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = n; i-- > 0;) {
      if (m >= 2 && t.omega[i] < 0.1 * w_last) break;
      if (t.im_alpha[i] <= 0.0) break;
      const double x = std::log(t.omega[i]), y = std::log(t.im_alpha[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    if (m < 2) throw ValidationError("im_alpha", "cannot fit the high-frequency tail: trailing samples vanish");
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double p = -slope;
    if (!(p > 0.0))
      throw ValidationError("im_alpha", "high-frequency tail does not decay (fitted exponent " +
                                            std::to_string(p) + "); Kramers-Kronig integral diverges");
    return p;
  }

  static double kramers_kronig(const AbsorptionTable& t, double xi) {
    const auto& w = t.omega;
    const auto& ia = t.im_alpha;
    const double xi2 = xi * xi;

    // Segment [0, w_0] with g = g_0 (omega / w_0)^2.
    const double w0 = w.front(), g0 = w0 * ia.front();
    double head;
    if (xi == 0.0) {
      head = g0 / w0;
    } else {
      const double y = w0 / xi;
      const double bracket = y < 1e-2 ? w0 * y * y * (1.0 / 3.0 - y * y / 5.0 + y * y * y * y / 7.0)
                                      : w0 - xi * std::atan(y);
      head = g0 / (w0 * w0) * bracket;
    }

    double body = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      const double w1 = w[i], w2 = w[i + 1], d = w2 - w1;
      const double g1 = w1 * ia[i], g2 = w2 * ia[i + 1];
      const double slope = (g2 - g1) / d;
      // int 1/(w^2 + xi^2) and int w/(w^2 + xi^2) over the segment
      const double den = xi2 + w1 * w2;
      const double x = xi * d / den;
      const double atanc = x < 1e-4 ? 1.0 - x * x / 3.0 : std::atan(x) / x;
      const double i0 = d / den * atanc;
      const double i1 = 0.5 * std::log1p((w2 - w1) * (w2 + w1) / (w1 * w1 + xi2));
      body += g1 * i0 + slope * (i1 - w1 * i0);
    }

    double tail = 0.0;
    const double gN = w.back() * ia.back();
    if (gN > 0.0) {
      const double wN = w.back(), p = t.tail_exponent;
      const double r2 = xi2 / (wN * wN);
      if (r2 < 0.25) {
        double term = 1.0, sum = 0.0;
        for (int k = 0; k < 200; ++k) {
          const double add = term / (p + 2.0 * k);
          sum += add;
          if (std::abs(add) < 1e-17 * std::abs(sum)) break;
          term *= -r2;
        }
        tail = gN / wN * sum;
      } else {
        auto f = [&](double s) { return 1.0 / (wN * wN + xi2 * std::pow(s, 2.0 / p)); };
        tail = gN * wN / p * quadrature::integrate(f, 0.0, 1.0, 1e-12).value;
      }
    }
    return 2.0 / constants::pi * (head + body + tail);
  }

  std::variant<LorentzOscillator, std::shared_ptr<const AbsorptionTable>> source_;
};

inline double alpha_imag(const PolarizabilityModel& model, double xi) { return model(xi); }

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

/// Reads the two-column absorption format:
///
///     # comment
///     #units: eV au        (optional; default SI: rad/s and F m^2)
///     <omega> <im_alpha>
///
/// Throws ParseError (with line number) on malformed lines and
/// ValidationError on ordering, sign or row-count violations.
inline PolarizabilityModel load_table(std::istream& in) {
  bool ev_au = false;
  std::vector<double> omega, im;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = detail::trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      auto body = detail::trim(s.substr(1));
      if (body.rfind("units:", 0) == 0) {
        if (!omega.empty()) throw ParseError(lineno, "units pragma must precede the data rows");
        auto units = detail::trim(body.substr(6));
        std::istringstream ss{std::string(units)};
        std::string a, b, extra;
        ss >> a >> b >> extra;
        if (a == "eV" && b == "au" && extra.empty()) {
          ev_au = true;
        } else if (a == "SI" && b.empty()) {
          ev_au = false;
        } else {
          throw ParseError(lineno, "unknown units pragma '" + std::string(units) + "'");
        }
      }
      continue;
    }
    const auto sep = s.find_first_of(" \t");
    if (sep == std::string_view::npos) throw ParseError(lineno, "expected two columns");
    const auto a = detail::trim(s.substr(0, sep));
    const auto b = detail::trim(s.substr(sep));
    double w = 0, v = 0;
    if (b.find_first_of(" \t") != std::string_view::npos) throw ParseError(lineno, "expected two columns");
    if (!detail::parse_double(a, w)) throw ParseError(lineno, "bad frequency '" + std::string(a) + "'");
    if (!detail::parse_double(b, v)) throw ParseError(lineno, "bad Im alpha '" + std::string(b) + "'");
    if (ev_au) {
      w *= constants::eV / constants::hbar;
      v *= constants::au_polarizability;
    }
    omega.push_back(w);
    im.push_back(v);
  }
  return PolarizabilityModel::tabulated(std::move(omega), std::move(im));
}

}  // namespace cpgraphene
