#pragma once

// Grid sweeps over (z, B, T), discontinuity detection and table output.
//
// Config grammar: one `key = value` per line, '#' starts a comment. Grid
// values are a comma list (`1e-7, 2e-7`), a linear range `start:stop:step`
// (stop included when it lands on the grid) or a log range
// `log:e_start:e_stop:npoints` spanning 10^e_start .. 10^e_stop.

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cpgraphene/conductivity.hpp"
#include "cpgraphene/energy.hpp"
#include "cpgraphene/errors.hpp"
#include "cpgraphene/polarizability.hpp"

namespace cpgraphene {

enum class Normalization { none, zero_field, zero_field_zero_temperature };
enum class OutputFormat { csv, json };

struct ScanConfig {
  std::vector<double> z_grid;  // m
  std::vector<double> B_grid;  // T
  std::vector<double> T_list;  // K; 0 selects the zero-temperature engine
  GrapheneParams graphene;     // field and temperature are taken from the grids
  PolarizabilityModel atom = PolarizabilityModel::rubidium_surrogate();
  std::string atom_source = "lorentz";
  Normalization normalization = Normalization::none;
  double tol_k = 1e-7;
  double tol_sum = 1e-6;
  std::string output = "-";
  OutputFormat format = OutputFormat::csv;
  unsigned jobs = 0;  // 0: CPGRAPHENE_JOBS, else hardware concurrency
  double detect_threshold = 5.0;
  double detect_floor = 1e-4;

  std::size_t row_count() const { return z_grid.size() * B_grid.size() * T_list.size(); }

  void validate() const {
    auto check_grid = [](const std::vector<double>& g, const char* key, auto ok, const char* what) {
      if (g.empty()) throw ValidationError(key, "grid is empty");
      for (double v : g)
        if (!ok(v)) throw ValidationError(key, std::string(what) + ", got " + std::to_string(v));
    };
    check_grid(z_grid, "z_grid", [](double v) { return v > 0.0 && std::isfinite(v); }, "distances must be positive");
    check_grid(B_grid, "B_grid", [](double v) { return v >= 0.0 && std::isfinite(v); }, "fields must be non-negative");
    check_grid(T_list, "T_list", [](double v) { return v >= 0.0 && std::isfinite(v); },
               "temperatures must be non-negative");
    if (!(tol_k > 0.0 && tol_k < 1.0)) throw ValidationError("tol_k", "must lie in (0, 1)");
    if (!(tol_sum > 0.0 && tol_sum < 1.0)) throw ValidationError("tol_sum", "must lie in (0, 1)");
    if (!(detect_threshold > 0.0)) throw ValidationError("detect_threshold", "must be positive");
    if (!(detect_floor >= 0.0)) throw ValidationError("detect_floor", "must be non-negative");
  }
};

struct ScanRow {
  double z = 0.0;
  double B = 0.0;
  double T = 0.0;
  double U = std::numeric_limits<double>::quiet_NaN();
  double U_norm = std::numeric_limits<double>::quiet_NaN();
  double err_quad = std::numeric_limits<double>::quiet_NaN();
  double err_trunc = std::numeric_limits<double>::quiet_NaN();
  std::size_t l_terms = 0;
  bool zero_field_fallback = false;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

namespace detail {

inline bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  std::string tmp(s);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size() && errno != ERANGE;
}

inline double number_or_throw(std::string_view s, const std::string& key) {
  double v = 0.0;
  if (!parse_number(s, v)) throw ValidationError(key, "not a number: '" + std::string(trim(s)) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::vector<double> parse_grid(std::string_view value, const std::string& key) {
  value = trim(value);
  std::vector<double> out;
  if (value.find(':') != std::string_view::npos) {
    auto parts = split(value, ':');
    if (parts.size() == 4 && parts[0] == "log") {
      const double a = number_or_throw(parts[1], key), b = number_or_throw(parts[2], key);
      const double n = number_or_throw(parts[3], key);
      if (!(n >= 1.0) || n != std::floor(n)) throw ValidationError(key, "log range needs an integer point count >= 1");
      const auto count = static_cast<std::size_t>(n);
      for (std::size_t i = 0; i < count; ++i) {
        const double e = count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
        out.push_back(std::pow(10.0, e));
      }
      return out;
    }
    if (parts.size() != 3) throw ValidationError(key, "range must be start:stop:step or log:e0:e1:n");
    const double a = number_or_throw(parts[0], key), b = number_or_throw(parts[1], key);
    const double step = number_or_throw(parts[2], key);
    if (!(step > 0.0)) throw ValidationError(key, "range step must be positive");
    if (b < a) throw ValidationError(key, "range stop below start");
    const double span = (b - a) / step;
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    if (count > 10'000'000) throw ValidationError(key, "range has too many points");
    for (std::size_t i = 0; i < count; ++i) out.push_back(a + step * static_cast<double>(i));
    return out;
  }
  for (auto item : split(value, ',')) {
    if (item.empty()) throw ValidationError(key, "empty list entry");
    out.push_back(number_or_throw(item, key));
  }
  return out;
}

}  // namespace detail

/// Parses the flat key-value config. Relative table paths resolve against
/// `base_dir`. Errors name the offending key.
inline ScanConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  ScanConfig cfg;
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = detail::trim(line);
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = detail::trim(s.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected 'key = value'");
    std::string key(detail::trim(s.substr(0, eq)));
    std::string value(detail::trim(s.substr(eq + 1)));
    if (key.empty()) throw ParseError(lineno, "missing key");
    if (!kv.emplace(key, value).second) throw ValidationError(key, "given twice (line " + std::to_string(lineno) + ")");
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto number = [&](const std::string& key, double& dst) {
    if (auto v = take(key)) dst = detail::number_or_throw(*v, key);
  };

  if (auto v = take("z_grid")) cfg.z_grid = detail::parse_grid(*v, "z_grid");
  if (auto v = take("B_grid")) cfg.B_grid = detail::parse_grid(*v, "B_grid");
  if (auto v = take("T_list")) cfg.T_list = detail::parse_grid(*v, "T_list");

  double mu_ev = cfg.graphene.chemical_potential / constants::eV;
  number("mu_c", mu_ev);
  cfg.graphene.chemical_potential = mu_ev * constants::eV;
  number("v_F", cfg.graphene.fermi_velocity);
  number("tau", cfg.graphene.scattering_time);
  number("tol_k", cfg.tol_k);
  number("tol_sum", cfg.tol_sum);
  number("detect_threshold", cfg.detect_threshold);
  number("detect_floor", cfg.detect_floor);

  const auto* osc = cfg.atom.oscillator();
  double alpha0 = osc->static_polarizability, omega0 = osc->resonance;
  number("alpha0", alpha0);
  number("omega0", omega0);
  const auto atom = take("atom").value_or("lorentz");
  if (atom == "lorentz") {
    cfg.atom = PolarizabilityModel::lorentz(alpha0, omega0);
    cfg.atom_source = "lorentz";
  } else if (atom.rfind("table:", 0) == 0) {
    std::filesystem::path path(std::string(detail::trim(std::string_view(atom).substr(6))));
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    std::ifstream table(path);
    if (!table) throw ValidationError("atom", "cannot open polarizability table " + path.string());
    try {
      cfg.atom = load_table(table);
    } catch (const ParseError& e) {
      throw ValidationError("atom", path.string() + ": " + e.what());
    }
    cfg.atom_source = path.string();
  } else {
    throw ValidationError("atom", "expected 'lorentz' or 'table:<path>', got '" + atom + "'");
  }

  if (auto v = take("normalization")) {
    if (*v == "none") cfg.normalization = Normalization::none;
    else if (*v == "B0") cfg.normalization = Normalization::zero_field;
    else if (*v == "T0B0") cfg.normalization = Normalization::zero_field_zero_temperature;
    else throw ValidationError("normalization", "expected none, B0 or T0B0, got '" + *v + "'");
  }
  if (auto v = take("output")) cfg.output = *v;
  if (auto v = take("format")) {
    if (*v == "csv") cfg.format = OutputFormat::csv;
    else if (*v == "json") cfg.format = OutputFormat::json;
    else throw ValidationError("format", "expected csv or json, got '" + *v + "'");
  }
  if (auto v = take("jobs")) {
    const double j = detail::number_or_throw(*v, "jobs");
    if (!(j >= 0.0) || j != std::floor(j)) throw ValidationError("jobs", "must be a non-negative integer");
    cfg.jobs = static_cast<unsigned>(j);
  }
  if (!kv.empty()) throw ValidationError(kv.begin()->first, "unknown key");
  cfg.validate();
  cfg.graphene.validate();
  return cfg;
}

inline ScanConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

/// Worker count: explicit value, else $CPGRAPHENE_JOBS, else hardware threads.
inline unsigned resolve_jobs(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CPGRAPHENE_JOBS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

template <class Task>
void parallel_for(std::size_t count, unsigned jobs, const Task& task) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) task(i);
  };
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  if (n <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace detail

inline EnergyQuery make_query(const ScanConfig& cfg, double z, double B, double T) {
  EnergyQuery q;
  q.distance = z;
  q.graphene = cfg.graphene;
  q.graphene.field = B;
  q.graphene.temperature = T;
  q.atom = cfg.atom;
  q.tol_k = cfg.tol_k;
  q.tol_sum = cfg.tol_sum;
  return q;
}

/// One row per grid point in z-major, then B, then T order. Failed points
/// carry their diagnostic in `error` and do not stop the scan.
inline std::vector<ScanRow> run_scan(const ScanConfig& cfg) {
  cfg.validate();
  const unsigned jobs = resolve_jobs(cfg.jobs);
  const std::size_t nz = cfg.z_grid.size(), nb = cfg.B_grid.size(), nt = cfg.T_list.size();

  // Reference energies, one per (z, T), computed exactly like a B = 0 row.
  struct Ref {
    double U = std::numeric_limits<double>::quiet_NaN();
    std::string error;
  };
  std::vector<Ref> refs;
  if (cfg.normalization != Normalization::none) {
    refs.resize(nz * nt);
    detail::parallel_for(refs.size(), jobs, [&](std::size_t i) {
      const double z = cfg.z_grid[i / nt];
      const double T = cfg.normalization == Normalization::zero_field ? cfg.T_list[i % nt] : 0.0;
      try {
        refs[i].U = energy(make_query(cfg, z, 0.0, T)).energy;
      } catch (const std::exception& e) {
        refs[i].error = e.what();
      }
    });
  }

  std::vector<ScanRow> rows(cfg.row_count());
  detail::parallel_for(rows.size(), jobs, [&](std::size_t i) {
    const std::size_t iz = i / (nb * nt), ib = (i / nt) % nb, it = i % nt;
    ScanRow& row = rows[i];
    row.z = cfg.z_grid[iz];
    row.B = cfg.B_grid[ib];
    row.T = cfg.T_list[it];
    try {
      const EnergyResult r = energy(make_query(cfg, row.z, row.B, row.T));
      row.U = r.energy;
      row.err_quad = r.quadrature_error;
      row.err_trunc = r.truncation_error;
      row.l_terms = r.l_terms_used;
      row.zero_field_fallback = r.zero_field_fallback;
      if (!refs.empty()) {
        const Ref& ref = refs[iz * nt + it];
        if (!ref.error.empty()) throw std::runtime_error("reference energy failed: " + ref.error);
        row.U_norm = row.U / ref.U;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

struct Discontinuity {
  double B = 0.0;     // midpoint of the steepest step in the cluster
  double jump = 0.0;  // U(B + dB) - U(B) across that step
};

/// Flags steps whose |dU| exceeds `threshold` times the median step and
/// `floor` times |U|; runs of adjacent flagged steps count as one
/// discontinuity. Rows must share z and T and be sorted by B.
inline std::vector<Discontinuity> detect_discontinuities(std::span<const ScanRow> rows, double threshold = 5.0,
                                                         double floor = 1e-4) {
  std::vector<Discontinuity> out;
  if (rows.size() < 3) return out;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].B > rows[i - 1].B)) throw DomainError("detect_discontinuities: rows must be sorted by B");
  std::vector<double> steps(rows.size() - 1);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) steps[i] = rows[i + 1].U - rows[i].U;
  std::vector<double> mags;
  mags.reserve(steps.size());
  for (double d : steps)
    if (std::isfinite(d)) mags.push_back(std::abs(d));
  if (mags.empty()) return out;
  auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
  std::nth_element(mags.begin(), mid, mags.end());
  const double median = *mid;

  std::optional<Discontinuity> open;
  double open_mag = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double m = std::abs(steps[i]);
    const double scale = std::max(std::abs(rows[i].U), std::abs(rows[i + 1].U));
    const bool flagged = std::isfinite(m) && m > threshold * median && m > floor * scale;
    if (flagged) {
      if (!open || m > open_mag) {
        if (!open) open.emplace();
        open->B = 0.5 * (rows[i].B + rows[i + 1].B);
        open->jump = steps[i];
        open_mag = m;
      }
    } else if (open) {
      out.push_back(*open);
      open.reset();
      open_mag = 0.0;
    }
  }
  if (open) out.push_back(*open);
  return out;
}

/// Rows sharing (z, T) as B-sorted slices, in first-appearance order.
inline std::vector<std::vector<ScanRow>> slices_by_z_T(std::span<const ScanRow> rows) {
  std::vector<std::vector<ScanRow>> out;
  std::map<std::pair<double, double>, std::size_t> index;
  for (const auto& r : rows) {
    auto [it, fresh] = index.emplace(std::make_pair(r.z, r.T), out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(r);
  }
  for (auto& s : out) std::sort(s.begin(), s.end(), [](const ScanRow& a, const ScanRow& b) { return a.B < b.B; });
  return out;
}

inline constexpr const char* csv_header = "z_m,B_T,T_K,U_J,U_norm,err_quad_J,err_trunc_J,l_terms";

/// %.12g, with nan for missing values.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void emit(std::span<const ScanRow> rows, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::csv) {
    out << csv_header << '\n';
    for (const auto& r : rows) {
      out << format_number(r.z) << ',' << format_number(r.B) << ',' << format_number(r.T) << ','
          << format_number(r.U) << ',' << format_number(r.U_norm) << ',' << format_number(r.err_quad) << ','
          << format_number(r.err_trunc) << ',' << r.l_terms << '\n';
    }
    return;
  }
  auto num = [](double v) -> nlohmann::json {
    if (!std::isfinite(v)) return nullptr;
    return std::strtod(format_number(v).c_str(), nullptr);
  };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json o;
    o["z_m"] = num(r.z);
    o["B_T"] = num(r.B);
    o["T_K"] = num(r.T);
    o["U_J"] = num(r.U);
    o["U_norm"] = num(r.U_norm);
    o["err_quad_J"] = num(r.err_quad);
    o["err_trunc_J"] = num(r.err_trunc);
    o["l_terms"] = r.l_terms;
    if (r.zero_field_fallback) o["note"] = "zero-field fallback";
    if (!r.ok()) o["error"] = r.error;
    arr.push_back(std::move(o));
  }
  out << arr.dump(1) << '\n';
}

/// Writes to `destination`, or stdout for "-". Throws with the path on I/O failure.
inline void emit(std::span<const ScanRow> rows, OutputFormat format, const std::string& destination) {
  if (destination == "-" || destination.empty()) {
    emit(rows, format, std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output " + destination);
  emit(rows, format, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + destination);
}

/// Reads a table written by emit(..., csv, ...).
inline std::vector<ScanRow> read_csv(std::istream& in) {
  std::vector<ScanRow> rows;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++lineno;
  if (detail::trim(line) != csv_header) throw ParseError(1, "unexpected header");
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split(line, ',');
    if (cells.size() != 8) throw ParseError(lineno, "expected 8 columns");
    ScanRow r;
    double* fields[] = {&r.z, &r.B, &r.T, &r.U, &r.U_norm, &r.err_quad, &r.err_trunc};
    for (std::size_t i = 0; i < 7; ++i)
      if (!detail::parse_number(cells[i], *fields[i])) throw ParseError(lineno, "bad number in column " + std::to_string(i + 1));
    double l = 0;
    if (!detail::parse_number(cells[7], l)) throw ParseError(lineno, "bad l_terms");
    r.l_terms = static_cast<std::size_t>(l);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace cpgraphene
