// Command-line driver: grid scans, crossing prediction and single-point energies.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpgraphene/cpgraphene.hpp"

namespace {

using namespace cpgraphene;

void report_slices(const ScanConfig& cfg, const std::vector<ScanRow>& rows) {
  for (const auto& slice : slices_by_z_T(rows)) {
    if (slice.size() < 3) continue;
    const auto found = detect_discontinuities(slice, cfg.detect_threshold, cfg.detect_floor);
    std::fprintf(stderr, "# z = %.6g m, T = %.6g K: %zu discontinuities", slice.front().z, slice.front().T,
                 found.size());
    for (const auto& d : found) std::fprintf(stderr, " %.4g", d.B);
    std::fputc('\n', stderr);
    const double b_lo = std::max(slice.front().B, 1e-6);
    const auto predicted = predict_crossings(cfg.graphene, b_lo, slice.back().B);
    std::fprintf(stderr, "#   predicted crossings above 0.5 T:");
    for (double b : predicted)
      if (b > 0.5) std::fprintf(stderr, " %.4g", b);
    std::fputc('\n', stderr);
    // Plateaus: stretches between consecutive discontinuities.
    double start = slice.front().B;
    auto plateau = [&](double lo, double hi) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& r : slice)
        if (r.B > lo && r.B < hi && r.ok()) {
          sum += std::isnan(r.U_norm) ? r.U : r.U_norm;
          ++n;
        }
      if (n > 0) std::fprintf(stderr, "#   plateau (%.4g, %.4g) T: mean %s %.6g\n", lo, hi,
                              std::isnan(slice.front().U_norm) ? "U" : "U_norm", sum / static_cast<double>(n));
    };
    for (const auto& d : found) {
      plateau(start, d.B);
      start = d.B;
    }
    plateau(start, slice.back().B + 1e-12);
  }
}

int run_scan_command(const std::string& config_path, const std::string& out, const std::string& format, unsigned jobs,
                     double tol_k, double tol_sum) {
  ScanConfig cfg = parse_config_file(config_path);
  if (!out.empty()) cfg.output = out;
  if (!format.empty()) cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
  if (jobs > 0) cfg.jobs = jobs;
  if (tol_k > 0.0) cfg.tol_k = tol_k;
  if (tol_sum > 0.0) cfg.tol_sum = tol_sum;
  cfg.validate();

  const auto rows = run_scan(cfg);
  emit(rows, cfg.format, cfg.output);
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (r.ok()) continue;
    ++failed;
    std::fprintf(stderr, "row z=%.6g B=%.6g T=%.6g failed: %s\n", r.z, r.B, r.T, r.error.c_str());
  }
  report_slices(cfg, rows);
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir-Polder energy of an atom above magnetically biased graphene"};
  app.require_subcommand(1);

  std::string config_path, out, format;
  unsigned jobs = 0;
  double tol_k = 0.0, tol_sum = 0.0;
  auto* scan = app.add_subcommand("scan", "sweep a (z, B, T) grid from a config file");
  scan->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  scan->add_option("--out", out, "output path, '-' for stdout (overrides config)");
  scan->add_option("--format", format, "csv or json (overrides config)")->check(CLI::IsMember({"csv", "json"}));
  scan->add_option("--jobs", jobs, "worker threads (default: CPGRAPHENE_JOBS or all cores)");
  scan->add_option("--tol-k", tol_k, "k-integral relative tolerance");
  scan->add_option("--tol-sum", tol_sum, "Matsubara truncation relative tolerance");

  double pc_mu = 0.115, pc_bmax = 12.0, pc_bmin = 0.5, pc_vf = 1e6;
  auto* crossings = app.add_subcommand("predict-crossings", "fields where a Landau level crosses mu_c");
  crossings->add_option("--mu-c", pc_mu, "chemical potential (eV)")->capture_default_str();
  crossings->add_option("--b-max", pc_bmax, "largest field (T)")->capture_default_str();
  crossings->add_option("--b-min", pc_bmin, "smallest field (T)")->capture_default_str();
  crossings->add_option("--v-f", pc_vf, "Fermi velocity (m/s)")->capture_default_str();

  double z = 100e-9, B = 0.0, T = 4.0, mu = 0.115, tau = 1.84e-13, vf = 1e6;
  double e_tol_k = 1e-7, e_tol_sum = 1e-6;
  const auto rb = PolarizabilityModel::rubidium_surrogate();
  double alpha0 = rb.oscillator()->static_polarizability, omega0 = rb.oscillator()->resonance;
  std::string atom_table, normalize = "none", e_format = "text";
  auto* single = app.add_subcommand("energy", "single-point energy");
  single->add_option("--z", z, "atom-sheet distance (m)")->required();
  single->add_option("--B", B, "magnetic field (T)")->required();
  single->add_option("--T", T, "temperature (K); 0 uses the zero-temperature integral")->required();
  single->add_option("--mu-c", mu, "chemical potential (eV)")->capture_default_str();
  single->add_option("--tau", tau, "scattering time (s)")->capture_default_str();
  single->add_option("--v-f", vf, "Fermi velocity (m/s)")->capture_default_str();
  single->add_option("--alpha0", alpha0, "Lorentz static polarizability (F m^2)")->capture_default_str();
  single->add_option("--omega0", omega0, "Lorentz resonance (rad/s)")->capture_default_str();
  single->add_option("--atom-table", atom_table, "Im alpha table (replaces the Lorentz model)")
      ->check(CLI::ExistingFile);
  single->add_option("--tol-k", e_tol_k, "k-integral relative tolerance")->capture_default_str();
  single->add_option("--tol-sum", e_tol_sum, "Matsubara truncation relative tolerance")->capture_default_str();
  single->add_option("--normalize", normalize, "none, B0 or T0B0")->check(CLI::IsMember({"none", "B0", "T0B0"}));
  single->add_option("--format", e_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (scan->parsed()) return run_scan_command(config_path, out, format, jobs, tol_k, tol_sum);

    if (crossings->parsed()) {
      GrapheneParams p;
      p.chemical_potential = pc_mu * constants::eV;
      p.fermi_velocity = pc_vf;
      const auto bs = predict_crossings(p, pc_bmin, pc_bmax);
      const double b1 = p.chemical_potential * p.chemical_potential /
                        (2.0 * constants::hbar * constants::e * pc_vf * pc_vf);
      for (double b : bs) std::printf("%.0f %.12g\n", std::round(b1 / b), b);
      return 0;
    }

    EnergyQuery q;
    q.distance = z;
    q.graphene.field = B;
    q.graphene.temperature = T;
    q.graphene.chemical_potential = mu * constants::eV;
    q.graphene.scattering_time = tau;
    q.graphene.fermi_velocity = vf;
    q.tol_k = e_tol_k;
    q.tol_sum = e_tol_sum;
    if (!atom_table.empty()) {
      std::ifstream in(atom_table);
      q.atom = load_table(in);
    } else {
      q.atom = PolarizabilityModel::lorentz(alpha0, omega0);
    }
    const EnergyResult r = energy(q);
    double ratio = std::nan("");
    if (normalize != "none") {
      const auto ref = normalize == "B0" ? Reference::zero_field : Reference::zero_field_zero_temperature;
      ratio = r.energy / energy(reference_query(q, ref)).energy;
    }
    if (e_format == "json") {
      nlohmann::json o;
      o["z_m"] = z;
      o["B_T"] = B;
      o["T_K"] = T;
      o["U_J"] = r.energy;
      o["U_norm"] = std::isnan(ratio) ? nlohmann::json(nullptr) : nlohmann::json(ratio);
      o["err_quad_J"] = r.quadrature_error;
      o["err_trunc_J"] = r.truncation_error;
      o["l_terms"] = r.l_terms_used;
      std::cout << o.dump(1) << '\n';
    } else {
      std::printf("U = %.12g J\n", r.energy);
      if (!std::isnan(ratio)) std::printf("U_norm = %.12g\n", ratio);
      std::printf("quadrature error = %.3g J\ntruncation error = %.3g J\nterms = %zu\n", r.quadrature_error,
                  r.truncation_error, r.l_terms_used);
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
