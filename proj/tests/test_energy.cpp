#include <gtest/gtest.h>

#include <cmath>

#include "cpgraphene/energy.hpp"
#include "oracles.hpp"

using namespace cpgraphene;
namespace k = cpgraphene::constants;

namespace {

EnergyQuery query(double z, double B, double T) {
  EnergyQuery q;
  q.distance = z;
  q.graphene.field = B;
  q.graphene.temperature = T;
  return q;
}

}  // namespace

TEST(Matsubara, Frequencies) {
  EXPECT_NEAR(matsubara_frequency(1, 300.0) / 2.46778e14, 1.0, 1e-5);
  EXPECT_DOUBLE_EQ(matsubara_frequency(0, 300.0), 0.0);
  EXPECT_NEAR(matsubara_frequency(7, 4.0) / (7.0 * matsubara_frequency(1, 4.0)), 1.0, 1e-15);
  EXPECT_THROW(matsubara_frequency(1, 0.0), DomainError);
}

TEST(Kernel, PerfectReflectorClosedForm) {
  auto perfect = [](const WaveContext&) { return ReflectionPair{-1.0, 1.0}; };
  for (double z : {1e-8, 1e-7, 1e-6}) {
    for (double xi : {1e10, 1e13, 1e15}) {
      const auto kr = k_integral(xi, z, perfect, 1e-12);
      const double u0 = 2.0 * xi * z / k::c;
      const double exact = -k::c * k::c * std::exp(-u0) * (u0 * u0 + 2.0 * u0 + 2.0) / (16.0 * k::pi * z * z * z);
      EXPECT_NEAR(kr.value / exact, 1.0, 1e-8) << "z=" << z << " xi=" << xi;
      EXPECT_LE(kr.error, 1e-10 * std::abs(exact));
    }
  }
}

TEST(Kernel, GrapheneMatchesFixedGrid) {
  GrapheneParams p;
  p.field = 6.0;
  p.temperature = 30.0;
  const MagnetoConductivity cond(p);
  for (double z : {5e-8, 1e-6}) {
    for (double xi : {2e12, 4e14, 3e16}) {
      const auto s = cond(xi);
      const auto kr = k_integral(xi, z, s, 1e-11);
      const oracle::Real ref = oracle::fixed_kernel(xi, z, [&](oracle::Real kappa) {
        return oracle::reflect(kappa, xi, s.sigma_xx, s.sigma_xy);
      });
      EXPECT_NEAR(kr.value / double(ref), 1.0, 1e-8) << "z=" << z << " xi=" << xi;
    }
  }
  EXPECT_THROW(k_integral(0.0, 1e-7, ConductivitySample{}, 1e-8), DomainError);
}

TEST(Energy, ZeroFrequencyTermClosedForm) {
  const auto q = query(2e-7, 5.0, 300.0);
  const double z = q.distance;
  const double expected =
      -k::k_B * 300.0 * q.atom(0.0) / (16.0 * k::pi * k::epsilon_0 * z * z * z);
  EXPECT_NEAR(zero_frequency_term(q) / expected, 1.0, 1e-14);
}

TEST(Energy, AttractiveAndDecreasingWithDistance) {
  for (double T : {4.0, 300.0}) {
    for (double B : {0.0, 3.0, 12.0}) {
      double prev = -INFINITY;
      for (double z : {5e-8, 1e-7, 3e-7, 1e-6, 3e-6}) {
        const double U = energy(query(z, B, T)).energy;
        EXPECT_LT(U, 0.0);
        EXPECT_GT(U, prev) << "z=" << z << " B=" << B << " T=" << T;
        prev = U;
      }
    }
  }
}

TEST(Energy, ReportedErrorsWithinTolerance) {
  auto q = query(3e-7, 8.0, 77.0);
  const auto r = energy(q);
  EXPECT_LE(r.truncation_error, q.tol_sum * std::abs(r.energy));
  EXPECT_LE(r.quadrature_error, q.tol_k * std::abs(r.energy) * (1.0 + 1e-9));
  EXPECT_GT(r.l_terms_used, 3u);
  EXPECT_FALSE(r.zero_field_fallback);
}

TEST(Energy, StableUnderTighterTolerances) {
  auto q = query(1e-7, 10.0, 20.0);
  const auto loose = energy(q);
  q.tol_k /= 2.0;
  q.tol_sum /= 2.0;
  const auto tight = energy(q);
  EXPECT_LE(std::abs(loose.energy - tight.energy), loose.combined_error() + tight.combined_error());
}

TEST(Energy, ThermalAsymptote) {
  const auto q = query(1e-5, 5.0, 300.0);
  const auto r = energy(q);
  EXPECT_NEAR(r.energy / zero_frequency_term(q), 1.0, 1e-2);
}

TEST(Energy, ColdLimitApproachesZeroTemperature) {
  const auto cold = energy(query(1e-7, 7.0, 1.0));
  const auto zero = energy(query(1e-7, 7.0, 0.0));
  EXPECT_NEAR(cold.energy / zero.energy, 1.0, 2e-3);
}

TEST(Energy, ZeroFieldFallbackFlagged) {
  const auto r = energy(query(1e-6, 0.0, 4.0));
  EXPECT_TRUE(r.zero_field_fallback);
}

TEST(Energy, MatchesBruteForcePipeline) {
  struct Point {
    double z, B, T;
  };
  for (const Point& pt : {Point{1.5e-7, 7.0, 120.0}, Point{1.2e-6, 2.5, 280.0}}) {
    const auto q = query(pt.z, pt.B, pt.T);
    const auto* osc = q.atom.oscillator();
    const double ref = double(oracle::brute_energy(pt.z, q.graphene, osc->static_polarizability, osc->resonance));
    EXPECT_NEAR(energy(q).energy / ref, 1.0, 1e-4) << "z=" << pt.z << " B=" << pt.B << " T=" << pt.T;
  }
}

TEST(Energy, NormalizationReferences) {
  const auto q = query(1e-6, 12.0, 4.0);
  const auto n = normalized_energy(q, Reference::zero_field);
  EXPECT_NEAR(n.ratio, n.value.energy / n.reference.energy, 1e-15);
  EXPECT_TRUE(n.reference.zero_field_fallback);
  const auto r = reference_query(q, Reference::zero_field_zero_temperature);
  EXPECT_EQ(r.graphene.field, 0.0);
  EXPECT_EQ(r.graphene.temperature, 0.0);
}

TEST(Energy, RejectsInvalidQueries) {
  EXPECT_THROW(energy(query(0.0, 1.0, 4.0)), ValidationError);
  EXPECT_THROW(energy(query(1e-7, -1.0, 4.0)), ValidationError);
  EXPECT_THROW(casimir_polder_energy(query(1e-7, 1.0, 0.0)), DomainError);
}
