#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cpgraphene/conductivity.hpp"
#include "cpgraphene/reflection.hpp"
#include "oracles.hpp"

using namespace cpgraphene;
namespace k = cpgraphene::constants;

TEST(Impedances, ProductAndFreeSpaceLimit) {
  const auto ctx = WaveContext::from_k(3e6, 2e14);
  const auto z = impedances(ctx);
  EXPECT_NEAR(z.z_h * z.z_e / k::eta_0_sq, 1.0, 1e-14);
  const auto normal = WaveContext::from_k(0.0, 2e14);
  const auto zn = impedances(normal);
  EXPECT_NEAR(zn.z_h / k::eta_0, 1.0, 1e-9);
  EXPECT_NEAR(zn.z_e / k::eta_0, 1.0, 1e-9);
  EXPECT_THROW(impedances(WaveContext::from_k(1e6, 0.0)), DomainError);
}

TEST(Impedances, FromKappaRecoversK) {
  const double xi = 5e14, kv = 2e6;
  const auto a = WaveContext::from_k(kv, xi);
  const auto b = WaveContext::from_kappa(a.kappa, xi);
  EXPECT_NEAR(b.k / kv, 1.0, 1e-9);
}

TEST(Reflection, TransparentSheet) {
  const auto r = reflection_pair(WaveContext::from_k(1e6, 1e14), 0.0, 0.0);
  EXPECT_EQ(r.r_ss, 0.0);
  EXPECT_EQ(r.r_pp, 0.0);
}

TEST(Reflection, PerfectConductorLimit) {
  const auto r = reflection_pair(WaveContext::from_k(1e6, 1e14), 1e9, 0.0);
  EXPECT_NEAR(r.r_ss, -1.0, 1e-6);
  EXPECT_NEAR(r.r_pp, 1.0, 1e-6);
}

TEST(Reflection, IsotropicReduction) {
  const auto ctx = WaveContext::from_k(4e6, 3e13);
  const double s = 2e-4;
  const auto z = impedances(ctx);
  const auto r = reflection_pair(ctx, s, 0.0);
  EXPECT_NEAR(r.r_ss, -z.z_h * s / (2.0 + z.z_h * s), 1e-15);
  EXPECT_NEAR(r.r_pp, z.z_e * s / (2.0 + z.z_e * s), 1e-15);
}

TEST(Reflection, MatchesExtendedPrecision) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logk(3.0, 9.0), logxi(10.0, 17.0), logs(-8.0, -2.0),
      sign(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double xi = std::pow(10.0, logxi(rng));
    const auto ctx = WaveContext::from_k(std::pow(10.0, logk(rng)), xi);
    const double sxx = std::pow(10.0, logs(rng));
    const double sxy = sign(rng) * std::pow(10.0, logs(rng));
    const auto r = reflection_pair(ctx, sxx, sxy);
    const auto ref = oracle::reflect(ctx.kappa, xi, sxx, sxy);
    EXPECT_NEAR(r.r_ss, double(ref.ss), 1e-12 * std::max(1.0, std::abs(double(ref.ss))));
    EXPECT_NEAR(r.r_pp, double(ref.pp), 1e-12 * std::max(1.0, std::abs(double(ref.pp))));
  }
}

TEST(Reflection, PassiveSignedAndWellPosed) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> logk(2.0, 10.0), logxi(9.0, 18.0), logs(-10.0, 0.0),
      sign(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const auto ctx = WaveContext::from_k(std::pow(10.0, logk(rng)), std::pow(10.0, logxi(rng)));
    const double sxx = std::pow(10.0, logs(rng));
    const double sxy = sign(rng) * std::pow(10.0, logs(rng));
    const auto r = reflection_pair(ctx, sxx, sxy);
    EXPECT_LE(std::abs(r.r_ss), 1.0);
    EXPECT_LE(std::abs(r.r_pp), 1.0);
    EXPECT_LE(r.r_ss, 0.0);
    EXPECT_GE(r.r_pp, 0.0);
  }
}

TEST(Reflection, RealConductivityTensor) {
  GrapheneParams p;
  p.field = 8.0;
  const MagnetoConductivity cond(p);
  for (double xi : {1e11, 1e13, 1e15}) {
    const auto s = cond(xi);
    for (double kv : {1e5, 1e7, 1e9}) {
      const auto r = reflection_pair(WaveContext::from_k(kv, xi), s);
      EXPECT_LE(std::abs(r.r_ss), 1.0);
      EXPECT_LE(std::abs(r.r_pp), 1.0);
      EXPECT_LE(r.r_ss, 0.0);
      EXPECT_GE(r.r_pp, 0.0);
    }
  }
}

TEST(StaticLimit, DissipativeSheetScreensFully) {
  ConductivitySample s;
  s.sigma_xx = 1e-4;
  s.sigma_xy = -k::hall_quantum;
  const auto r = reflection_pair_static(1e7, s);
  EXPECT_EQ(r.r_pp, 1.0);
  EXPECT_EQ(r.r_ss, 0.0);
  EXPECT_THROW(reflection_pair_static(0.0, s), DomainError);
}

TEST(StaticLimit, DissipationlessHallBranch) {
  ConductivitySample s;
  s.sigma_xx = 0.0;
  s.sigma_xy = k::hall_quantum;
  const auto r = reflection_pair_static(1e7, s);
  const double h = k::eta_0_sq * s.sigma_xy * s.sigma_xy;
  EXPECT_NEAR(r.r_pp, h / (4.0 + h), 1e-15);
  EXPECT_NEAR(r.r_ss, -h / (4.0 + h), 1e-15);
  EXPECT_NEAR(r.r_pp, 2.13e-4, 1e-6);
}

TEST(StaticLimit, ContinuousFromPositiveFrequency) {
  GrapheneParams p;
  p.field = 5.0;
  const MagnetoConductivity cond(p);
  const auto s0 = cond(0.0);
  const auto stat = reflection_pair_static(1e7, s0);
  const double xi = 1e3;
  const auto r = reflection_pair(WaveContext::from_k(1e7, xi), cond(xi));
  EXPECT_NEAR(r.r_pp, stat.r_pp, 1e-4);
  EXPECT_NEAR(r.r_ss, stat.r_ss, 1e-4);
}

TEST(StaticLimit, HallBranchContinuousInCleanSheet) {
  const double sxy = k::hall_quantum, sxx = 1e-20;
  const double xi = 1e5;
  const auto r = reflection_pair(WaveContext::from_k(1e7, xi), sxx, sxy);
  ConductivitySample s;
  s.sigma_xx = 0.0;
  s.sigma_xy = sxy;
  const auto stat = reflection_pair_static(1e7, s);
  EXPECT_NEAR(r.r_pp, stat.r_pp, 1e-4);
  EXPECT_NEAR(r.r_ss, stat.r_ss, 1e-4);
}
