#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cpgraphene/polarizability.hpp"

using namespace cpgraphene;
namespace k = cpgraphene::constants;

namespace {

struct Damped {
  double a0, w0, gamma;
  double im(double w) const {
    const double d = w0 * w0 - w * w;
    return a0 * w0 * w0 * w * gamma / (d * d + w * w * gamma * gamma);
  }
  double imaginary_axis(double xi) const { return a0 * w0 * w0 / (w0 * w0 + xi * xi + gamma * xi); }
};

PolarizabilityModel sampled(const Damped& osc) {
  std::vector<double> w;
  const double lo = 1e13, hi = 1e18;
  const int n = 3000;
  for (int i = 0; i <= n; ++i) {
    const double x = lo * std::pow(hi / lo, double(i) / n);
    if (x < 0.95 * osc.w0 || x > 1.05 * osc.w0) w.push_back(x);
  }
  for (double x = 0.95 * osc.w0; x <= 1.05 * osc.w0; x += 2e-5 * osc.w0) w.push_back(x);
  std::sort(w.begin(), w.end());
  std::vector<double> im;
  for (double x : w) im.push_back(osc.im(x));
  return PolarizabilityModel::tabulated(w, im);
}

std::string rows(int n, double start = 1e14) {
  std::ostringstream s;
  for (int i = 0; i < n; ++i) s << start * (i + 1) << " " << 1e-40 / (i + 1) << "\n";
  return s.str();
}

}  // namespace

TEST(Lorentz, ReferenceValues) {
  const auto m = PolarizabilityModel::lorentz(2e-39, 3e15);
  EXPECT_DOUBLE_EQ(m(0.0), 2e-39);
  EXPECT_DOUBLE_EQ(m(3e15), 1e-39);
  EXPECT_FALSE(m.is_tabulated());
  double prev = m(0.0);
  for (double xi = 1e12; xi < 1e18; xi *= 1.5) {
    EXPECT_LT(m(xi), prev);
    prev = m(xi);
  }
  EXPECT_THROW(m(-1.0), DomainError);
  EXPECT_THROW(PolarizabilityModel::lorentz(0.0, 1e15), ValidationError);
  EXPECT_THROW(PolarizabilityModel::lorentz(1e-39, -1.0), ValidationError);
}

TEST(Lorentz, RubidiumSurrogate) {
  const auto m = PolarizabilityModel::rubidium_surrogate();
  EXPECT_NEAR(m(0.0) / k::au_polarizability, 318.8, 1e-9);
  EXPECT_NEAR(m.oscillator()->resonance * k::hbar / k::eV, 1.59, 1e-12);
}

TEST(KramersKronig, SampledDampedOscillator) {
  const Damped osc{5e-39, 2.4e15, 0.002 * 2.4e15};
  const auto m = sampled(osc);
  ASSERT_TRUE(m.is_tabulated());
  EXPECT_NEAR(m.table()->tail_exponent, 3.0, 0.05);
  for (double xi : {0.0, 1e13, 1e14, 1e15, 2.4e15, 1e16, 1e17, 1e18}) {
    EXPECT_NEAR(m(xi) / osc.imaginary_axis(xi), 1.0, 5e-3) << "xi = " << xi;
  }
}

TEST(KramersKronig, MonotonicOnImaginaryAxis) {
  const Damped osc{5e-39, 2.4e15, 0.05 * 2.4e15};
  const auto m = sampled(osc);
  double prev = m(0.0);
  for (double xi = 1e11; xi < 1e19; xi *= 1.3) {
    const double a = m(xi);
    EXPECT_LE(a, prev) << "xi = " << xi;
    EXPECT_GT(a, 0.0);
    prev = a;
  }
}

TEST(LoadTable, SiColumnsWithComments) {
  std::istringstream in("# rubidium-like\n\n" + rows(10));
  const auto m = load_table(in);
  ASSERT_TRUE(m.is_tabulated());
  EXPECT_EQ(m.table()->omega.size(), 10u);
  EXPECT_DOUBLE_EQ(m.table()->omega.front(), 1e14);
  EXPECT_DOUBLE_EQ(m.table()->im_alpha.front(), 1e-40);
}

TEST(LoadTable, ElectronVoltAtomicUnits) {
  std::ostringstream s;
  s << "#units: eV au\n";
  for (int i = 1; i <= 8; ++i) s << 0.5 * i << "\t" << 10.0 / i << "\n";
  std::istringstream in(s.str());
  const auto m = load_table(in);
  EXPECT_NEAR(m.table()->omega.front() / (0.5 * k::eV / k::hbar), 1.0, 1e-14);
  EXPECT_NEAR(m.table()->im_alpha.front() / (10.0 * k::au_polarizability), 1.0, 1e-14);
}

TEST(LoadTable, Errors) {
  {
    std::istringstream in(rows(3));
    EXPECT_THROW(load_table(in), ValidationError);
  }
  {
    std::istringstream in("1e14 1e-40\n2e14 1e-40\nabc 1e-40\n");
    try {
      load_table(in);
      FAIL();
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 3u);
    }
  }
  {
    std::istringstream in(rows(8) + "#units: eV au\n");
    try {
      load_table(in);
      FAIL();
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 9u);
    }
  }
  {
    std::istringstream in("#units: furlongs\n" + rows(8));
    EXPECT_THROW(load_table(in), ParseError);
  }
  {
    std::istringstream in("1e14 1e-40 7\n" + rows(8, 1e15));
    EXPECT_THROW(load_table(in), ParseError);
  }
  {
    std::istringstream in(rows(8) + "1e14 1e-40\n");
    EXPECT_THROW(load_table(in), ValidationError);
  }
  {
    std::istringstream in(rows(8) + "8e14 1e-40\n");
    EXPECT_THROW(load_table(in), ValidationError);
  }
  {
    std::istringstream in(rows(8) + "9e14 -1e-40\n");
    EXPECT_THROW(load_table(in), ValidationError);
  }
  {
    std::istringstream in("0 1e-40\n" + rows(8));
    EXPECT_THROW(load_table(in), ValidationError);
  }
}
