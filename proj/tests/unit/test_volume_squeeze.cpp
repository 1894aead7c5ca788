#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fujita/errors.hpp"
#include "fujita/fujita.hpp"
#include "fujita/heat_kernel.hpp"
#include "fujita/squeeze.hpp"
#include "fujita/volume.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fujita;

namespace {

Vertex origin_of(const WeightedGraph& g) {
  const std::vector<int> o(static_cast<std::size_t>(g.family()->dimension), 0);
  return g.lattice_vertex(o);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

constexpr double e = std::numbers::e;

}  // namespace

TEST(VolumeFit, LatticeExponents) {
  const auto z1 = lattice(1, 80, MeasureMode::Degree);
  const auto f1 = volume_growth_fit(z1, origin_of(z1), 8, 64, GrowthRegime::Polynomial);
  EXPECT_NEAR(f1.m_hat, 1.0, 0.05);
  const auto z2 = lattice(2, 70, MeasureMode::Degree);
  const auto f2 = volume_growth_fit(z2, origin_of(z2), 8, 64, GrowthRegime::Polynomial);
  EXPECT_NEAR(f2.m_hat, 2.0, 0.1);
  ASSERT_EQ(f2.radii.size(), 57u);
  for (std::size_t i = 0; i < f2.radii.size(); ++i)
    EXPECT_DOUBLE_EQ(f2.volumes[i], 4.0 * oracle::l1_ball_count(2, f2.radii[i]));
}

TEST(VolumeFit, BracketsHoldAtEveryRadius) {
  const auto z2 = lattice(2, 70, MeasureMode::Counting);
  for (auto regime : {GrowthRegime::Polynomial, GrowthRegime::LogCorrected}) {
    const auto f = volume_growth_fit(z2, origin_of(z2), 8, 64, regime);
    for (std::size_t i = 0; i < f.radii.size(); ++i) {
      const double r = f.radii[i], V = f.volumes[i];
      const double tol = 1e-12 * V;
      if (regime == GrowthRegime::Polynomial) {
        EXPECT_LE(std::pow(r, f.m) / f.c_low, V + tol);
        EXPECT_GE(f.c_high * std::pow(r, f.m), V - tol);
      } else {
        EXPECT_GE(f.zeta, 0.0);
        EXPECT_GE(f.eta, 0.0);
        EXPECT_LE(f.c_lower_log * std::pow(r, f.m) * std::pow(std::log(r), -f.zeta), V + tol);
        EXPECT_GE(f.c_upper_log * std::pow(r, f.m) * std::pow(std::log(r), f.eta), V - tol);
      }
    }
  }
}

TEST(VolumeFit, FixedExponent) {
  const auto z1 = lattice(1, 80, MeasureMode::Counting);
  const auto f = volume_growth_fit(z1, origin_of(z1), 8, 64, GrowthRegime::Polynomial, 1.0);
  EXPECT_EQ(f.m, 1.0);
  // V = 2r + 1 on [8, 64]: V/r ranges over [2 + 1/64, 2 + 1/8].
  EXPECT_NEAR(f.c_high, 2.0 + 1.0 / 8.0, 1e-12);
  EXPECT_NEAR(1.0 / f.c_low, 2.0 + 1.0 / 64.0, 1e-12);
}

TEST(VolumeFit, Errors) {
  const auto z1 = lattice(1, 30, MeasureMode::Counting);
  const Vertex o = origin_of(z1);
  EXPECT_EQ(code_of([&] { (void)volume_growth_fit(z1, o, 1, 10, GrowthRegime::Polynomial); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { (void)volume_growth_fit(z1, o, 10, 10, GrowthRegime::Polynomial); }), ErrorCode::DegenerateFit);
  EXPECT_EQ(code_of([&] { (void)volume_growth_fit(z1, o, 8, 64, GrowthRegime::Polynomial); }),
            ErrorCode::TruncationTooSmall);
}

TEST(SqueezeConstants, CriticalUnitConstants) {
  const auto k = critical_constants(1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
  EXPECT_EQ(k.c_double_prime, e);
  EXPECT_EQ(k.C2, 1.0 / e);
  EXPECT_EQ(k.C3, 1.0 / (2.0 * e));
  EXPECT_EQ(k.upper, e);
  EXPECT_TRUE(std::isnan(critical_lower(k, 0.5, 1.0)));
  EXPECT_EQ(critical_lower(k, 1.0, 1.0), 0.0);
}

TEST(SqueezeConstants, CriticalScaling) {
  // C2 = c2^a C1^{1+a}/(e c^a), C3 = C2 c2/(2^{m/2} c), upper = c c1 e c C'/c2.
  const double a = 2.0, m = 1.0, c = 3.0, c1 = 1.5, c2 = 0.5, c3 = 0.25, cp = 1.25, C1 = 2.0;
  const auto k = critical_constants(a, m, c, c1, c2, c3, cp, C1);
  const double C2 = 0.25 * 8.0 / (e * 9.0);
  EXPECT_DOUBLE_EQ(k.C2, C2);
  EXPECT_DOUBLE_EQ(k.C3, C2 * 0.5 / (std::sqrt(2.0) * 3.0));
  EXPECT_DOUBLE_EQ(k.upper, c * c1 * e * c * cp / c2);
  EXPECT_DOUBLE_EQ(critical_lower(k, 100.0, 2.0), k.C3 * std::log(100.0 / 2.0));
}

TEST(SqueezeConstants, SubcriticalUnitConstants) {
  // eta = 0, zeta = 1, alpha = 1: exponent 1, b = 2, C~ = 2^{-1}/(3 e).
  const auto k = subcritical_constants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 5.0);
  EXPECT_EQ(k.exponent, 1.0);
  EXPECT_EQ(k.b, 2.0);
  EXPECT_EQ(k.c_double_prime, e);
  EXPECT_EQ(k.C_tilde, 0.5 / (3.0 * e));
  EXPECT_DOUBLE_EQ(subcritical_lower(k, 4.0), k.C_tilde * 16.0 / std::log(8.0));

  // eta = 1, zeta = 0, alpha = 1, r = e: exponent 2, b = 1, C~ = 1/(3 e) / log e.
  const auto j = subcritical_constants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, e);
  EXPECT_EQ(j.exponent, 2.0);
  EXPECT_EQ(j.b, 1.0);
  EXPECT_DOUBLE_EQ(j.C_tilde, 1.0 / (3.0 * e));

  // eta = zeta = 0: b is infinite and the lower curve is C~ t^{1+alpha}.
  const auto z = subcritical_constants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 5.0);
  EXPECT_TRUE(std::isinf(z.b));
  EXPECT_EQ(z.C_tilde, 0.25 / (3.0 * e));
  EXPECT_DOUBLE_EQ(subcritical_lower(z, 3.0), z.C_tilde * 9.0);
}

TEST(SqueezeConstants, SubcriticalGeneral) {
  const double a = 0.5, cl = 0.8, cu = 2.0, c1 = 1.2, c2 = 0.4, c3 = 0.3, zeta = 0.5, eta = 0.25, cp = 3.0, C1 = 1.5,
               a0 = 0.2, r = 20.0;
  const auto k = subcritical_constants(a, cl, cu, c1, c2, c3, zeta, eta, cp, C1, a0, r);
  const double Cpp = e * cu * cp / c2;
  const double expect = cl * std::pow(2.0, (eta - 1.0 / a) * (1.0 + a) + zeta) / ((2.0 + a) * c1 * Cpp) *
                        std::pow(std::pow(a0, a) * c2 * C1 / cu, 1.0 + a) * std::pow(std::log(std::sqrt(c3 * r * r)), -eta);
  EXPECT_DOUBLE_EQ(k.C_tilde, expect);
  EXPECT_DOUBLE_EQ(k.b, (1.0 + a) / (eta * (1.0 + a) + zeta));
}

TEST(SqueezeReport, ErrorsAndCurves) {
  const auto g = lattice(1, 200, MeasureMode::Degree);
  const Vertex o = origin_of(g);
  const std::vector<double> a(g.size(), 0.5);
  const std::vector<double> ts{4.0, 8.0, 16.0, 32.0};
  SqueezeFits fits;
  const auto grid = geometric_grid(1.0, 1e6, 2.0);
  EXPECT_EQ(code_of([&] { (void)squeeze_report(g, a, 2.0, o, fits, grid, 20, SqueezeRegime::Critical); }),
            ErrorCode::MissingFit);
  fits.gaussian = gaussian_fit(g, o, ts, {});
  fits.volume = volume_growth_fit(g, o, 8, 64, GrowthRegime::Polynomial);
  EXPECT_EQ(code_of([&] { (void)squeeze_report(g, a, 2.0, o, fits, grid, 20, SqueezeRegime::Subcritical); }),
            ErrorCode::MissingFit);
  EXPECT_EQ(code_of([&] { (void)squeeze_report(g, a, 2.0, o, fits, grid, 5, SqueezeRegime::Critical); }),
            ErrorCode::RadiusBelowValidity);

  const auto rep = squeeze_report(g, a, 2.0, o, fits, grid, 13, SqueezeRegime::Critical);
  ASSERT_TRUE(rep.critical.has_value());
  EXPECT_EQ(rep.lower.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= rep.rho) {
      EXPECT_TRUE(std::isnan(rep.lower[i]));
    } else if (i > 0 && !std::isnan(rep.lower[i - 1])) {
      EXPECT_GT(rep.lower[i], rep.lower[i - 1]);
    }
    EXPECT_EQ(rep.upper[i], rep.critical->upper);
  }
  ASSERT_TRUE(rep.log_t_star.has_value());
  EXPECT_NEAR(*rep.log_t_star, std::log(fits.gaussian->c3 * 2.0 * 169.0) + rep.critical->upper / rep.critical->C3,
              1e-9 * *rep.log_t_star);
  // With these fitted constants the crossing lies far beyond any grid: frozen regression.
  EXPECT_FALSE(rep.t_star.has_value());
  EXPECT_NEAR(*rep.log_t_star, 450698.0, 0.5e-3 * 450698.0);
}

TEST(SqueezeReport, CrossingFoundWithFavourableConstants) {
  // Hand-built unit fits and large data so the logarithm wins early.
  const auto g = lattice(1, 200, MeasureMode::Degree);
  const Vertex o = origin_of(g);
  const std::vector<double> a(g.size(), 5.0);
  GaussianFit gf;
  gf.x0 = o;
  gf.t0 = 1.0;
  gf.c1 = 1.0;
  gf.c2 = 1.0;
  gf.c3 = 1.0;
  VolumeGrowthFit vf;
  vf.x0 = o;
  vf.r_min = 2;
  vf.r_max = 8;
  vf.m = 1.0;
  vf.c_low = 1.0;
  vf.c_high = 1.0;
  const SqueezeFits fits{gf, vf};
  const auto grid = geometric_grid(1.0, 1e6, 2.0);
  const auto rep = squeeze_report(g, a, 2.0, o, fits, grid, 3, SqueezeRegime::Critical);
  ASSERT_TRUE(rep.t_star.has_value());
  EXPECT_GE(*rep.t_star, std::exp(*rep.log_t_star) * (1 - 1e-12));
  EXPECT_LT(*rep.t_star / 2.0, std::exp(*rep.log_t_star));
}
