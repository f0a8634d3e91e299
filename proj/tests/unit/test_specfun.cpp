#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cpsphere/specfun.hpp"
#include "frozen_oracles.hpp"
#include "support.hpp"

using namespace cpsphere;
using namespace cpsphere::specfun;
using complex = std::complex<double>;

TEST(ScaledComplex, KeepsProductsBeyondDoubleRange) {
  ScaledComplex big(complex(1e300, 0.0));
  ScaledComplex tiny(complex(1e-300, 0.0));
  const ScaledComplex huge = big * big * big;
  EXPECT_FALSE(huge.fits());
  EXPECT_NEAR(huge.log2_abs(), 900.0 * std::log2(10.0), 1e-9);
  const ScaledComplex back = huge * tiny * tiny * tiny;
  EXPECT_REL(back.value(), complex(1.0, 0.0), 1e-14);
}

TEST(ScaledComplex, AdditionAlignsExponents) {
  const ScaledComplex a(complex(3.0, 1.0), 10);
  const ScaledComplex b(complex(1.0, -2.0), 8);
  EXPECT_REL((a + b).value(), complex(3.0 * 1024 + 256, 1024 - 512), 1e-15);
  EXPECT_REL((a - a).value(), complex{}, 0.0);
}

TEST(ScaledComplex, ExpOfLargeArgument) {
  const ScaledComplex e = ScaledComplex::exp(complex(800.0, 1.0));
  EXPECT_NEAR(e.log2_abs(), 800.0 / std::log(2.0), 1e-9);
  const ScaledComplex ratio = e / ScaledComplex::exp(complex(799.0, 1.0));
  EXPECT_REL(ratio.value(), complex(std::exp(1.0), 0.0), 1e-13);
}

TEST(SphericalBessel, MatchesOracleValues) {
  EXPECT_REL(sph_bessel_j(0, 1e-3), complex(oracle::sph_j_j0_1em3), 1e-15);
  EXPECT_REL(sph_bessel_j(1, {0, 1}), oracle::sph_j_j1_i, 1e-14);
  EXPECT_REL(sph_bessel_j(5, 0.01), complex(oracle::sph_j_j5_0p01), 1e-13);
  EXPECT_REL(sph_bessel_j(3, {2, 3}), oracle::sph_j_j3_2p3i, 1e-13);
  EXPECT_REL(sph_bessel_j(10, 0.5), complex(oracle::sph_j_j10_0p5), 1e-13);
  EXPECT_REL(sph_bessel_j(2, 50.0), complex(oracle::sph_j_j2_50), 1e-12);
  EXPECT_REL(sph_bessel_j(30, {5, 0.5}), oracle::sph_j_j30_5p0p5i, 1e-12);
  EXPECT_REL(sph_bessel_j(1, {0, 200}), oracle::sph_j_j1_200i, 1e-13);
  EXPECT_REL(sph_bessel_j(100, 1.0), complex(oracle::sph_j_j100_1), 1e-12);
  EXPECT_REL(sph_bessel_j(8, 40.0), complex(oracle::sph_j_j8_40), 1e-12);
}

TEST(SphericalBessel, ValuesAtTheOrigin) {
  EXPECT_EQ(sph_bessel_j(0, 0.0), complex(1.0, 0.0));
  EXPECT_EQ(sph_bessel_j(4, 0.0), complex{});
  EXPECT_EQ(tilde_j(0, 0.0), complex(1.0, 0.0));
}

TEST(SphericalBessel, TinyArgumentUsesLeadingPower) {
  // j_2(z) ~ z^2 / 15 for |z| far below the recurrence threshold
  const complex z(1e-120, 1e-121);
  EXPECT_REL(sph_bessel_j(2, z), z * z / 15.0, 1e-14);
}

TEST(SphericalHankel, MatchesOracleValues) {
  EXPECT_REL(sph_hankel1(0, 1.0), complex(0.841470984807896507, -0.540302305868139717), 1e-15);
  EXPECT_REL(sph_hankel1(2, 50.0), oracle::sph_h_h2_50, 1e-13);
  EXPECT_REL(sph_hankel1(1, {0, 1}), complex(oracle::sph_h_h1_i), 1e-14);
  EXPECT_REL(sph_hankel1(5, 0.01), oracle::sph_h_h5_0p01, 1e-13);
  EXPECT_REL(sph_hankel1(3, {2, 3}), oracle::sph_h_h3_2p3i, 1e-13);
  EXPECT_REL(sph_hankel1(20, {0, 0.1}), complex(oracle::sph_h_h20_0p1i), 1e-12);
  EXPECT_REL(sph_hankel1(4, {0, 30}), complex(oracle::sph_h_h4_30i), 1e-13);
}

TEST(SphericalHankel, PoleAtZeroAndNegativeOrder) {
  EXPECT_THROW(sph_hankel1(1, 0.0), DomainError);
  EXPECT_THROW(sph_hankel1(-1, 1.0), DomainError);
  EXPECT_THROW(sph_bessel_j(-2, 1.0), DomainError);
}

TEST(SphericalHankel, OverflowIsReportedWithOrderAndArgument) {
  try {
    sph_hankel1(150, 1e-3);
    FAIL() << "expected OverflowError";
  } catch (const OverflowError &e) {
    EXPECT_EQ(e.order(), 150);
    EXPECT_EQ(e.argument(), complex(1e-3, 0.0));
  }
}

TEST(RiccatiDerivatives, MatchOracleValues) {
  EXPECT_REL(tilde_j(3, {2, 3}), oracle::tilde_j_3_2p3i, 1e-13);
  EXPECT_REL(tilde_h(3, {2, 3}), oracle::tilde_h_3_2p3i, 1e-13);
  EXPECT_REL(tilde_j(1, 0.1), complex(oracle::tilde_j_1_0p1), 1e-13);
  EXPECT_REL(tilde_h(1, 0.1), oracle::tilde_h_1_0p1, 1e-13);
}

TEST(LogRatio, MatchesOracleValues) {
  EXPECT_REL(log_ratio_A(3, {2, 3}), oracle::log_ratio_A_3_2p3i, 1e-13);
  EXPECT_REL(log_ratio_A(1, {0, 100}), complex(oracle::log_ratio_A_1_100i), 1e-13);
  EXPECT_REL(log_ratio_A(10, {300, 300}), oracle::log_ratio_A_10_300p300i, 1e-13);
  EXPECT_REL(log_ratio_A(2, 0.5), complex(oracle::log_ratio_A_2_0p5), 1e-13);
}

TEST(LogRatio, StaysFiniteWhereBesselOverflows) {
  // j_1(2000 i) ~ e^2000: far outside double, yet A_1 is close to 2000
  const complex a = log_ratio_A(1, {0.0, 2000.0});
  EXPECT_TRUE(std::isfinite(a.real()) && std::isfinite(a.imag()));
  EXPECT_NEAR(a.real() / 2000.0, 1.0, 1e-3);
  EXPECT_NEAR(a.imag(), 0.0, 1e-9);
}

TEST(LogRatio, ZeroOfBesselIsAPole) {
  // j_0 vanishes at pi; A_0 = [z j_0]'/j_0 has a pole there.
  EXPECT_THROW(log_ratio_A(0, 0.0), DomainError);
  const complex near_pole = log_ratio_A(0, std::numbers::pi + 1e-12);
  EXPECT_GT(std::abs(near_pole), 1e9);
}

TEST(BesselSequence, UpwardAndDownwardBranchesAgree) {
  // |z| = lmax + 10 switches algorithms; both sides must join smoothly.
  const int lmax = 20;
  for (double a : {29.99, 30.01}) {
    const complex z(a, 0.3);
    const auto seq = bessel_j_sequence(lmax, z);
    for (int l = 0; l <= lmax; ++l) {
      const complex direct = sph_bessel_j(l, z);
      EXPECT_REL(seq[l].value(), direct, 1e-12) << "l = " << l << ", z = " << z;
    }
  }
  const complex below(29.999999, 0.3), above(30.000001, 0.3);
  const auto lo = bessel_j_sequence(lmax, below);
  const auto hi = bessel_j_sequence(lmax, above);
  for (int l = 0; l <= lmax; ++l)
    EXPECT_REL(lo[l].value(), hi[l].value(), 1e-5);
}

// j_l h_{l-1} - j_{l-1} h_l = i / z^2
TEST(BesselProperties, CrossProductIdentityOnRandomArguments) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> re(0.05, 40.0), im(-5.0, 5.0);
  std::uniform_int_distribution<int> order(1, 25);
  for (int trial = 0; trial < 300; ++trial) {
    const complex z(re(rng), im(rng));
    const int l = order(rng);
    const auto j = bessel_j_sequence(l, z);
    const auto h = hankel1_sequence(l, z);
    const complex a = (j[l] * h[l - 1]).value();
    const complex b = (j[l - 1] * h[l]).value();
    const complex expected = complex(0.0, 1.0) / (z * z);
    EXPECT_LE(std::abs(a - b - expected), 1e-11 * (std::abs(a) + std::abs(b)))
        << "l = " << l << ", z = " << z;
  }
}

TEST(BesselProperties, ConjugateSymmetry) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    const complex z(u(rng), u(rng));
    for (int l : {0, 3, 12})
      EXPECT_REL(sph_bessel_j(l, std::conj(z)), std::conj(sph_bessel_j(l, z)), 1e-12);
  }
}
