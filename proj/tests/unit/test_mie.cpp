#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "cpsphere/constants.hpp"
#include "cpsphere/mie.hpp"
#include "frozen_oracles.hpp"
#include "support.hpp"

using namespace cpsphere;
using namespace cpsphere::mie;
using materials::Permittivity;
using complex = std::complex<double>;

namespace {

Permittivity gold_at_x01() {
  const auto model = materials::PermittivityModel::drude(
      constants::ev_to_angular_frequency(9.0), constants::ev_to_angular_frequency(0.035));
  return materials::permittivity(model, 0.1 * constants::speed_of_light / 20e-6);
}

} // namespace

TEST(MieExact, GoldMatchesOracle) {
  const auto eps = gold_at_x01();
  EXPECT_REL(refl_exact({1, 0.05, eps}, Polarization::TE), oracle::mie_te_gold_l1_z0p05, 1e-11);
  EXPECT_REL(refl_exact({1, 0.05, eps}, Polarization::TM), oracle::mie_tm_gold_l1_z0p05, 1e-11);
  EXPECT_REL(refl_exact({2, 0.05, eps}, Polarization::TE), oracle::mie_te_gold_l2_z0p05, 1e-11);
  EXPECT_REL(refl_exact({2, 0.05, eps}, Polarization::TM), oracle::mie_tm_gold_l2_z0p05, 1e-11);
  EXPECT_REL(refl_exact({5, 0.05, eps}, Polarization::TE), oracle::mie_te_gold_l5_z0p05, 1e-11);
  EXPECT_REL(refl_exact({5, 0.05, eps}, Polarization::TM), oracle::mie_tm_gold_l5_z0p05, 1e-11);
}

TEST(MieExact, DielectricMatchesOracle) {
  const auto eps = Permittivity::finite(6.0);
  EXPECT_REL(refl_exact({1, 0.5, eps}, Polarization::TE), oracle::mie_te_eps6_l1_z0p5, 1e-12);
  EXPECT_REL(refl_exact({1, 0.5, eps}, Polarization::TM), oracle::mie_tm_eps6_l1_z0p5, 1e-12);
  EXPECT_REL(refl_exact({3, 0.5, eps}, Polarization::TE), oracle::mie_te_eps6_l3_z0p5, 1e-12);
  EXPECT_REL(refl_exact({3, 0.5, eps}, Polarization::TM), oracle::mie_tm_eps6_l3_z0p5, 1e-12);
  EXPECT_REL(refl_exact({1, 2.0, eps}, Polarization::TE), oracle::mie_te_eps6_l1_z2p0, 1e-12);
  EXPECT_REL(refl_exact({1, 2.0, eps}, Polarization::TM), oracle::mie_tm_eps6_l1_z2p0, 1e-12);
  EXPECT_REL(refl_exact({3, 2.0, eps}, Polarization::TE), oracle::mie_te_eps6_l3_z2p0, 1e-12);
  EXPECT_REL(refl_exact({3, 2.0, eps}, Polarization::TM), oracle::mie_tm_eps6_l3_z2p0, 1e-12);
  EXPECT_REL(refl_exact({2, complex(0, 1), eps}, Polarization::TM),
             complex(oracle::mie_tm_eps6_l2_z1i), 1e-12);
}

TEST(MiePerfectConductor, MatchesOracle) {
  EXPECT_REL(refl_pc(1, 0.05, Polarization::TE), oracle::mie_te_pc_l1_z0p05, 1e-13);
  EXPECT_REL(refl_pc(1, 0.05, Polarization::TM), oracle::mie_tm_pc_l1_z0p05, 1e-13);
  EXPECT_REL(refl_pc(3, 2.0, Polarization::TE), oracle::mie_te_pc_l3_z2, 1e-13);
  EXPECT_REL(refl_pc(3, 2.0, Polarization::TM), oracle::mie_tm_pc_l3_z2, 1e-13);
}

TEST(MieExact, VacuumSphereDoesNotScatter) {
  const auto seq = coefficient_sequence(10, complex(0.7, 0.0), Permittivity::finite(1.0));
  for (int l = 1; l <= 10; ++l) {
    EXPECT_TRUE(seq.te[l].is_zero());
    EXPECT_TRUE(seq.tm[l].is_zero());
  }
}

TEST(MieExact, OrderAndArgumentChecks) {
  const auto eps = Permittivity::finite(6.0);
  EXPECT_THROW(refl_exact({0, 0.5, eps}, Polarization::TE), DomainError);
  EXPECT_THROW(refl_exact({201, 0.5, eps}, Polarization::TE), UnsupportedOrderError);
  EXPECT_THROW(refl_exact({1, 0.0, eps}, Polarization::TE), DomainError);
  EXPECT_THROW(refl_exact({1, 0.5, Permittivity::infinite()}, Polarization::TE), DomainError);
  EXPECT_NO_THROW(refl_exact({200, 0.5, eps}, Polarization::TM));
}

TEST(MieNonRetarded, ApproachesExactAtSmallArgument) {
  const auto eps = Permittivity::finite(6.0);
  for (int l : {1, 2, 4}) {
    const double z = 1e-3;
    EXPECT_REL(refl_nonret(l, z, eps, Polarization::TM), refl_exact({l, z, eps}, Polarization::TM),
               1e-5);
    EXPECT_REL(refl_nonret(l, z, eps, Polarization::TE), refl_exact({l, z, eps}, Polarization::TE),
               1e-5);
  }
}

TEST(MieNonRetarded, PerfectConductorTmAndRegimeChecks) {
  EXPECT_REL(refl_nonret(2, 1e-3, Permittivity::infinite(), Polarization::TM),
             refl_pc(2, 1e-3, Polarization::TM), 1e-5);
  EXPECT_THROW(refl_nonret(1, 0.1, Permittivity::infinite(), Polarization::TE), DomainError);
  EXPECT_THROW(refl_nonret(1, 0.3, Permittivity::finite(6.0), Polarization::TM), RegimeError);
}

TEST(MieRetardedCorrection, CapturesOrderZSquared) {
  // The leading-order form misses O(z^2); the corrected one leaves O(z^4).
  // Only the imaginary part: the real part is O(|r|^2), radiation reaction.
  for (int l : {1, 2, 3}) {
    const double z = 0.05;
    const double exact = refl_pc(l, z, Polarization::TM).imag();
    const double err_plain = std::abs(
        refl_nonret(l, z, Permittivity::infinite(), Polarization::TM).imag() / exact - 1.0);
    const double err_corr = std::abs(refl_tm_pc_retarded(l, z).imag() / exact - 1.0);
    EXPECT_LT(err_corr, 1e-5) << l;
    EXPECT_LT(err_corr, err_plain * 1e-2) << l;
  }
}

TEST(MiePerturbative, FirstOrderInverseRootForGold) {
  const auto eps = gold_at_x01();
  for (int l : {1, 2}) {
    const double z = 0.05;
    for (auto pol : {Polarization::TE, Polarization::TM}) {
      const complex exact = refl_exact({l, z, eps}, pol);
      const complex pert = refl_perturbative(l, z, eps, pol);
      const double err = testing_support::rel_diff(pert, exact);
      EXPECT_LT(err, 5e-3) << "l = " << l;
    }
  }
  EXPECT_THROW(refl_perturbative(1, 0.05, Permittivity::finite(6.0), Polarization::TM),
               RegimeError);
}

TEST(MieExact, SmallSphereSurfaceResonance) {
  // At eps = -(l+1)/l the non-retarded TM denominator vanishes; the exact
  // coefficient is then O(z) instead of O(z^3).
  const auto eps = Permittivity::finite(complex(-2.0, 0.0));
  const complex r = refl_exact({1, 1e-4, eps}, Polarization::TM);
  EXPECT_GT(std::abs(r), 1e-6); // resonantly enhanced relative to ~z^3
}
