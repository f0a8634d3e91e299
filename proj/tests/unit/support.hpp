#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <gtest/gtest.h>

namespace testing_support {

inline double rel_diff(std::complex<double> a, std::complex<double> b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline ::testing::AssertionResult near_rel(std::complex<double> actual,
                                           std::complex<double> expected, double tol) {
  const double d = rel_diff(actual, expected);
  if (d <= tol)
    return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure()
         << "actual " << actual << " vs expected " << expected << ": relative difference "
         << d << " > " << tol;
}

} // namespace testing_support

#define EXPECT_REL(actual, expected, tol)                                                \
  EXPECT_TRUE(::testing_support::near_rel((actual), (expected), (tol)))
