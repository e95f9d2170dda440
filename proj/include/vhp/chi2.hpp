// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace vhp {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x),
// series expansion for x < a+1 and continued fraction otherwise. Relative
// error well below 1e-10 over the ranges used here.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Upper-tail probability of the chi-squared distribution: Q(df/2, x/2).
double chi_squared_sf(double x, int df);

struct Chi2Result {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// Goodness-of-fit test of `observed` counts against expected category
// proportions. Categories with zero expected proportion and zero observed
// count are dropped (df shrinks accordingly); zero expected with nonzero
// observed is an error.
Chi2Result chi_squared_gof(const std::vector<double>& observed,
                           const std::vector<double>& expected_proportions);

}  // namespace vhp
