// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#include "vhp/chi2.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "vhp/records.hpp"

namespace vhp {

namespace {

constexpr int kMaxIter = 10000;
const double kEps = std::numeric_limits<double>::epsilon();
const double kFpMin = std::numeric_limits<double>::min() / kEps;

// Series for P(a,x), valid and fast for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < kMaxIter; ++i) {
    ++ap;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("regularized_gamma: series did not converge");
}

// Lentz continued fraction for Q(a,x), valid for x >= a+1.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) <= kEps)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("regularized_gamma: continued fraction did not converge");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw ConfigError("regularized_gamma: requires a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw ConfigError("regularized_gamma: requires a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_squared_sf(double x, int df) {
  if (df < 1) throw ConfigError("chi_squared_sf: df must be >= 1");
  if (x < 0.0) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

Chi2Result chi_squared_gof(const std::vector<double>& observed,
                           const std::vector<double>& expected_proportions) {
  if (observed.size() != expected_proportions.size())
    throw ConfigError("chi_squared_gof: category count mismatch");
  if (observed.empty()) throw ConfigError("chi_squared_gof: no categories");

  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  if (total <= 0.0) throw ConfigError("chi_squared_gof: observed total must be positive");
  const double prop_sum =
      std::accumulate(expected_proportions.begin(), expected_proportions.end(), 0.0);
  if (std::fabs(prop_sum - 1.0) > 1e-9)
    throw ConfigError("chi_squared_gof: expected proportions must sum to 1");

  Chi2Result r;
  int retained = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected_proportions[i] == 0.0) {
      if (observed[i] > 0.0)
        throw ConfigError("chi_squared_gof: category " + std::to_string(i) +
                          " has zero expected proportion but nonzero observed count");
      continue;  // dropped from both
    }
    const double expected = expected_proportions[i] * total;
    const double diff = observed[i] - expected;
    r.statistic += diff * diff / expected;
    ++retained;
  }
  if (retained < 2) throw ConfigError("chi_squared_gof: fewer than two retained categories");
  r.df = retained - 1;
  r.p_value = chi_squared_sf(r.statistic, r.df);
  return r;
}

}  // namespace vhp
