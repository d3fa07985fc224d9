#pragma once

#include <span>
#include <string>
#include <vector>

#include "neb/common.hpp"

namespace neb::stats {

struct TestResult {
    double statistic = 0.0;
    double p = 1.0;
};

// Two-sided Mann-Whitney U with midrank tie handling. For n1 + n2 <= 12 the
// p-value is exact: all C(n1+n2, n1) group assignments of the pooled values
// are enumerated and p = P(|U - n1*n2/2| >= |U_obs - n1*n2/2|). Larger
// samples use the normal approximation with tie-corrected variance (no
// continuity correction). Returns U of the first sample as the statistic.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Kruskal-Wallis H with tie correction; p from the chi-squared survival
// function with k-1 degrees of freedom. All-identical observations give
// H = 0, p = 1.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

// Asterisk annotation for p-values: "" for p >= 0.05, "*" down to 0.005,
// "**" down to 0.0005, "***" at or below 0.0005.
std::string significance_stars(double p);

// Survival function of the chi-squared distribution (upper tail).
double chi2_sf(double x, int dof);
// Upper tail of the standard normal.
double normal_sf(double z);

// Midranks of the pooled vector (average rank across ties), 1-based.
std::vector<double> midranks(std::span<const double> pooled);

}  // namespace neb::stats
