#pragma once

#include <vector>

namespace vibecheck::fixtures {

/// Kappa from pairwise counts: p_e is the share of all (i, j) pairs with
/// a[i] == b[j]. Returns 1 when p_e is 1.
long double brute_force_kappa(const std::vector<int>& a, const std::vector<int>& b);

/// Penalized logistic solve in long double by Newton steps with a
/// Gauss-Jordan linear solve. Rows of X are feature vectors, y is ±1. The
/// intercept, when used, is the last entry of the result and unpenalized.
std::vector<long double> reference_logistic(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                                            long double lambda, bool intercept);

/// Standard normal CDF by composite Simpson integration of the density.
long double simpson_normal_cdf(long double z);

}  // namespace vibecheck::fixtures
