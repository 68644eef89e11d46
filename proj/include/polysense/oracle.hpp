#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polysense/analytic.hpp"
#include "polysense/geometry.hpp"

namespace polysense::oracle {

/// Empirical CDF estimates with binomial standard errors.
struct OracleResult {
    std::vector<double> abscissas;
    std::vector<double> estimates;
    std::vector<double> standard_errors;
    long long sample_count = 0;
    std::uint64_t seed = 0;
};

/// Brute-force Pr(s <= r) by sampling poses (x, y, theta) uniformly. The
/// same samples serve every grid point, so the estimate is monotone in r.
OracleResult mc_cdf(const geom::Polygon& placed, const analytic::Arena& arena,
                    const std::vector<double>& r_grid, long long n_samples,
                    std::uint64_t seed, int threads = 0);

/// Adaptive quadrature of overlap_area over theta, split at the zeta
/// breakpoints. Independent of the closed-form g values it validates.
double quad_overlap(analytic::CaseCondition c, double phi, double l, double r,
                    double abs_tol = 1e-9);

struct McEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

/// Rejection-sampling cross-check of the overlap measure: samples the
/// parallelogram of detecting poses against the concave wedge.
McEstimate mc_measure_direct(double phi, double l, double r, long long n,
                             std::uint64_t seed = 1234);

void write_oracle_result(std::ostream& out, const OracleResult& res);
void write_oracle_result_file(const std::string& path, const OracleResult& res);

}  // namespace polysense::oracle
