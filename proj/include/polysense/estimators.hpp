#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polysense/simulator.hpp"

namespace polysense::est {

enum class Method { convex_mle, nonconvex_moment, auto_select };

std::string method_name(Method m);

struct ConvexEstimate {
    double perimeter_hat = 0.0;
    double area_hat = 0.0;
};

struct NonconvexEstimate {
    double perimeter_hat = 0.0;
    double area_hat = 0.0;
    double g1sum_hat = 0.0;
};

struct ConvexityResult {
    bool non_convex = false;
    std::vector<double> ratios;        // ratios that produced a usable sigma
    std::vector<double> e_over_sigma;  // aligned with `ratios`
};

struct EstimateReport {
    double area_hat = 0.0;
    double perimeter_hat = 0.0;
    std::optional<double> g1sum_hat;
    bool convex = true;
    std::vector<double> ratios;
    std::vector<double> e_over_sigma;
    Method method = Method::auto_select;
};

/// Maximum-likelihood estimators for a convex target:
/// L = pi N_+ |Omega| / (n_s r_max), A = N_0 |Omega| / n_s.
ConvexEstimate estimate_convex(const sim::ReportSet& rs, const analytic::Arena& arena);

/// Moment estimators from two small abscissas s1 < s2 (both should lie below
/// the first concave interval; not checkable from data).
NonconvexEstimate estimate_nonconvex(const sim::ReportSet& rs, const analytic::Arena& arena,
                                     double s1, double s2);

/// Same algebra fed with exact probabilities p0 = Pr(s=0), pj = Pr(s<=sj);
/// an exact identity when the probabilities come from the analytic CDF.
NonconvexEstimate nonconvex_from_probs(double p0, double p1, double p2, double s1, double s2,
                                       double omega_area);

/// One-sided test of the convex linear CDF prediction at r = ratio * r_max.
/// Verdict is non-convex when max e(r)/sigma(r) exceeds the threshold.
/// Ratios with degenerate counts (sigma = 0) are excluded; all excluded is
/// an error.
ConvexityResult convexity_test(const sim::ReportSet& rs, const analytic::Arena& arena,
                               const std::vector<double>& ratios = {0.3, 0.5, 0.7},
                               double threshold = 2.0);

struct AutoOptions {
    std::vector<double> ratios = {0.3, 0.5, 0.7};
    double threshold = 2.0;
    double s1 = 1.0;
    std::optional<double> s2;   // fixed s2; otherwise pilot perimeter / 10
    long long pilot_count = 0;  // readings used for the pilot estimate; 0 = all
};

/// Convexity test, then the matching estimator; non-convex targets get
/// s2 = pilot perimeter / 10 unless fixed.
EstimateReport estimate_auto(const sim::ReportSet& rs, const analytic::Arena& arena,
                             const AutoOptions& opts = {});

void write_estimate_report(std::ostream& out, const EstimateReport& report);
void write_estimate_report_file(const std::string& path, const EstimateReport& report);

}  // namespace polysense::est
