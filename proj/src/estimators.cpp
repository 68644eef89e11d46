#include "polysense/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "polysense/csv.hpp"
#include "polysense/errors.hpp"

namespace polysense::est {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::convex_mle: return "convex-mle";
        case Method::nonconvex_moment: return "nonconvex-moment";
        case Method::auto_select: return "auto";
    }
    return "unknown";
}

ConvexEstimate estimate_convex(const sim::ReportSet& rs, const analytic::Arena& arena) {
    if (rs.n_s() <= 0) throw std::invalid_argument("estimate_convex: empty report set");
    double ns = static_cast<double>(rs.n_s());
    double omega = arena.area();
    return {kPi * static_cast<double>(rs.n_plus()) * omega / (ns * arena.r_max),
            static_cast<double>(rs.n_zero()) * omega / ns};
}

NonconvexEstimate nonconvex_from_probs(double p0, double p1, double p2, double s1, double s2,
                                       double omega_area) {
    if (s1 == s2) throw std::invalid_argument("nonconvex estimator: s1 == s2");
    if (s1 > s2) {
        std::swap(s1, s2);
        std::swap(p1, p2);
    }
    double area_hat = p0 * omega_area;
    double peri_hat = kPi * omega_area *
                      ((s1 * s1 - s2 * s2) * p0 + (p1 * s2 * s2 - p2 * s1 * s1)) /
                      (s1 * s2 * (s2 - s1));
    double g1sum = 0.0;
    for (auto [sj, pj] : {std::pair{s1, p1}, std::pair{s2, p2}})
        g1sum += 4.0 * (kPi * omega_area * pj - peri_hat * sj - kPi * area_hat) / (sj * sj);
    return {peri_hat, area_hat, g1sum};
}

NonconvexEstimate estimate_nonconvex(const sim::ReportSet& rs, const analytic::Arena& arena,
                                     double s1, double s2) {
    if (rs.n_s() <= 0) throw std::invalid_argument("estimate_nonconvex: empty report set");
    if (!(s1 > 0.0 && s2 > 0.0 && s1 <= arena.r_max && s2 <= arena.r_max))
        throw std::invalid_argument("estimate_nonconvex: s1, s2 outside (0, r_max]");
    double ns = static_cast<double>(rs.n_s());
    return nonconvex_from_probs(static_cast<double>(rs.n_zero()) / ns,
                                static_cast<double>(rs.counts_at(s1)) / ns,
                                static_cast<double>(rs.counts_at(s2)) / ns, s1, s2, arena.area());
}

ConvexityResult convexity_test(const sim::ReportSet& rs, const analytic::Arena& arena,
                               const std::vector<double>& ratios, double threshold) {
    if (rs.n_s() <= 0) throw std::invalid_argument("convexity_test: empty report set");
    for (double rho : ratios)
        if (!(rho > 0.0 && rho < 1.0))
            throw std::invalid_argument("convexity_test: ratios must lie in (0, 1)");

    const double ns = static_cast<double>(rs.n_s());
    const double n0 = static_cast<double>(rs.n_zero());
    const double nplus = static_cast<double>(rs.n_plus());

    ConvexityResult out;
    for (double rho : ratios) {
        double r = rho * arena.r_max;
        double nr = static_cast<double>(rs.counts_at(r));
        double e = (nr - rho * nplus - n0) / ns;

        // N_0, N(r)-N_0, N(>r), N_miss are multinomial; plug-in variances.
        double n_above = nplus - nr + n0;  // N(>r)
        double n_band = nr - n0;           // N(r) - N_0
        double var_above = n_above * (ns - n_above) / ns;
        double var_band = n_band * (ns - n_band) / ns;
        double cov = -n_above * n_band / ns;
        double sigma2 =
            (rho * rho * var_above + (1.0 - rho) * (1.0 - rho) * var_band -
             2.0 * (1.0 - rho) * rho * cov) /
            (ns * ns);
        if (sigma2 <= 0.0) continue;  // degenerate counts: ratio excluded
        out.ratios.push_back(rho);
        out.e_over_sigma.push_back(e / std::sqrt(sigma2));
    }
    if (out.ratios.empty())
        throw infeasible_error("convexity_test: all test radii have degenerate counts");
    double worst = *std::max_element(out.e_over_sigma.begin(), out.e_over_sigma.end());
    out.non_convex = worst > threshold;
    return out;
}

EstimateReport estimate_auto(const sim::ReportSet& rs, const analytic::Arena& arena,
                             const AutoOptions& opts) {
    ConvexityResult verdict = convexity_test(rs, arena, opts.ratios, opts.threshold);

    EstimateReport report;
    report.ratios = verdict.ratios;
    report.e_over_sigma = verdict.e_over_sigma;
    report.convex = !verdict.non_convex;

    if (report.convex) {
        auto ce = estimate_convex(rs, arena);
        report.area_hat = ce.area_hat;
        report.perimeter_hat = ce.perimeter_hat;
        report.method = Method::convex_mle;
        return report;
    }

    double s2;
    if (opts.s2) {
        s2 = *opts.s2;
    } else {
        const sim::ReportSet* pilot = &rs;
        sim::ReportSet pilot_head({}, arena.r_max);
        if (opts.pilot_count > 0 && opts.pilot_count < rs.n_s()) {
            pilot_head = rs.prefix(opts.pilot_count);
            pilot = &pilot_head;
        }
        s2 = estimate_convex(*pilot, arena).perimeter_hat / 10.0;
    }
    // Degenerate pilots can push s2 below s1 or past the range; keep the
    // abscissas usable.
    if (s2 <= opts.s1) s2 = std::min(2.0 * opts.s1, arena.r_max);
    s2 = std::min(s2, arena.r_max);

    auto ne = estimate_nonconvex(rs, arena, opts.s1, s2);
    report.area_hat = ne.area_hat;
    report.perimeter_hat = ne.perimeter_hat;
    report.g1sum_hat = ne.g1sum_hat;
    report.method = Method::nonconvex_moment;
    return report;
}

void write_estimate_report(std::ostream& out, const EstimateReport& report) {
    out << "area_hat," << csv::fmt(report.area_hat) << '\n';
    out << "perimeter_hat," << csv::fmt(report.perimeter_hat) << '\n';
    out << "g1sum_hat,";
    if (report.g1sum_hat) out << csv::fmt(*report.g1sum_hat);
    out << '\n';
    out << "convex," << (report.convex ? "true" : "false") << '\n';
    for (std::size_t i = 0; i < report.ratios.size(); ++i) {
        char key[32];
        std::snprintf(key, sizeof(key), "e_sigma_%03d", static_cast<int>(std::lround(report.ratios[i] * 100.0)));
        out << key << ',' << csv::fmt(report.e_over_sigma[i]) << '\n';
    }
    out << "method," << method_name(report.method) << '\n';
}

void write_estimate_report_file(const std::string& path, const EstimateReport& report) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open file for writing: " + path);
    write_estimate_report(out, report);
}

}  // namespace polysense::est
