#include "polysense/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "polysense/csv.hpp"
#include "polysense/errors.hpp"
#include "polysense/parallel.hpp"
#include "polysense/rng.hpp"

namespace polysense::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

double adaptive_simpson(const auto& f, double a, double b, double fa, double fm, double fb,
                        double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0) throw std::runtime_error("quad_overlap: quadrature did not converge");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double integrate(const auto& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 48);
}

}  // namespace

OracleResult mc_cdf(const geom::Polygon& placed, const analytic::Arena& arena,
                    const std::vector<double>& r_grid, long long n_samples,
                    std::uint64_t seed, int threads) {
    if (n_samples < 10000) throw std::invalid_argument("mc_cdf: n_samples must be >= 1e4");
    if (!std::is_sorted(r_grid.begin(), r_grid.end()))
        throw std::invalid_argument("mc_cdf: r_grid must be ascending");

    const std::size_t g = r_grid.size();
    const std::size_t n = static_cast<std::size_t>(n_samples);
    int lanes = par::resolve_threads(threads);
    // bucket[k]: samples whose reading falls between grid point k-1 and k;
    // bucket[g] collects misses and beyond-grid hits.
    std::vector<std::vector<long long>> lane_buckets(lanes, std::vector<long long>(g + 1, 0));
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    std::size_t chunk = (n + lanes - 1) / lanes;
    for (int t = 0; t < lanes; ++t) {
        std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo < hi) ranges.push_back({lo, hi});
    }

    par::run_tasks(ranges.size(), [&](std::size_t t) {
        auto& bucket = lane_buckets[t];
        for (std::size_t i = ranges[t].first; i < ranges[t].second; ++i) {
            double x = rng::counter_uniform(seed, 0, i, 0) * arena.width;
            double y = rng::counter_uniform(seed, 0, i, 1) * arena.height;
            double th = rng::counter_uniform(seed, 0, i, 2) * 2.0 * kPi;
            auto m = geom::ray_cast(placed, {x, y}, th, arena.r_max);
            if (m.outcome == geom::Measurement::Outcome::miss) {
                ++bucket[g];
                continue;
            }
            double d = m.outcome == geom::Measurement::Outcome::inside ? 0.0 : m.distance;
            auto it = std::lower_bound(r_grid.begin(), r_grid.end(), d);
            ++bucket[it - r_grid.begin()];
        }
    });

    std::vector<long long> bucket(g + 1, 0);
    for (const auto& lb : lane_buckets)
        for (std::size_t k = 0; k <= g; ++k) bucket[k] += lb[k];

    OracleResult res;
    res.abscissas = r_grid;
    res.sample_count = n_samples;
    res.seed = seed;
    long long cum = 0;
    for (std::size_t k = 0; k < g; ++k) {
        cum += bucket[k];
        double p = static_cast<double>(cum) / static_cast<double>(n_samples);
        res.estimates.push_back(p);
        res.standard_errors.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples)));
    }
    return res;
}

double quad_overlap(analytic::CaseCondition c, double phi, double l, double r, double abs_tol) {
    if (c == analytic::CaseCondition::not_concave)
        throw std::invalid_argument("quad_overlap: needs a concave case");
    double upper = phi - kPi;
    std::vector<double> cuts{0.0, upper};
    if (c == analytic::CaseCondition::c3 || c == analytic::CaseCondition::c4) {
        auto gz = analytic::gamma_zeta(phi, l, r);
        for (double z : {std::max(gz.zeta2, 0.0), gz.zeta1})
            if (z > 0.0 && z < upper) cuts.push_back(z);
    }
    std::sort(cuts.begin(), cuts.end());
    auto f = [&](double theta) { return analytic::overlap_area(c, phi, l, r, theta); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += integrate(f, cuts[i], cuts[i + 1], abs_tol / static_cast<double>(cuts.size()));
    return total;
}

McEstimate mc_measure_direct(double phi, double l, double r, long long n, std::uint64_t seed) {
    if (!(phi > kPi && phi < 2.0 * kPi)) throw std::domain_error("mc_measure_direct: phi range");
    // Canonical frame: concave vertex at the origin, detected edge along
    // [0, l] on the x axis, adjacent edge leaving at direction phi. Poses
    // below the edge that land inside the wedge are the overlap.
    const double span = phi - kPi;
    const double dx = std::cos(phi), dy = std::sin(phi);
    double sum = 0.0, sumsq = 0.0;
    for (long long i = 0; i < n; ++i) {
        double theta = rng::counter_uniform(seed, 1, static_cast<std::uint64_t>(i), 0) * span;
        double t = rng::counter_uniform(seed, 1, static_cast<std::uint64_t>(i), 1);
        double s = rng::counter_uniform(seed, 1, static_cast<std::uint64_t>(i), 2) * r;
        double px = t * l - s * std::cos(theta);
        double py = -s * std::sin(theta);
        double val = 0.0;
        if (px * dy - py * dx > 0.0) val = span * l * r * std::sin(theta);
        sum += val;
        sumsq += val * val;
    }
    double mean = sum / static_cast<double>(n);
    double var = std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

void write_oracle_result(std::ostream& out, const OracleResult& res) {
    out << "r,p_hat,stderr\n";
    for (std::size_t i = 0; i < res.abscissas.size(); ++i)
        out << csv::fmt(res.abscissas[i]) << ',' << csv::fmt(res.estimates[i]) << ','
            << csv::fmt(res.standard_errors[i]) << '\n';
}

void write_oracle_result_file(const std::string& path, const OracleResult& res) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open file for writing: " + path);
    write_oracle_result(out, res);
}

}  // namespace polysense::oracle
