#include "polysense/concave.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "polysense/csv.hpp"
#include "polysense/errors.hpp"

namespace polysense::concave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cot(double t) { return std::cos(t) / std::sin(t); }

bool in_g_domain(double phi, double l, double r) {
    if (!(phi > kPi && phi < kTwoPi) || !(l >= 0.0) || !(r > 0.0)) return false;
    return r >= l * analytic::anglesin(phi) * (1.0 - 1e-12);
}

/// Contribution a recovered pair adds back to the residual curve at r.
double peel_term(double phi, double l, double r) {
    switch (analytic::case_of(phi, l, r)) {
        case analytic::CaseCondition::c3:
            return analytic::g3(phi, l, r) - analytic::g12(phi, r);
        case analytic::CaseCondition::c4:
            return analytic::g4(phi, l, r) - analytic::g12(phi, r);
        default:
            return 0.0;
    }
}

}  // namespace

double q_hat(const sim::ReportSet& rs, const analytic::Arena& arena, double area_hat,
             double perimeter_hat, double g1sum_hat, double r) {
    double ns = static_cast<double>(rs.n_s());
    double p = static_cast<double>(rs.counts_at(r)) / ns;
    return kTwoPi * arena.area() * p - 2.0 * perimeter_hat * r - kTwoPi * area_hat -
           2.0 * r * r * g1sum_hat / 8.0;
}

QCurve q_hat_curve(const sim::ReportSet& rs, const analytic::Arena& arena, double area_hat,
                   double perimeter_hat, double g1sum_hat, const std::vector<double>& r_grid) {
    QCurve curve;
    curve.abscissas = r_grid;
    curve.values.reserve(r_grid.size());
    for (double r : r_grid)
        curve.values.push_back(q_hat(rs, arena, area_hat, perimeter_hat, g1sum_hat, r));
    return curve;
}

double q_analytic(const geom::Polygon& poly, const analytic::Arena& arena, double r) {
    if (r == 0.0) return 0.0;
    double pr = analytic::analytic_cdf(poly, arena, r);
    double g12sum = 0.0;
    const auto& angles = poly.interior_angles();
    for (double phi : angles)
        if (phi > kPi) g12sum += analytic::g12(phi, r);
    return kTwoPi * arena.area() * pr - 2.0 * poly.perimeter() * r - kTwoPi * poly.area() +
           2.0 * g12sum;
}

QCurve q_analytic_curve(const geom::Polygon& poly, const analytic::Arena& arena,
                        const std::vector<double>& r_grid) {
    QCurve curve;
    curve.abscissas = r_grid;
    curve.values.reserve(r_grid.size());
    for (double r : r_grid) curve.values.push_back(q_analytic(poly, arena, r));
    return curve;
}

std::vector<double> q_hat_noise_band(const sim::ReportSet& rs, const analytic::Arena& arena,
                                     const std::vector<double>& r_grid) {
    double ns = static_cast<double>(rs.n_s());
    std::vector<double> band;
    band.reserve(r_grid.size());
    for (double r : r_grid) {
        double p = static_cast<double>(rs.counts_at(r)) / ns;
        double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / ns) / ns);
        band.push_back(3.0 * kTwoPi * arena.area() * se);
    }
    return band;
}

IntervalDetection detect_interval(const QCurve& curve, double noise_band, double gap_hi) {
    if (curve.abscissas.size() < 4)
        throw std::invalid_argument("detect_interval: grid too coarse");
    IntervalDetection det;
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        if (std::abs(curve.values[i]) > noise_band) {
            det.found = true;
            det.change_index = i;
            det.change_r = curve.abscissas[i];
            break;
        }
    }
    if (!det.found) return det;
    double hi = gap_hi > det.change_r ? gap_hi : curve.abscissas.back();
    det.s_lo = det.change_r + 0.10 * (hi - det.change_r);
    det.s_hi = det.change_r + 0.40 * (hi - det.change_r);
    return det;
}

double phi_big(double phi, double l, double r) {
    if (!in_g_domain(phi, l, r)) throw std::domain_error("phi_big: (phi, l, r) outside G1 u G2");
    if (l == 0.0) return r * r / 4.0 - r * r * (phi - kPi) * cot(phi) / 4.0;
    double s = std::sin(phi);
    double zeta1 = analytic::gamma_zeta(phi, l, r).zeta1;
    double root = std::sqrt(std::max(0.0, r * r - l * l * s * s));
    return -l * r + r * r / 4.0 - 0.75 * l * root * std::cos(phi) + 0.75 * l * l * s * s -
           r * r * zeta1 * cot(phi) / 4.0 - 0.5 * l * l * zeta1 * s * std::cos(phi) +
           0.5 * std::log(r / l) * l * l * s * s;
}

double psi(double phi, double l, double r) {
    if (l == 0.0) return 0.0;
    if (!in_g_domain(phi, l, r)) throw std::domain_error("psi: (phi, l, r) outside G1 u G2");
    auto gz = analytic::gamma_zeta(phi, l, r);
    double s = std::sin(phi);
    double root = std::sqrt(std::max(0.0, 1.0 - gz.gamma * gz.gamma));
    return l * r * (1.0 + 0.75 * root * std::cos(phi)) - 0.75 * l * l * s * s -
           r * r * std::asin(gz.gamma) * cot(phi) / 4.0 +
           0.5 * l * l * gz.zeta1 * s * std::cos(phi) - 0.5 * l * l * s * s * std::log(r / l);
}

double psi_prime(double phi, double l, double r) {
    if (l == 0.0) return r * (1.0 + std::cos(phi));
    if (!in_g_domain(phi, l, r)) throw std::domain_error("psi_prime: outside G1 u G2");
    double s = std::sin(phi);
    double zeta1 = analytic::gamma_zeta(phi, l, r).zeta1;
    double root = std::sqrt(std::max(0.0, r * r - l * l * s * s));
    return r + root * std::cos(phi) - l * (1.0 + std::log(r / l)) * s * s +
           l * zeta1 * s * std::cos(phi);
}

namespace {

struct NewtonResult {
    bool ok = false;
    double phi = 0.0, l = 0.0, residual = 0.0;
};

double feasible_l_max(double phi, double s3) { return s3 / analytic::anglesin(phi); }

std::array<double, 2> system_f(double phi, double l, double s3, double s4, double q3, double q4) {
    return {phi_big(phi, l, s3) - q3, phi_big(phi, l, s4) - q4};
}

double sumsq(const std::array<double, 2>& f) { return f[0] * f[0] + f[1] * f[1]; }

NewtonResult newton_refine(double phi, double l, double s3, double s4, double q3, double q4,
                           const SolveOptions& opts) {
    NewtonResult res;
    // Every evaluation is projected into the feasible region so the finite
    // difference stencil never leaves the Phi domain.
    auto project = [&](double& p, double& ll) {
        p = std::clamp(p, kPi + 1e-9, kTwoPi - 1e-9);
        ll = std::clamp(ll, 1e-12, feasible_l_max(p, s3) * (1.0 - 1e-12));
    };
    auto eval = [&](double p, double ll) {
        project(p, ll);
        return system_f(p, ll, s3, s4, q3, q4);
    };
    project(phi, l);
    auto f = system_f(phi, l, s3, s4, q3, q4);
    // Iterate to the best reachable residual, not just the tolerance: the
    // parameter error of a nearly-degenerate system is what the peeling
    // stages inherit.
    for (int it = 0; it < opts.newton_iters; ++it) {
        double hp = 1e-7 * (1.0 + std::abs(phi));
        double hl = 1e-7 * (1.0 + l);
        auto f_pp = eval(phi + hp, l);
        auto f_pm = eval(phi - hp, l);
        auto f_lp = eval(phi, l + hl);
        auto f_lm = eval(phi, l - hl);
        double j00 = (f_pp[0] - f_pm[0]) / (2.0 * hp), j01 = (f_lp[0] - f_lm[0]) / (2.0 * hl);
        double j10 = (f_pp[1] - f_pm[1]) / (2.0 * hp), j11 = (f_lp[1] - f_lm[1]) / (2.0 * hl);
        double det = j00 * j11 - j01 * j10;
        if (!std::isfinite(det) || std::abs(det) < 1e-300) break;
        double dphi = -(f[0] * j11 - f[1] * j01) / det;
        double dl = -(j00 * f[1] - j10 * f[0]) / det;
        double lambda = 1.0;
        bool advanced = false;
        double base = sumsq(f);
        for (int half = 0; half < 14; ++half) {
            double np = phi + lambda * dphi, nl = l + lambda * dl;
            project(np, nl);
            auto nf = system_f(np, nl, s3, s4, q3, q4);
            if (sumsq(nf) < base) {
                phi = np;
                l = nl;
                f = nf;
                advanced = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!advanced) break;
    }
    double err = std::max(std::abs(f[0]), std::abs(f[1]));
    if (err <= opts.residual_tol) {
        res.ok = true;
        res.phi = phi;
        res.l = l;
        res.residual = err;
    }
    return res;
}

}  // namespace

PairSolve solve_phi_l(double q3, double q4, double s3, double s4, const SolveOptions& opts) {
    if (s3 == s4) throw std::invalid_argument("solve_phi_l: s3 == s4");
    if (s3 > s4) {
        std::swap(s3, s4);
        std::swap(q3, q4);
    }
    for (int grid_n : {opts.grid_n, opts.fine_grid_n}) {
        // Best scan cell per phi block, used as multistart seeds.
        constexpr int kBlocks = 8;
        std::array<double, kBlocks> best_r2;
        std::array<std::pair<double, double>, kBlocks> best_pt;
        best_r2.fill(std::numeric_limits<double>::infinity());
        for (int i = 0; i < grid_n; ++i) {
            double phi = kPi + (i + 0.5) * kPi / grid_n;
            double lmax = feasible_l_max(phi, s3);
            int block = i * kBlocks / grid_n;
            for (int j = 0; j < grid_n; ++j) {
                double l = (j + 0.5) * lmax / grid_n;
                double r2 = sumsq(system_f(phi, l, s3, s4, q3, q4));
                if (r2 < best_r2[block]) {
                    best_r2[block] = r2;
                    best_pt[block] = {phi, l};
                }
            }
        }
        std::array<int, kBlocks> order;
        for (int b = 0; b < kBlocks; ++b) order[b] = b;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return best_r2[a] < best_r2[b]; });
        for (int b : order) {
            if (!std::isfinite(best_r2[b])) continue;
            auto res = newton_refine(best_pt[b].first, best_pt[b].second, s3, s4, q3, q4, opts);
            if (res.ok) return {res.phi, res.l, res.residual};
        }
    }
    throw infeasible_error("solve_phi_l: no feasible root (noise too large?)");
}

double solve_l(double q4_value, double phi, double r, double residual_tol) {
    if (!(phi > kPi && phi < kTwoPi)) throw std::domain_error("solve_l: phi outside (pi, 2pi)");
    if (!(r > 0.0)) throw std::invalid_argument("solve_l: r must be positive");
    double lmax = r / analytic::anglesin(phi);
    double top = psi(phi, lmax * (1.0 - 1e-12), r);
    double slack = 1e-9 * std::max(1.0, std::abs(top));
    if (q4_value < -slack || q4_value > top + slack)
        throw infeasible_error("solve_l: q outside the range of Psi on the feasible interval");
    double q = std::clamp(q4_value, 0.0, top);
    double lo = 0.0, hi = lmax * (1.0 - 1e-12);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (psi(phi, mid, r) < q) lo = mid;
        else hi = mid;
        if (hi - lo <= 1e-15 * lmax) break;
    }
    double l = 0.5 * (lo + hi);
    if (std::abs(psi(phi, l, r) - q) > std::max(residual_tol, 1e-12 * std::abs(q)) &&
        std::abs(psi(phi, l, r) - q) > residual_tol * std::max(1.0, std::abs(q)))
        throw infeasible_error("solve_l: bisection did not meet the residual tolerance");
    return l;
}

namespace {

struct BandView {
    const std::vector<double>* vec = nullptr;
    double scalar = 0.0;
    double at(std::size_t i) const { return vec ? (*vec)[i] : scalar; }
};

std::size_t first_band_exit(const std::vector<double>& values, const BandView& band,
                            double scale, std::size_t from = 0) {
    for (std::size_t i = from; i < values.size(); ++i)
        if (std::abs(values[i]) > band.at(i) * scale) return i;
    return values.size();
}

/// Joint Gauss-Newton fit of every recovered pair against the original
/// curve. The stage solves use two points each; refitting on the full grid
/// removes the conditioning error the peeling stages accumulate.
void global_refine(std::vector<RecoveredPair>& pairs, const std::vector<double>& r,
                   const std::vector<double>& v0) {
    if (pairs.empty()) return;
    const std::size_t n = r.size();
    const std::size_t k = pairs.size();

    std::vector<double> theta(2 * k);
    for (std::size_t p = 0; p < k; ++p) {
        theta[2 * p] = pairs[p].phi_hat;
        theta[2 * p + 1] = pairs[p].l_hat;
    }
    auto residual = [&](const std::vector<double>& th, std::vector<double>& out) {
        out.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double acc = v0[j];
            for (std::size_t p = 0; p < k; ++p) acc += peel_term(th[2 * p], th[2 * p + 1], r[j]);
            out[j] = acc;
        }
    };
    auto norm2 = [](const std::vector<double>& e) {
        double s = 0.0;
        for (double x : e) s += x * x;
        return s;
    };
    auto project = [&](std::vector<double>& th) {
        for (std::size_t p = 0; p < k; ++p) {
            th[2 * p] = std::clamp(th[2 * p], kPi + 1e-9, kTwoPi - 1e-9);
            th[2 * p + 1] = std::max(th[2 * p + 1], 1e-9);
        }
    };

    std::vector<double> e, ep, em;
    residual(theta, e);
    double best = norm2(e);
    for (int it = 0; it < 12; ++it) {
        // Normal equations J^T J dx = -J^T e with a numeric Jacobian.
        const std::size_t m = 2 * k;
        std::vector<double> jt_e(m, 0.0), jt_j(m * m, 0.0);
        std::vector<std::vector<double>> cols(m);
        for (std::size_t c = 0; c < m; ++c) {
            double h = 1e-6 * (1.0 + std::abs(theta[c]));
            auto tp = theta, tm = theta;
            tp[c] += h;
            tm[c] -= h;
            project(tp);
            project(tm);
            residual(tp, ep);
            residual(tm, em);
            cols[c].resize(n);
            for (std::size_t j = 0; j < n; ++j) cols[c][j] = (ep[j] - em[j]) / (2.0 * h);
        }
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t j = 0; j < n; ++j) jt_e[a] += cols[a][j] * e[j];
            for (std::size_t b = a; b < m; ++b) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += cols[a][j] * cols[b][j];
                jt_j[a * m + b] = jt_j[b * m + a] = s;
            }
        }
        for (std::size_t a = 0; a < m; ++a) jt_j[a * m + a] += 1e-12 * (1.0 + jt_j[a * m + a]);
        // Gaussian elimination on the (small) normal system.
        std::vector<double> dx(m);
        {
            std::vector<double> A = jt_j, b = jt_e;
            for (std::size_t col = 0; col < m; ++col) {
                std::size_t piv = col;
                for (std::size_t row = col + 1; row < m; ++row)
                    if (std::abs(A[row * m + col]) > std::abs(A[piv * m + col])) piv = row;
                if (std::abs(A[piv * m + col]) < 1e-300) return;
                if (piv != col) {
                    for (std::size_t cc = 0; cc < m; ++cc) std::swap(A[col * m + cc], A[piv * m + cc]);
                    std::swap(b[col], b[piv]);
                }
                for (std::size_t row = col + 1; row < m; ++row) {
                    double f = A[row * m + col] / A[col * m + col];
                    for (std::size_t cc = col; cc < m; ++cc) A[row * m + cc] -= f * A[col * m + cc];
                    b[row] -= f * b[col];
                }
            }
            for (std::size_t col = m; col-- > 0;) {
                double s = b[col];
                for (std::size_t cc = col + 1; cc < m; ++cc) s -= A[col * m + cc] * dx[cc];
                dx[col] = s / A[col * m + col];
            }
        }
        double lambda = 1.0;
        bool advanced = false;
        for (int half = 0; half < 12; ++half) {
            auto trial = theta;
            for (std::size_t c = 0; c < m; ++c) trial[c] -= lambda * dx[c];
            project(trial);
            residual(trial, ep);
            double val = norm2(ep);
            if (val < best) {
                theta = trial;
                e = ep;
                best = val;
                advanced = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!advanced) break;
    }
    for (std::size_t p = 0; p < k; ++p) {
        pairs[p].phi_hat = theta[2 * p];
        pairs[p].l_hat = theta[2 * p + 1];
    }
}

ConcaveEstimate recover_impl(const QCurve& curve, const BandView& band,
                             const RecoverOptions& opts) {
    const auto& r = curve.abscissas;
    const std::size_t n = r.size();
    if (n < 8) throw std::invalid_argument("recover_all: grid too coarse");
    const double dr = n > 1 ? r[1] - r[0] : 0.0;
    const double r_end = r.back();

    std::vector<double> v = curve.values;
    ConcaveEstimate out;

    auto snap = [&](double x) {
        auto it = std::lower_bound(r.begin(), r.end(), x);
        if (it == r.end()) --it;
        return static_cast<std::size_t>(it - r.begin());
    };

    for (int stage = 1; stage <= opts.max_stages; ++stage) {
        out.stages_run = stage;
        std::size_t ci = first_band_exit(v, band, opts.band_scale);
        if (ci == n) {
            out.exhausted = true;
            break;
        }
        double c = r[ci];

        struct Candidate {
            PairSolve solve;
            double s_lo = 0.0, s_hi = 0.0;
            std::vector<double> peeled;
        };
        std::optional<Candidate> accepted;

        const std::array<std::pair<double, double>, 5> fractions{
            {{0.10, 0.40}, {0.05, 0.20}, {0.20, 0.60}, {0.35, 0.80}, {0.50, 0.90}}};
        const double onset_slack = std::max(3.0 * dr, 0.05 * (r_end - r.front()));

        auto try_placement = [&](double s_lo, double s_hi) -> std::optional<Candidate> {
            std::size_t ilo = snap(s_lo), ihi = snap(s_hi);
            if (ilo <= ci) ilo = ci + 1;
            if (ihi <= ilo + 1) ihi = ilo + 2;
            if (ihi >= n) return std::nullopt;
            PairSolve ps;
            try {
                ps = solve_phi_l(v[ilo], v[ihi], r[ilo], r[ihi], opts.solve);
            } catch (const infeasible_error&) {
                return std::nullopt;
            } catch (const std::domain_error&) {
                return std::nullopt;
            }
            if (ps.l > r[ilo] + dr) return std::nullopt;  // pair not past its interval
            double onset = ps.l * analytic::anglesin(ps.phi);
            if (std::abs(onset - c) > onset_slack) return std::nullopt;
            Candidate cand{ps, r[ilo], r[ihi], v};
            for (std::size_t j = 0; j < n; ++j)
                cand.peeled[j] += peel_term(ps.phi, ps.l, r[j]);
            // The peeled curve must be flat up to the solve abscissas;
            // otherwise a later interval contaminated the samples.
            std::size_t exit = first_band_exit(cand.peeled, band, 1.5 * opts.band_scale);
            if (exit < n && r[exit] <= cand.s_hi) return std::nullopt;
            return cand;
        };

        for (const auto& frac : fractions) {
            double upper = r_end;
            for (int refine = 0; refine < 5 && !accepted; ++refine) {
                double s_lo = c + frac.first * (upper - c);
                double s_hi = c + frac.second * (upper - c);
                auto cand = try_placement(s_lo, s_hi);
                if (cand) {
                    accepted = std::move(cand);
                    break;
                }
                // Use the contaminated fit's band exit as a tighter gap bound.
                std::size_t ilo = snap(s_lo), ihi = snap(s_hi);
                if (ilo <= ci) ilo = ci + 1;
                if (ihi <= ilo + 1) ihi = ilo + 2;
                if (ihi >= n) break;
                try {
                    PairSolve ps = solve_phi_l(v[ilo], v[ihi], r[ilo], r[ihi], opts.solve);
                    std::vector<double> trial = v;
                    for (std::size_t j = 0; j < n; ++j)
                        trial[j] += peel_term(ps.phi, ps.l, r[j]);
                    std::size_t exit = first_band_exit(trial, band, 1.5 * opts.band_scale, ci + 1);
                    if (exit == n || r[exit] <= c + 5.0 * dr || r[exit] >= upper) break;
                    upper = r[exit];
                } catch (const infeasible_error&) {
                    break;
                } catch (const std::domain_error&) {
                    break;
                }
            }
            if (accepted) break;
        }

        // Narrow-gap fallback: grid-spacing pairs growing from just past the
        // change point.
        if (!accepted) {
            const std::array<std::pair<std::size_t, std::size_t>, 7> spacings{
                {{2, 5}, {3, 8}, {5, 13}, {8, 21}, {13, 34}, {21, 55}, {34, 89}}};
            for (const auto& sp : spacings) {
                if (ci + sp.second >= n) break;
                auto cand = try_placement(r[ci + sp.first], r[ci + sp.second]);
                if (cand) {
                    accepted = std::move(cand);
                    break;
                }
            }
        }

        if (!accepted) {
            out.failure = "stage " + std::to_string(stage) + ": no consistent abscissa placement";
            break;
        }

        // Polish: re-place inside the confirmed gap (interval end = l_hat,
        // next change from the peeled curve) and re-solve.
        {
            std::size_t nxt = first_band_exit(accepted->peeled, band, opts.band_scale,
                                              snap(accepted->solve.l) + 1);
            double c2 = nxt == n ? r_end : r[nxt];
            double lhat = accepted->solve.l;
            if (c2 - lhat > 6.0 * dr) {
                auto cand = try_placement(lhat + 0.15 * (c2 - lhat), lhat + 0.45 * (c2 - lhat));
                if (cand && cand->solve.residual <= accepted->solve.residual * 10.0 + 1e-12)
                    accepted = std::move(cand);
            }
        }

        RecoveredPair pair;
        pair.phi_hat = accepted->solve.phi;
        pair.l_hat = accepted->solve.l;
        pair.s_lo = accepted->s_lo;
        pair.s_hi = accepted->s_hi;
        pair.residual = accepted->solve.residual;
        for (std::size_t k = 0; k < out.pairs.size(); ++k) {
            if (std::abs(out.pairs[k].phi_hat - pair.phi_hat) < opts.phi_match_tol) {
                pair.matched_pair = static_cast<int>(k);
                break;
            }
        }
        out.pairs.push_back(pair);
        v = std::move(accepted->peeled);
    }

    if (!out.exhausted && out.failure.empty() && out.stages_run >= opts.max_stages)
        out.failure = "max stages reached";

    if (!out.pairs.empty()) {
        global_refine(out.pairs, r, curve.values);
        for (std::size_t k = 0; k < out.pairs.size(); ++k) {
            out.pairs[k].matched_pair = -1;
            for (std::size_t e = 0; e < k; ++e) {
                if (std::abs(out.pairs[e].phi_hat - out.pairs[k].phi_hat) < opts.phi_match_tol) {
                    out.pairs[k].matched_pair = static_cast<int>(e);
                    break;
                }
            }
        }
        std::vector<double> resid = curve.values;
        for (const auto& p : out.pairs)
            for (std::size_t j = 0; j < n; ++j) resid[j] += peel_term(p.phi_hat, p.l_hat, r[j]);
        if (first_band_exit(resid, band, opts.band_scale) == n) {
            out.exhausted = true;
            out.failure.clear();
        }
    }
    return out;
}

}  // namespace

ConcaveEstimate recover_all(const QCurve& curve, double noise_band, const RecoverOptions& opts) {
    BandView band;
    band.scalar = noise_band;
    return recover_impl(curve, band, opts);
}

ConcaveEstimate recover_all(const QCurve& curve, const std::vector<double>& noise_band,
                            const RecoverOptions& opts) {
    if (noise_band.size() != curve.abscissas.size())
        throw std::invalid_argument("recover_all: band size mismatch");
    BandView band;
    band.vec = &noise_band;
    return recover_impl(curve, band, opts);
}

ConcaveEstimate recover_all_analytic(const geom::Polygon& poly, const analytic::Arena& arena,
                                     std::size_t grid_points, const RecoverOptions& opts) {
    std::vector<double> grid;
    grid.reserve(grid_points);
    for (std::size_t j = 1; j <= grid_points; ++j)
        grid.push_back(arena.r_max * static_cast<double>(j) / static_cast<double>(grid_points));
    QCurve curve = q_analytic_curve(poly, arena, grid);
    double scale = 0.0;
    for (double q : curve.values) scale = std::max(scale, std::abs(q));
    ConcaveEstimate est = recover_all(curve, 1e-6 * std::max(1.0, scale), opts);
    est.necessary_ok = necessary_condition_ok(poly, arena.r_max);
    est.sufficient_ok = sufficient_condition_ok(poly);
    return est;
}

ConcaveEstimate recover_all_empirical(const sim::ReportSet& rs, const analytic::Arena& arena,
                                      const est::NonconvexEstimate& estimates,
                                      std::size_t grid_points, const RecoverOptions& opts) {
    std::vector<double> grid;
    grid.reserve(grid_points);
    for (std::size_t j = 1; j <= grid_points; ++j)
        grid.push_back(arena.r_max * static_cast<double>(j) / static_cast<double>(grid_points));
    QCurve curve = q_hat_curve(rs, arena, estimates.area_hat, estimates.perimeter_hat,
                               estimates.g1sum_hat, grid);
    return recover_all(curve, q_hat_noise_band(rs, arena, grid), opts);
}

std::vector<ConcaveInterval> concave_intervals(const geom::Polygon& poly) {
    std::vector<ConcaveInterval> intervals;
    const auto& lengths = poly.edge_lengths();
    const auto& angles = poly.interior_angles();
    const std::size_t n = lengths.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (angles[i] <= kPi) continue;
        for (double l : {lengths[i], lengths[(i + 1) % n]})
            intervals.push_back({l * analytic::anglesin(angles[i]), l, angles[i], l});
    }
    std::sort(intervals.begin(), intervals.end(),
              [](const ConcaveInterval& a, const ConcaveInterval& b) { return a.lo < b.lo; });
    return intervals;
}

bool necessary_condition_ok(const geom::Polygon& poly, double r_max) {
    for (const auto& iv : concave_intervals(poly))
        if (!(r_max > iv.lo)) return false;
    return true;
}

bool sufficient_condition_ok(const geom::Polygon& poly) {
    auto intervals = concave_intervals(poly);
    for (std::size_t i = 1; i < intervals.size(); ++i)
        if (intervals[i].lo <= intervals[i - 1].hi) return false;
    return true;
}

MonotonicityReport verify_monotonicity(const MonotonicityGrid& grid) {
    MonotonicityReport rep;
    rep.worst_dldr = -std::numeric_limits<double>::infinity();
    rep.worst_dphidr = std::numeric_limits<double>::infinity();
    rep.worst_psi_prime = std::numeric_limits<double>::infinity();
    rep.worst_boundary = std::numeric_limits<double>::infinity();

    auto feasible = [](double phi, double l, double r) {
        return phi > kPi && phi < kTwoPi && r >= l * analytic::anglesin(phi) * (1.0 + 1e-9);
    };

    struct Region {
        double phi_lo, phi_hi;
    };
    const Region regions[2] = {{kPi + 0.05, 1.5 * kPi}, {1.5 * kPi + 1e-6, kTwoPi - 0.05}};

    for (const Region& reg : regions) {
        for (int i = 0; i < grid.phi_n; ++i) {
            double phi = reg.phi_lo + (i + 0.5) * (reg.phi_hi - reg.phi_lo) / grid.phi_n;
            for (int j = 0; j < grid.l_n; ++j) {
                double l = (j + 0.5) * grid.l_max / grid.l_n;
                double r_lo = l * analytic::anglesin(phi);
                if (r_lo >= grid.r_max) continue;
                // r = l boundary check of Psi' (Eq. F|_{r=l} >= 0 claim).
                if (l <= grid.r_max && feasible(phi, l, std::max(l, r_lo * (1.0 + 1e-9)))) {
                    double pb = psi_prime(phi, l, std::max(l, r_lo * (1.0 + 1e-9)));
                    rep.worst_boundary = std::min(rep.worst_boundary, pb);
                    if (pb < -grid.tol) ++rep.violations;
                }
                double span = grid.r_max - r_lo;
                for (int k = 0; k < grid.r_n; ++k) {
                    double r = r_lo + 0.02 * span + (k + 0.5) * 0.98 * span / grid.r_n;
                    double hp = 1e-3;
                    double hl = std::min(1e-3 * (1.0 + l), 0.2 * (r - r_lo) + 1e-9);
                    double hr = std::min(1e-3 * (1.0 + r), 0.2 * (r - r_lo) + 1e-9);

                    bool ok_l = feasible(phi, l + hl, r - hr) && feasible(phi, l + hl, r + hr) &&
                                l - hl >= 0.0;
                    if (ok_l) {
                        double d = (phi_big(phi, l + hl, r + hr) - phi_big(phi, l - hl, r + hr) -
                                    phi_big(phi, l + hl, r - hr) + phi_big(phi, l - hl, r - hr)) /
                                   (4.0 * hl * hr);
                        rep.worst_dldr = std::max(rep.worst_dldr, d);
                        if (d > grid.tol) ++rep.violations;
                        ++rep.nodes_checked;
                    }

                    bool ok_p = feasible(phi + hp, l, r - hr) && feasible(phi - hp, l, r - hr) &&
                                phi + hp < kTwoPi && phi - hp > kPi;
                    if (ok_p) {
                        double d = (phi_big(phi + hp, l, r + hr) - phi_big(phi - hp, l, r + hr) -
                                    phi_big(phi + hp, l, r - hr) + phi_big(phi - hp, l, r - hr)) /
                                   (4.0 * hp * hr);
                        rep.worst_dphidr = std::min(rep.worst_dphidr, d);
                        if (d < -grid.tol) ++rep.violations;
                        ++rep.nodes_checked;
                    }

                    if (feasible(phi, l, r)) {
                        double p = psi_prime(phi, l, r);
                        rep.worst_psi_prime = std::min(rep.worst_psi_prime, p);
                        if (p < -grid.tol) ++rep.violations;
                    }
                }
            }
        }
    }
    rep.pass = rep.violations == 0;
    return rep;
}

void write_qcurve(std::ostream& out, const QCurve& curve) {
    out << "r,q\n";
    for (std::size_t i = 0; i < curve.abscissas.size(); ++i)
        out << csv::fmt(curve.abscissas[i]) << ',' << csv::fmt(curve.values[i]) << '\n';
}

void write_concave_estimate(std::ostream& out, const ConcaveEstimate& est) {
    out << "phi_hat,l_hat,s_lo,s_hi,residual\n";
    for (const auto& p : est.pairs)
        out << csv::fmt(p.phi_hat) << ',' << csv::fmt(p.l_hat) << ',' << csv::fmt(p.s_lo) << ','
            << csv::fmt(p.s_hi) << ',' << csv::fmt(p.residual) << '\n';
}

void write_qcurve_file(const std::string& path, const QCurve& curve) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open file for writing: " + path);
    write_qcurve(out, curve);
}

void write_concave_estimate_file(const std::string& path, const ConcaveEstimate& est) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open file for writing: " + path);
    write_concave_estimate(out, est);
}

}  // namespace polysense::concave
