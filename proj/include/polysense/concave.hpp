#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polysense/estimators.hpp"
#include "polysense/simulator.hpp"

namespace polysense::concave {

/// Residual curve q(r) on a grid. Stage m means m-1 concave pairs have been
/// peeled off; the curve is flat (within the noise band) below the next
/// unexplained interval.
struct QCurve {
    std::vector<double> abscissas;
    std::vector<double> values;
    int stage = 1;
};

/// q(r) from estimated quantities (Pr replaced by N(r)/n_s).
double q_hat(const sim::ReportSet& rs, const analytic::Arena& arena, double area_hat,
             double perimeter_hat, double g1sum_hat, double r);

QCurve q_hat_curve(const sim::ReportSet& rs, const analytic::Arena& arena, double area_hat,
                   double perimeter_hat, double g1sum_hat, const std::vector<double>& r_grid);

/// Noiseless q(r) with the exact CDF; zero below the first interval and for
/// convex targets.
double q_analytic(const geom::Polygon& poly, const analytic::Arena& arena, double r);

QCurve q_analytic_curve(const geom::Polygon& poly, const analytic::Arena& arena,
                        const std::vector<double>& r_grid);

/// 3x the standard error of q_hat at each grid point, from the multinomial
/// count noise. Used as the default noise band for empirical curves.
std::vector<double> q_hat_noise_band(const sim::ReportSet& rs, const analytic::Arena& arena,
                                     const std::vector<double>& r_grid);

struct IntervalDetection {
    bool found = false;
    double change_r = 0.0;     // first abscissa where |q| exits the band
    std::size_t change_index = 0;
    double s_lo = 0.0;         // proposed solve abscissas in the gap past the
    double s_hi = 0.0;         // change point
};

/// Change-point scan of |q| against the band. `gap_hi` bounds the gap used
/// for the abscissa proposal (defaults to the end of the grid).
IntervalDetection detect_interval(const QCurve& curve, double noise_band, double gap_hi = 0.0);

/// Phi of the uniqueness analysis: -g4(phi,l,r) - r^2 g1(phi)/8 in closed
/// form. Agrees with the g-function route to roundoff on G1 u G2.
double phi_big(double phi, double l, double r);

/// g4 as the closed-form Psi(l; phi, r), monotone nondecreasing in l.
double psi(double phi, double l, double r);

/// Closed-form derivative of Psi with respect to l.
double psi_prime(double phi, double l, double r);

struct PairSolve {
    double phi = 0.0;
    double l = 0.0;
    double residual = 0.0;
};

struct SolveOptions {
    int grid_n = 200;
    int fine_grid_n = 600;
    double residual_tol = 1e-8;
    int newton_iters = 80;
};

/// Solves Phi(phi, l, s_k) = q_k (k = 3, 4) for the unique concave pair by
/// grid scan plus damped Newton. Throws infeasible_error when no root fits.
PairSolve solve_phi_l(double q3, double q4, double s3, double s4, const SolveOptions& opts = {});

/// Solves Psi(l) = q4_value for l by bisection over the feasible interval,
/// given the vertex angle. Throws infeasible_error when q is out of range.
double solve_l(double q4_value, double phi, double r, double residual_tol = 1e-10);

struct RecoveredPair {
    double phi_hat = 0.0;
    double l_hat = 0.0;
    double s_lo = 0.0;
    double s_hi = 0.0;
    double residual = 0.0;
    /// Index into the pair list of the earlier stage whose angle matched
    /// (same concave vertex, other edge); -1 if this is a new vertex.
    int matched_pair = -1;
};

struct ConcaveEstimate {
    std::vector<RecoveredPair> pairs;
    bool exhausted = false;      // stage curve stayed in band up to r_max
    int stages_run = 0;
    std::string failure;         // non-empty when a stage was infeasible
    std::optional<bool> necessary_ok;   // filled in validation mode
    std::optional<bool> sufficient_ok;  // filled in validation mode
};

struct RecoverOptions {
    double phi_match_tol = 0.15;  // |phi_j - phi_i| below this = same vertex
    int max_stages = 16;
    SolveOptions solve;
    double band_scale = 1.0;
};

/// Full peeling loop: detect the next interval, solve for its (phi, l),
/// subtract its contribution, repeat until the curve stays in band.
ConcaveEstimate recover_all(const QCurve& curve, double noise_band,
                            const RecoverOptions& opts = {});

ConcaveEstimate recover_all(const QCurve& curve, const std::vector<double>& noise_band,
                            const RecoverOptions& opts = {});

/// Noiseless recovery from the analytic CDF, with the observability
/// diagnostics (necessary condition and non-intersecting intervals) filled
/// from the known target.
ConcaveEstimate recover_all_analytic(const geom::Polygon& poly, const analytic::Arena& arena,
                                     std::size_t grid_points = 400,
                                     const RecoverOptions& opts = {});

/// Empirical recovery driven by the estimates of the estimators module.
ConcaveEstimate recover_all_empirical(const sim::ReportSet& rs, const analytic::Arena& arena,
                                      const est::NonconvexEstimate& estimates,
                                      std::size_t grid_points = 400,
                                      const RecoverOptions& opts = {});

/// r_max exceeds l * anglesin(phi) for both edges of every concave vertex.
bool necessary_condition_ok(const geom::Polygon& poly, double r_max);

/// The intervals [l anglesin(phi), l] over concave-adjacent edges are
/// pairwise disjoint (Theorem 6 sufficient condition).
bool sufficient_condition_ok(const geom::Polygon& poly);

/// The intervals themselves, sorted by lower end: (lo, hi, angle, length).
struct ConcaveInterval {
    double lo = 0.0;
    double hi = 0.0;
    double phi = 0.0;
    double l = 0.0;
};
std::vector<ConcaveInterval> concave_intervals(const geom::Polygon& poly);

struct MonotonicityGrid {
    int phi_n = 40;
    int l_n = 40;
    int r_n = 40;
    double l_max = 10.0;
    double r_max = 20.0;
    double tol = 1e-6;
};

struct MonotonicityReport {
    long long nodes_checked = 0;
    long long violations = 0;
    double worst_dldr = 0.0;       // max of d2Phi/dl dr (claim: <= 0)
    double worst_dphidr = 0.0;     // min of d2Phi/dphi dr (claim: >= 0)
    double worst_psi_prime = 0.0;  // min of Psi'(l) (claim: >= 0)
    double worst_boundary = 0.0;   // min of Psi' at r = l (claim: >= 0)
    bool pass = false;
};

/// Central finite differences of Phi on G1 u G2 confirming the monotonicity
/// claims used by the uniqueness proof, plus the Psi' sign checks.
MonotonicityReport verify_monotonicity(const MonotonicityGrid& grid = {});

void write_qcurve(std::ostream& out, const QCurve& curve);
void write_concave_estimate(std::ostream& out, const ConcaveEstimate& est);
void write_qcurve_file(const std::string& path, const QCurve& curve);
void write_concave_estimate_file(const std::string& path, const ConcaveEstimate& est);

}  // namespace polysense::concave
