#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polysense/geometry.hpp"

namespace polysense::analytic {

/// Rectangular monitored region plus the sensing range. Targets must keep an
/// r_max margin to every side so boundary effects vanish.
struct Arena {
    double width = 0.0;
    double height = 0.0;
    double r_max = 0.0;

    double area() const { return width * height; }
};

/// Exclusive case conditions selecting the overlap correction at a concave
/// vertex. C12 merges the two sub-r cases (triangle overlap only); C3 and C4
/// are the large-r cases for reflex angles above and below 3pi/2.
enum class CaseCondition { not_concave, c12, c3, c4 };

/// |sin t| for t in (3pi/2, 2pi), 1 for t in (pi, 3pi/2].
double anglesin(double t);

CaseCondition case_of(double phi, double l, double r);

double g1(double phi);
double g12(double phi, double r);

struct GammaZeta {
    double gamma;
    double zeta1;
    double zeta2;
};

/// Requires the C3/C4 regime so that gamma = l sin(2pi-phi)/r <= 1.
GammaZeta gamma_zeta(double phi, double l, double r);

double g3(double phi, double l, double r);
double g4(double phi, double l, double r);

namespace detail {
double g31(double phi, double gamma);
double g32(double phi, double gamma);
double g33(double phi, double l, double r);
double g34(double phi, double l, double gamma);
}  // namespace detail

/// Per-direction overlap area |v(r|theta,l)| for the given case; the
/// theta-integral over [0, pi) of this function is the matching g value.
double overlap_area(CaseCondition c, double phi, double l, double r, double theta);

/// Pose-set measure of {0 < measured distance <= r}: 2 L r minus the
/// case-selected corrections over concave vertices (both adjacent edges).
double measure_Ts(const geom::Polygon& poly, double r);

/// Distance CDF Pr(s <= r). Exact for convex targets; for non-convex targets
/// it ignores occlusion by non-adjacent edges.
double analytic_cdf(const geom::Polygon& poly, const Arena& arena, double r);

/// Margin feasibility: the r_max-dilation of the target fits in the arena.
bool margin_feasible(const geom::Polygon& poly, const Arena& arena);

/// True when some pair of non-adjacent edges lies within r_max of each
/// other, i.e. sensing events the correction terms ignore are possible.
/// Advisory: flagged polygons get looser oracle-agreement expectations.
bool occlusion_flagged(const geom::Polygon& poly, double r_max);

enum class Provenance { analytic_convex, analytic_general, empirical };

std::string provenance_name(Provenance p);

/// Distance CDF sampled on a grid, analytic or empirical.
struct CdfCurve {
    std::vector<double> abscissas;
    std::vector<double> values;
    std::vector<double> stderrs;  // empty for analytic curves
    Provenance provenance = Provenance::analytic_general;
};

CdfCurve analytic_curve(const geom::Polygon& poly, const Arena& arena,
                        const std::vector<double>& r_grid);

void write_cdf_curve(std::ostream& out, const CdfCurve& curve);
CdfCurve read_cdf_curve(std::istream& in);

}  // namespace polysense::analytic
