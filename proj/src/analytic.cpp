#include "polysense/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "polysense/csv.hpp"

namespace polysense::analytic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kThreeHalfPi = 1.5 * std::numbers::pi;

// Slack for clamping gamma to [0,1] at case boundaries where r equals
// l*anglesin(phi) up to roundoff.
constexpr double kGammaSlack = 1e-9;

double cot(double t) { return std::cos(t) / std::sin(t); }

double segment_distance(geom::Point a, geom::Point b, geom::Point c, geom::Point d);

}  // namespace

double anglesin(double t) {
    if (!(t > kPi && t < kTwoPi)) throw std::domain_error("anglesin: t outside (pi, 2pi)");
    if (t > kThreeHalfPi) return std::abs(std::sin(t));
    return 1.0;
}

CaseCondition case_of(double phi, double l, double r) {
    if (!(l > 0.0) || !(r > 0.0)) throw std::invalid_argument("case_of: l and r must be positive");
    if (phi <= kPi) return CaseCondition::not_concave;
    if (phi >= kTwoPi) throw std::domain_error("case_of: phi outside (0, 2pi)");
    if (phi > kThreeHalfPi) {
        return r < l * std::abs(std::sin(phi)) ? CaseCondition::c12 : CaseCondition::c3;
    }
    return r < l ? CaseCondition::c12 : CaseCondition::c4;
}

double g1(double phi) {
    if (!(phi > kPi && phi < kTwoPi)) throw std::domain_error("g1: phi outside (pi, 2pi)");
    // (phi-pi)*cot(phi) is regular at 3pi/2 (cot vanishes), so the removable
    // singularity of the tan form needs no separate branch.
    return -2.0 + 2.0 * (phi - kPi) * cot(phi);
}

double g12(double phi, double r) { return -r * r * g1(phi) / 8.0; }

GammaZeta gamma_zeta(double phi, double l, double r) {
    if (!(phi > kPi && phi < kTwoPi)) throw std::domain_error("gamma_zeta: phi outside (pi, 2pi)");
    double gamma = l * std::sin(kTwoPi - phi) / r;
    if (gamma > 1.0 + kGammaSlack)
        throw std::domain_error("gamma_zeta: gamma > 1 (C12 regime, caller bug)");
    gamma = std::min(gamma, 1.0);
    double as = std::asin(gamma);
    return {gamma, phi - kPi - as, phi - kTwoPi + as};
}

namespace detail {

double g31(double phi, double gamma) {
    double root = std::sqrt(std::max(0.0, 1.0 - gamma * gamma));
    return -2.0 * gamma * gamma + cot(phi) * (2.0 * std::asin(gamma) - 2.0 * gamma * root);
}

double g32(double phi, double gamma) {
    double root = std::sqrt(std::max(0.0, 1.0 - gamma * gamma));
    return cot(phi) * (-2.0 * (-std::asin(gamma) - phi + kTwoPi) - 2.0 * gamma * root -
                       std::sin(2.0 * phi)) -
           1.0 + 2.0 * gamma * gamma + std::cos(2.0 * phi);
}

double g33(double phi, double l, double r) {
    // log|sin phi| - log gamma reduces to log(r/l).
    double zeta1 = gamma_zeta(phi, l, r).zeta1;
    double s = std::sin(phi);
    return 0.5 * l * l * s * (zeta1 * std::cos(phi) - s * std::log(r / l));
}

double g34(double phi, double l, double gamma) {
    return 0.5 * l * l * std::sin(phi) * (kPi - 2.0 * std::asin(gamma)) * std::cos(phi);
}

}  // namespace detail

double g3(double phi, double l, double r) {
    if (case_of(phi, l, r) != CaseCondition::c3)
        throw std::domain_error("g3: (phi, l, r) is not in case C3");
    auto gz = gamma_zeta(phi, l, r);
    double zeta2p = std::max(gz.zeta2, 0.0);
    double value = l * r * (std::cos(zeta2p) - std::cos(gz.zeta1)) -
                   r * r / 8.0 * detail::g31(phi, gz.gamma);
    if (gz.zeta2 > 0.0)
        value += -r * r / 8.0 * detail::g32(phi, gz.gamma) + detail::g34(phi, l, gz.gamma);
    else
        value += detail::g33(phi, l, r);
    return value;
}

double g4(double phi, double l, double r) {
    if (case_of(phi, l, r) != CaseCondition::c4 && case_of(phi, l, r) != CaseCondition::c3)
        throw std::domain_error("g4: (phi, l, r) is not in case C3/C4");
    auto gz = gamma_zeta(phi, l, r);
    return l * r * (1.0 - std::cos(gz.zeta1)) - r * r / 8.0 * detail::g31(phi, gz.gamma) +
           detail::g33(phi, l, r);
}

double overlap_area(CaseCondition c, double phi, double l, double r, double theta) {
    if (c == CaseCondition::not_concave)
        throw std::invalid_argument("overlap_area: needs a concave case");
    if (!(theta >= 0.0 && theta < kPi))
        throw std::invalid_argument("overlap_area: theta outside [0, pi)");
    if (theta > phi - kPi) return 0.0;

    double tau = phi - theta - kPi;
    auto triangle = [&] {
        double st = std::sin(tau);
        return 0.5 * r * r * st * (std::cos(tau) - st * cot(phi));
    };
    auto quadrangle = [&] {
        return l * r * std::sin(theta) +
               0.5 * l * l * std::sin(phi) * (std::cos(phi) - std::sin(phi) * cot(tau));
    };

    switch (c) {
        case CaseCondition::c12:
            return triangle();
        case CaseCondition::c3: {
            auto gz = gamma_zeta(phi, l, r);
            double zeta2p = std::max(gz.zeta2, 0.0);
            if (theta >= gz.zeta1 || theta <= zeta2p) return triangle();
            return quadrangle();
        }
        case CaseCondition::c4: {
            auto gz = gamma_zeta(phi, l, r);
            if (theta >= gz.zeta1) return triangle();
            return quadrangle();
        }
        default:
            throw std::invalid_argument("overlap_area: bad case");
    }
}

double measure_Ts(const geom::Polygon& poly, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("measure_Ts: r must be positive");
    double total = 2.0 * poly.perimeter() * r;
    const auto& lengths = poly.edge_lengths();
    const auto& angles = poly.interior_angles();
    const std::size_t n = lengths.size();
    for (std::size_t i = 0; i < n; ++i) {
        double phi = angles[i];
        if (phi <= kPi) continue;
        for (double l : {lengths[i], lengths[(i + 1) % n]}) {
            switch (case_of(phi, l, r)) {
                case CaseCondition::c12:
                    total -= g12(phi, r);
                    break;
                case CaseCondition::c3:
                    total -= g3(phi, l, r);
                    break;
                case CaseCondition::c4:
                    total -= g4(phi, l, r);
                    break;
                case CaseCondition::not_concave:
                    break;
            }
        }
    }
    return total;
}

bool margin_feasible(const geom::Polygon& poly, const Arena& arena) {
    double bw = poly.bbox_max().x - poly.bbox_min().x;
    double bh = poly.bbox_max().y - poly.bbox_min().y;
    double slack = 1e-9 * std::max({1.0, arena.width, arena.height});
    return bw + 2.0 * arena.r_max <= arena.width + slack &&
           bh + 2.0 * arena.r_max <= arena.height + slack;
}

double analytic_cdf(const geom::Polygon& poly, const Arena& arena, double r) {
    if (!(r >= 0.0 && r <= arena.r_max))
        throw std::invalid_argument("analytic_cdf: r outside [0, r_max]");
    if (!margin_feasible(poly, arena))
        throw std::invalid_argument("analytic_cdf: target violates the arena margin");
    double omega = arena.area();
    if (r == 0.0) return poly.area() / omega;
    return (measure_Ts(poly, r) + kTwoPi * poly.area()) / (kTwoPi * omega);
}

bool occlusion_flagged(const geom::Polygon& poly, double r_max) {
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segment_distance(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) <= r_max)
                return true;
        }
    }
    return false;
}

std::string provenance_name(Provenance p) {
    switch (p) {
        case Provenance::analytic_convex: return "analytic-convex";
        case Provenance::analytic_general: return "analytic-general";
        case Provenance::empirical: return "empirical";
    }
    return "unknown";
}

CdfCurve analytic_curve(const geom::Polygon& poly, const Arena& arena,
                        const std::vector<double>& r_grid) {
    CdfCurve curve;
    curve.provenance = poly.convex() ? Provenance::analytic_convex : Provenance::analytic_general;
    curve.abscissas = r_grid;
    curve.values.reserve(r_grid.size());
    for (double r : r_grid) curve.values.push_back(analytic_cdf(poly, arena, r));
    return curve;
}

void write_cdf_curve(std::ostream& out, const CdfCurve& curve) {
    out << "r,p,stderr,provenance\n";
    for (std::size_t i = 0; i < curve.abscissas.size(); ++i) {
        out << csv::fmt(curve.abscissas[i]) << ',' << csv::fmt(curve.values[i]) << ',';
        if (i < curve.stderrs.size()) out << csv::fmt(curve.stderrs[i]);
        out << ',' << provenance_name(curve.provenance) << '\n';
    }
}

CdfCurve read_cdf_curve(std::istream& in) {
    CdfCurve curve;
    std::string line;
    if (!std::getline(in, line) || line.rfind("r,p,stderr,provenance", 0) != 0)
        throw std::runtime_error("cdf curve: bad header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = csv::split_line(line);
        if (f.size() != 4) throw std::runtime_error("cdf curve: bad row");
        curve.abscissas.push_back(std::stod(f[0]));
        curve.values.push_back(std::stod(f[1]));
        if (!f[2].empty()) curve.stderrs.push_back(std::stod(f[2]));
        if (f[3] == "analytic-convex") curve.provenance = Provenance::analytic_convex;
        else if (f[3] == "empirical") curve.provenance = Provenance::empirical;
        else curve.provenance = Provenance::analytic_general;
    }
    return curve;
}

namespace {

double point_segment_distance(geom::Point p, geom::Point a, geom::Point b) {
    double ex = b.x - a.x, ey = b.y - a.y;
    double len2 = ex * ex + ey * ey;
    double t = len2 > 0.0 ? ((p.x - a.x) * ex + (p.y - a.y) * ey) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * ex), p.y - (a.y + t * ey));
}

double segment_distance(geom::Point a, geom::Point b, geom::Point c, geom::Point d) {
    auto orient = [](geom::Point p, geom::Point q, geom::Point r) {
        return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    };
    bool crossing = orient(a, b, c) * orient(a, b, d) < 0.0 && orient(c, d, a) * orient(c, d, b) < 0.0;
    if (crossing) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

}  // namespace

}  // namespace polysense::analytic
