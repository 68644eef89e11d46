#include "polysense/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "polysense/csv.hpp"

namespace polysense::geom {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
Point sub(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
double norm(Point a) { return std::hypot(a.x, a.y); }

double shoelace(const std::vector<Point>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        s += a.x * b.y - a.y * b.x;
    }
    return 0.5 * s;
}

// Proper segment intersection test for the simplicity check. Shared
// endpoints of adjacent edges are excluded by the caller.
bool segments_intersect(Point a, Point b, Point c, Point d) {
    auto orient = [](Point p, Point q, Point r) {
        double v = cross(sub(q, p), sub(r, p));
        if (v > kGeomTol) return 1;
        if (v < -kGeomTol) return -1;
        return 0;
    };
    int o1 = orient(a, b, c), o2 = orient(a, b, d);
    int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    auto on_segment = [](Point p, Point q, Point r) {
        return std::min(p.x, q.x) - kGeomTol <= r.x && r.x <= std::max(p.x, q.x) + kGeomTol &&
               std::min(p.y, q.y) - kGeomTol <= r.y && r.y <= std::max(p.y, q.y) + kGeomTol;
    };
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

}  // namespace

Polygon Polygon::build(std::vector<Point> points) {
    if (points.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    for (const Point& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("polygon vertex is not finite");
    }
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            Point d = sub(points[i], points[j]);
            if (norm(d) <= kGeomTol) throw std::invalid_argument("repeated vertex in polygon");
        }
    }

    double area2 = shoelace(points);
    if (std::abs(area2) <= kGeomTol) throw std::invalid_argument("degenerate polygon (zero area)");
    if (area2 < 0.0) std::reverse(points.begin(), points.end());  // canonical CCW

    // Simplicity: no two non-adjacent edges may intersect.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(points[i], points[(i + 1) % n], points[j], points[(j + 1) % n]))
                throw std::invalid_argument("self-intersecting polygon");
        }
    }

    Polygon poly;
    poly.vertices_ = std::move(points);
    poly.edge_lengths_.resize(n);
    poly.angles_.resize(n);
    poly.bbox_min_ = poly.bbox_max_ = poly.vertices_[0];

    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = poly.vertices_[i];
        const Point& b = poly.vertices_[(i + 1) % n];
        poly.edge_lengths_[i] = norm(sub(b, a));
        poly.bbox_min_.x = std::min(poly.bbox_min_.x, a.x);
        poly.bbox_min_.y = std::min(poly.bbox_min_.y, a.y);
        poly.bbox_max_.x = std::max(poly.bbox_max_.x, a.x);
        poly.bbox_max_.y = std::max(poly.bbox_max_.y, a.y);
    }

    // interior angle i joins edge i and edge i+1: pi minus the signed turn.
    for (std::size_t i = 0; i < n; ++i) {
        Point d0 = sub(poly.vertices_[(i + 1) % n], poly.vertices_[i]);
        Point d1 = sub(poly.vertices_[(i + 2) % n], poly.vertices_[(i + 1) % n]);
        double turn = std::atan2(cross(d0, d1), d0.x * d1.x + d0.y * d1.y);
        double l0 = norm(d0), l1 = norm(d1);
        if (std::abs(cross(d0, d1)) <= kGeomTol * std::max(1.0, l0 * l1) &&
            d0.x * d1.x + d0.y * d1.y > 0.0)
            throw std::invalid_argument("collinear adjacent edges (interior angle pi)");
        double phi = kPi - turn;
        if (phi <= 0.0) phi += 2.0 * kPi;
        if (phi >= 2.0 * kPi) phi -= 2.0 * kPi;
        poly.angles_[i] = phi;
    }

    poly.area_ = shoelace(poly.vertices_);
    poly.perimeter_ = 0.0;
    for (double l : poly.edge_lengths_) poly.perimeter_ += l;
    return poly;
}

bool Polygon::convex() const {
    for (double phi : angles_)
        if (phi > kPi) return false;
    return true;
}

std::vector<std::size_t> Polygon::concave_angle_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < angles_.size(); ++i)
        if (angles_[i] > kPi) idx.push_back(i);
    return idx;
}

Polygon Polygon::translated(double dx, double dy) const {
    Polygon out = *this;
    for (Point& p : out.vertices_) {
        p.x += dx;
        p.y += dy;
    }
    out.bbox_min_.x += dx;
    out.bbox_min_.y += dy;
    out.bbox_max_.x += dx;
    out.bbox_max_.y += dy;
    return out;
}

bool point_in_polygon(const Polygon& poly, Point p) {
    const auto& v = poly.vertices();
    const std::size_t n = v.size();

    // Boundary counts as inside.
    for (std::size_t i = 0; i < n; ++i) {
        Point a = v[i], b = v[(i + 1) % n];
        Point ab = sub(b, a), ap = sub(p, a);
        double len = norm(ab);
        if (std::abs(cross(ab, ap)) <= kGeomTol * std::max(1.0, len)) {
            double t = (ap.x * ab.x + ap.y * ab.y) / (len * len);
            if (t >= -kGeomTol && t <= 1.0 + kGeomTol) return true;
        }
    }

    bool in = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        bool crosses = (v[i].y > p.y) != (v[j].y > p.y);
        if (crosses) {
            double x_at = v[i].x + (p.y - v[i].y) / (v[j].y - v[i].y) * (v[j].x - v[i].x);
            if (p.x < x_at) in = !in;
        }
    }
    return in;
}

Measurement ray_cast(const Polygon& poly, Point origin, double theta, double r_max) {
    if (!(r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
    if (point_in_polygon(poly, origin)) return Measurement::inside();

    const Point u{std::cos(theta), std::sin(theta)};
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    double best = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < n; ++i) {
        Point a = v[i], b = v[(i + 1) % n];
        Point e = sub(b, a);
        Point ao = sub(a, origin);
        double denom = cross(u, e);
        if (std::abs(denom) <= kGeomTol) {
            // Ray parallel to the edge; if collinear, the nearest endpoint
            // along the ray is the detected point (measure-zero event).
            if (std::abs(cross(ao, u)) <= kGeomTol * std::max(1.0, norm(ao))) {
                double sa = ao.x * u.x + ao.y * u.y;
                double sb = sa + e.x * u.x + e.y * u.y;
                for (double s : {sa, sb})
                    if (s > kGeomTol) best = std::min(best, s);
            }
            continue;
        }
        double s = cross(ao, e) / denom;
        double t = cross(ao, u) / denom;
        if (s > kGeomTol && t >= -kGeomTol && t <= 1.0 + kGeomTol) best = std::min(best, s);
    }

    if (best <= r_max) return Measurement::hit(best);
    return Measurement::miss();
}

Polygon read_polygon(std::istream& in) {
    std::vector<Point> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string trimmed;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
        if (trimmed.empty()) continue;
        auto comma = trimmed.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("polygon file: missing comma on line " + std::to_string(lineno));
        try {
            pts.push_back({std::stod(trimmed.substr(0, comma)), std::stod(trimmed.substr(comma + 1))});
        } catch (const std::exception&) {
            throw std::runtime_error("polygon file: bad number on line " + std::to_string(lineno));
        }
    }
    return Polygon::build(std::move(pts));
}

Polygon read_polygon_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open polygon file: " + path);
    return read_polygon(in);
}

void write_polygon(std::ostream& out, const Polygon& poly) {
    for (const Point& p : poly.vertices())
        out << csv::fmt(p.x) << ',' << csv::fmt(p.y) << '\n';
}

void write_polygon_file(const std::string& path, const Polygon& poly) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    write_polygon(out, poly);
}

}  // namespace polysense::geom
