#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace polysense::geom {

/// Absolute tolerance used by all geometric predicates (cross products,
/// collinearity, boundary membership).
inline constexpr double kGeomTol = 1e-12;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// One sensor reading: 0 when the sensor sits inside the target, a positive
/// distance when the ray hits the boundary within range, or a miss.
struct Measurement {
    enum class Outcome { inside, hit, miss };

    Outcome outcome = Outcome::miss;
    double distance = 0.0;  // 0 for inside, hit distance otherwise

    static Measurement inside() { return {Outcome::inside, 0.0}; }
    static Measurement hit(double d) { return {Outcome::hit, d}; }
    static Measurement miss() { return {Outcome::miss, 0.0}; }

    bool detected() const { return outcome != Outcome::miss; }
};

/// Simple polygon with counter-clockwise vertex order and derived edge
/// lengths, interior angles, area, and perimeter.
///
/// Edge i runs from vertex i to vertex i+1 (mod n). interior_angles()[i] is
/// the angle between edge i and edge i+1, i.e. at vertex i+1; the two edges
/// adjacent to that vertex are edge_lengths()[i] and edge_lengths()[(i+1)%n].
/// A vertex is concave when its interior angle exceeds pi.
class Polygon {
public:
    Polygon() = default;  // empty placeholder; build() makes a valid one

    static Polygon build(std::vector<Point> points);

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<double>& edge_lengths() const { return edge_lengths_; }
    const std::vector<double>& interior_angles() const { return angles_; }
    double area() const { return area_; }
    double perimeter() const { return perimeter_; }
    std::size_t size() const { return vertices_.size(); }

    bool convex() const;
    /// Indices i with interior_angles()[i] > pi.
    std::vector<std::size_t> concave_angle_indices() const;

    Point bbox_min() const { return bbox_min_; }
    Point bbox_max() const { return bbox_max_; }

    Polygon translated(double dx, double dy) const;

private:
    std::vector<Point> vertices_;
    std::vector<double> edge_lengths_;
    std::vector<double> angles_;
    double area_ = 0.0;
    double perimeter_ = 0.0;
    Point bbox_min_, bbox_max_;
};

/// Closed-region membership: boundary points count as inside.
bool point_in_polygon(const Polygon& poly, Point p);

/// Distance measurement along the ray origin + s(cos theta, sin theta),
/// s in (0, r_max]. Returns inside() when the origin lies in the closed
/// polygon. A ray collinear with an edge returns the nearest endpoint
/// distance.
Measurement ray_cast(const Polygon& poly, Point origin, double theta, double r_max);

/// Polygon text format: one `x,y` vertex per line, `#` starts a comment.
Polygon read_polygon(std::istream& in);
Polygon read_polygon_file(const std::string& path);
void write_polygon(std::ostream& out, const Polygon& poly);
void write_polygon_file(const std::string& path, const Polygon& poly);

}  // namespace polysense::geom
