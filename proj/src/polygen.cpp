#include "polysense/polygen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "polysense/analytic.hpp"

namespace polysense::polygen {

namespace {

constexpr double kPi = std::numbers::pi;

const analytic::Arena kDefaultArena{50.0, 50.0, 20.0};

double diameter(const geom::Polygon& poly) {
    const auto& v = poly.vertices();
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            best = std::max(best, std::hypot(v[i].x - v[j].x, v[i].y - v[j].y));
    return best;
}

}  // namespace

geom::Polygon random_simple_polygon(int n, double scale, rng::Stream& stream,
                                    const GenParams& params) {
    if (n < 3) throw std::invalid_argument("random_simple_polygon: n must be >= 3");
    if (!(scale > 0.0)) throw std::invalid_argument("random_simple_polygon: scale must be positive");

    const double gap = 2.0 * kPi / n;
    for (int attempt = 0; attempt < params.max_tries; ++attempt) {
        std::vector<geom::Point> pts;
        pts.reserve(n);
        for (int i = 0; i < n; ++i) {
            double angle = gap * i + params.angle_jitter * gap * (stream.uniform() - 0.5);
            double factor = stream.uniform() < params.dip_prob
                                ? stream.uniform(params.dip_lo, params.base_lo)
                                : stream.uniform(params.base_lo, 1.0);
            double radius = 0.5 * scale * factor;
            pts.push_back({radius * std::cos(angle), radius * std::sin(angle)});
        }
        geom::Polygon poly;
        try {
            poly = geom::Polygon::build(std::move(pts));
        } catch (const std::invalid_argument&) {
            continue;
        }
        bool near_pi = false;
        for (double phi : poly.interior_angles())
            if (std::abs(phi - kPi) < params.min_angle_margin) near_pi = true;
        if (near_pi) continue;
        double d = diameter(poly);
        if (d > scale || d < 0.35 * scale) continue;
        geom::Polygon centered = poly.translated(25.0 - 0.5 * (poly.bbox_min().x + poly.bbox_max().x),
                                                 25.0 - 0.5 * (poly.bbox_min().y + poly.bbox_max().y));
        if (!analytic::margin_feasible(centered, kDefaultArena)) continue;
        return poly;
    }
    throw std::runtime_error("random_simple_polygon: rejection budget exhausted");
}

Classification classify(const geom::Polygon& poly) {
    Classification c;
    c.concave_indices = poly.concave_angle_indices();
    c.convex = c.concave_indices.empty();
    return c;
}

std::vector<CorpusEntry> make_corpus(const CorpusSpec& spec, const GenParams& params) {
    std::vector<CorpusEntry> corpus;
    for (int count : spec.vertex_counts) {
        for (int k = 0; k < spec.polygons_per_count; ++k) {
            rng::Stream stream(rng::mix64(spec.seed ^ (static_cast<std::uint64_t>(count) * 0x51ED27
                                                       + static_cast<std::uint64_t>(k))));
            CorpusEntry entry;
            entry.polygon = random_simple_polygon(count, spec.scale, stream, params);
            entry.vertex_count = count;
            entry.convex = classify(entry.polygon).convex;
            corpus.push_back(std::move(entry));
        }
    }
    return corpus;
}

}  // namespace polysense::polygen
