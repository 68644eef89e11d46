#pragma once

#include <cstdint>
#include <vector>

#include "polysense/geometry.hpp"
#include "polysense/rng.hpp"

namespace polysense::polygen {

/// Jittered-circle generation knobs. Radii mix a mild band with occasional
/// deeper dips so every vertex count yields both convex and non-convex
/// shapes of varying concavity.
struct GenParams {
    double angle_jitter = 0.55;  // fraction of the regular angular gap
    double base_lo = 0.82;       // mild radius band [base_lo, 1]
    double dip_prob = 0.24;      // chance a vertex radius dips deeper
    double dip_lo = 0.38;        // dip band [dip_lo, base_lo]
    double min_angle_margin = 0.05;  // reject |phi - pi| below this
    int max_tries = 20000;
};

struct CorpusSpec {
    std::vector<int> vertex_counts = {4, 6, 10};
    int polygons_per_count = 20;
    double scale = 9.0;  // target diameter bound
    std::uint64_t seed = 1;
};

/// Random simple polygon with n vertices on a jittered circle, rejected
/// until it passes validation, has no near-pi angle, respects the diameter
/// bound, and fits the default 50x50 arena at r_max = 20.
geom::Polygon random_simple_polygon(int n, double scale, rng::Stream& stream,
                                    const GenParams& params = {});

struct Classification {
    bool convex = true;
    std::vector<std::size_t> concave_indices;  // angle indices with phi > pi
};

Classification classify(const geom::Polygon& poly);

struct CorpusEntry {
    geom::Polygon polygon;
    int vertex_count = 0;
    bool convex = true;
};

std::vector<CorpusEntry> make_corpus(const CorpusSpec& spec, const GenParams& params = {});

}  // namespace polysense::polygen
