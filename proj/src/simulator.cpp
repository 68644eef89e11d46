#include "polysense/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "polysense/csv.hpp"
#include "polysense/errors.hpp"
#include "polysense/parallel.hpp"
#include "polysense/rng.hpp"

namespace polysense::sim {

namespace {

constexpr long long kSensorCap = 1'000'000'000;  // N_d-mode runaway guard

geom::Measurement sample_reading(const geom::Polygon& poly, const analytic::Arena& arena,
                                 std::uint64_t seed, std::uint64_t epoch, std::uint64_t index) {
    double x = rng::counter_uniform(seed, epoch, index, 0) * arena.width;
    double y = rng::counter_uniform(seed, epoch, index, 1) * arena.height;
    double theta = rng::counter_uniform(seed, epoch, index, 2) * 2.0 * std::numbers::pi;
    return geom::ray_cast(poly, {x, y}, theta, arena.r_max);
}

}  // namespace

ReportSet::ReportSet(std::vector<geom::Measurement> readings, double r_max)
    : readings_(std::move(readings)), r_max_(r_max) {
    sorted_hits_.reserve(readings_.size() / 4);
    for (const auto& m : readings_) {
        switch (m.outcome) {
            case geom::Measurement::Outcome::inside: ++n_zero_; break;
            case geom::Measurement::Outcome::hit:
                ++n_plus_;
                if (!(m.distance > 0.0 && m.distance <= r_max_ * (1.0 + 1e-12)))
                    throw std::invalid_argument("report: hit distance outside (0, r_max]");
                sorted_hits_.push_back(m.distance);
                break;
            case geom::Measurement::Outcome::miss: ++n_miss_; break;
        }
    }
    std::sort(sorted_hits_.begin(), sorted_hits_.end());
}

long long ReportSet::counts_at(double r) const {
    if (!(r >= 0.0)) throw std::invalid_argument("counts_at: r must be >= 0");
    auto it = std::upper_bound(sorted_hits_.begin(), sorted_hits_.end(), r);
    return n_zero_ + static_cast<long long>(it - sorted_hits_.begin());
}

ReportSet ReportSet::prefix(long long k) const {
    if (k < 0 || k > n_s()) throw std::invalid_argument("prefix: k outside [0, n_s]");
    std::vector<geom::Measurement> head(readings_.begin(), readings_.begin() + k);
    return ReportSet(std::move(head), r_max_);
}

ReportSet ReportSet::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("scaled: factor must be positive");
    std::vector<geom::Measurement> scaled_readings = readings_;
    for (auto& m : scaled_readings)
        if (m.outcome == geom::Measurement::Outcome::hit) m.distance *= factor;
    return ReportSet(std::move(scaled_readings), r_max_ * factor);
}

geom::Polygon place_target(const geom::Polygon& poly, const analytic::Arena& arena) {
    geom::Point lo = poly.bbox_min(), hi = poly.bbox_max();
    double cx = 0.5 * (lo.x + hi.x), cy = 0.5 * (lo.y + hi.y);
    geom::Polygon placed = poly.translated(0.5 * arena.width - cx, 0.5 * arena.height - cy);
    if (!analytic::margin_feasible(placed, arena))
        throw std::invalid_argument("place_target: r_max-dilated target does not fit the arena");
    return placed;
}

ReportSet run(const geom::Polygon& placed, const DeploymentConfig& cfg, int threads) {
    if (cfg.count < 1) throw std::invalid_argument("run: count must be >= 1");
    if (cfg.epochs < 1) throw std::invalid_argument("run: epochs must be >= 1");
    if (!analytic::margin_feasible(placed, cfg.arena))
        throw std::invalid_argument("run: target violates the arena margin");

    std::vector<geom::Measurement> readings;

    if (cfg.mode == DeployMode::sensor_count) {
        const std::size_t per_epoch = static_cast<std::size_t>(cfg.count);
        const std::size_t total = per_epoch * static_cast<std::size_t>(cfg.epochs);
        readings.resize(total);
        par::parallel_for(total, threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                std::uint64_t epoch = i / per_epoch;
                std::uint64_t index = i % per_epoch;
                readings[i] = sample_reading(placed, cfg.arena, cfg.seed, epoch, index);
            }
        });
        return ReportSet(std::move(readings), cfg.arena.r_max);
    }

    // detection_count: take sensors 0,1,2,... until the detections reach the
    // target. Blocks are evaluated in parallel; the cutoff scan is serial
    // over block order, so lane count cannot change the result.
    const long long target = cfg.count;
    const std::size_t block = 1 << 15;
    std::vector<geom::Measurement> buffer(block);
    long long detections = 0;
    std::uint64_t base = 0;
    while (detections < target) {
        if (static_cast<long long>(base) > kSensorCap)
            throw std::runtime_error("run: sensor cap reached before N_d detections");
        par::parallel_for(block, threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i)
                buffer[i] = sample_reading(placed, cfg.arena, cfg.seed, 0, base + i);
        });
        for (std::size_t i = 0; i < block && detections < target; ++i) {
            readings.push_back(buffer[i]);
            if (buffer[i].detected()) ++detections;
        }
        base += block;
    }
    return ReportSet(std::move(readings), cfg.arena.r_max);
}

void write_report(std::ostream& out, const ReportSet& rs) {
    out << "reading\n";
    for (const auto& m : rs.readings()) {
        switch (m.outcome) {
            case geom::Measurement::Outcome::inside: out << "0\n"; break;
            case geom::Measurement::Outcome::hit: out << csv::fmt(m.distance) << '\n'; break;
            case geom::Measurement::Outcome::miss: out << "NA\n"; break;
        }
    }
}

ReportSet read_report(std::istream& in, double r_max) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("reading", 0) != 0)
        throw io_error("report: missing 'reading' header");
    std::vector<geom::Measurement> readings;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line == "NA") {
            readings.push_back(geom::Measurement::miss());
        } else {
            double v = std::stod(line);
            readings.push_back(v == 0.0 ? geom::Measurement::inside() : geom::Measurement::hit(v));
        }
    }
    return ReportSet(std::move(readings), r_max);
}

void write_report_file(const std::string& path, const ReportSet& rs) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open file for writing: " + path);
    write_report(out, rs);
}

ReportSet read_report_file(const std::string& path, double r_max) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open report file: " + path);
    return read_report(in, r_max);
}

}  // namespace polysense::sim
