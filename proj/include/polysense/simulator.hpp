#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polysense/analytic.hpp"
#include "polysense/geometry.hpp"

namespace polysense::sim {

enum class DeployMode {
    sensor_count,     // fixed n_s per epoch
    detection_count,  // generate until N_0 + N_+ reaches the requested count
};

struct DeploymentConfig {
    analytic::Arena arena;
    DeployMode mode = DeployMode::sensor_count;
    long long count = 0;
    int epochs = 1;  // ignored in detection_count mode (single stream)
    std::uint64_t seed = 0;
};

/// Collected sensing reports. Readings are stored in generation order and
/// never carry sensor positions or directions.
class ReportSet {
public:
    ReportSet(std::vector<geom::Measurement> readings, double r_max);

    const std::vector<geom::Measurement>& readings() const { return readings_; }
    long long n_s() const { return static_cast<long long>(readings_.size()); }
    long long n_zero() const { return n_zero_; }
    long long n_plus() const { return n_plus_; }
    long long n_miss() const { return n_miss_; }
    long long n_detect() const { return n_zero_ + n_plus_; }
    double r_max() const { return r_max_; }

    /// N(r): readings with result 0 or hit distance <= r.
    long long counts_at(double r) const;

    /// First `k` readings as an independent pilot subset (k <= n_s).
    ReportSet prefix(long long k) const;

    /// All readings and the range scaled by a common factor (unit change).
    ReportSet scaled(double factor) const;

private:
    std::vector<geom::Measurement> readings_;
    std::vector<double> sorted_hits_;
    long long n_zero_ = 0, n_plus_ = 0, n_miss_ = 0;
    double r_max_ = 0.0;
};

/// Translates the target so its bounding-box center sits at the arena center
/// and verifies the r_max margin.
geom::Polygon place_target(const geom::Polygon& poly, const analytic::Arena& arena);

/// Uniform sensor positions over the arena, uniform directions over
/// [0, 2pi). Per-sensor counter-based random streams keyed by
/// (seed, epoch, index) make the result identical for any thread count.
ReportSet run(const geom::Polygon& placed, const DeploymentConfig& cfg, int threads = 0);

void write_report(std::ostream& out, const ReportSet& rs);
ReportSet read_report(std::istream& in, double r_max);
void write_report_file(const std::string& path, const ReportSet& rs);
ReportSet read_report_file(const std::string& path, double r_max);

}  // namespace polysense::sim
