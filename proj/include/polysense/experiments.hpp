#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polysense/estimators.hpp"
#include "polysense/polygen.hpp"
#include "polysense/simulator.hpp"

namespace polysense::exp {

struct ExperimentConfig {
    analytic::Arena arena{50.0, 50.0, 20.0};
    long long n_d = 10000;
    int runs_per_polygon = 5;
    std::uint64_t seed = 1;
    std::vector<double> ratios = {0.3, 0.5, 0.7};
    double threshold = 2.0;
    double s1 = 1.0;
    int threads = 0;
    std::string out_dir;  // empty: no files, return data only
};

struct JudgmentRow {
    int vertex_count = 0;
    bool convex_truth = true;
    int runs = 0;
    int misjudged = 0;
    double ratio = 0.0;
};

/// Convexity judgment over a corpus: misjudgment ratio by vertex count and
/// true convexity.
std::vector<JudgmentRow> judgment_experiment(const std::vector<polygen::CorpusEntry>& corpus,
                                             const ExperimentConfig& cfg);

struct PerimeterRow {
    int vertex_count = 0;
    bool convex_truth = true;
    double relerr_auto_mean = 0.0;
    double relerr_auto_sd = 0.0;
    double relerr_convex_mean = 0.0;
    double relerr_convex_sd = 0.0;
    int runs = 0;
};

/// Perimeter estimation error of the auto method vs the convex-only
/// estimator over a corpus.
std::vector<PerimeterRow> perimeter_experiment(const std::vector<polygen::CorpusEntry>& corpus,
                                               const ExperimentConfig& cfg);

struct SweepRow {
    double r_max = 0.0;
    double ratio = 0.0;
    double mean_e_over_sigma = 0.0;
};

/// Mean e(r)/sigma against r/r_max for several sensing ranges (20 runs per
/// point by default).
std::vector<SweepRow> rmax_sweep(const geom::Polygon& target, const ExperimentConfig& cfg,
                                 const std::vector<double>& r_max_list,
                                 const std::vector<double>& ratio_grid, int runs = 20);

struct S1S2Row {
    double s1 = 0.0;
    double s2 = 0.0;  // 0 marks the convex-only reference row
    double relerr_mean = 0.0;
    double relerr_sd = 0.0;
};

/// Perimeter relative error across an (s1, s2) abscissa grid, plus the
/// convex-only estimator as reference.
std::vector<S1S2Row> s1s2_sweep(const geom::Polygon& target, const ExperimentConfig& cfg,
                                const std::vector<double>& s1_list,
                                const std::vector<double>& s2_list, int runs = 20);

/// The quadrangle used throughout the parameter-design experiments:
/// edges 9.434, 5.385, 10, 10*sqrt(2) and one concave angle of 4.89 rad.
geom::Polygon paper_quadrangle();

}  // namespace polysense::exp
