#include "polysense/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "polysense/csv.hpp"
#include "polysense/errors.hpp"
#include "polysense/rng.hpp"
#include "polysense/svg.hpp"

namespace polysense::exp {

namespace {

std::uint64_t run_seed(std::uint64_t base, std::uint64_t poly, std::uint64_t run) {
    return rng::mix64(rng::mix64(base ^ (poly * 0x9E3779B97F4A7C15ULL)) ^ run);
}

sim::ReportSet simulate_nd(const geom::Polygon& target, const ExperimentConfig& cfg,
                           std::uint64_t seed) {
    sim::DeploymentConfig dc;
    dc.arena = cfg.arena;
    dc.mode = sim::DeployMode::detection_count;
    dc.count = cfg.n_d;
    dc.seed = seed;
    return sim::run(sim::place_target(target, cfg.arena), dc, cfg.threads);
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::string path = dir + "/" + name;
    std::ofstream out(path);
    if (!out) throw io_error("cannot open file for writing: " + path);
    return out;
}

struct MeanSd {
    double mean = 0.0, sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& xs) {
    if (xs.empty()) return {};
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v = xs.size() > 1 ? v / static_cast<double>(xs.size() - 1) : 0.0;
    return {m, std::sqrt(v)};
}

}  // namespace

geom::Polygon paper_quadrangle() {
    return geom::Polygon::build({{0.0, 0.0}, {8.0, 5.0}, {10.0, 0.0}, {10.0, 10.0}});
}

std::vector<JudgmentRow> judgment_experiment(const std::vector<polygen::CorpusEntry>& corpus,
                                             const ExperimentConfig& cfg) {
    std::map<std::pair<int, bool>, std::pair<int, int>> tally;  // (runs, misjudged)
    std::ofstream runs_csv;
    if (!cfg.out_dir.empty()) {
        runs_csv = open_out(cfg.out_dir, "judgment_runs.csv");
        runs_csv << "poly_id,n_vertices,convex_truth,run,verdict_convex,misjudged\n";
    }

    for (std::size_t p = 0; p < corpus.size(); ++p) {
        const auto& entry = corpus[p];
        for (int run = 0; run < cfg.runs_per_polygon; ++run) {
            auto rs = simulate_nd(entry.polygon, cfg, run_seed(cfg.seed, p, run));
            auto verdict = est::convexity_test(rs, cfg.arena, cfg.ratios, cfg.threshold);
            bool judged_convex = !verdict.non_convex;
            bool miss = judged_convex != entry.convex;
            auto& t = tally[{entry.vertex_count, entry.convex}];
            ++t.first;
            t.second += miss ? 1 : 0;
            if (runs_csv.is_open())
                runs_csv << p << ',' << entry.vertex_count << ',' << (entry.convex ? 1 : 0) << ','
                         << run << ',' << (judged_convex ? 1 : 0) << ',' << (miss ? 1 : 0) << '\n';
        }
    }

    std::vector<JudgmentRow> rows;
    for (const auto& [key, t] : tally) {
        JudgmentRow row;
        row.vertex_count = key.first;
        row.convex_truth = key.second;
        row.runs = t.first;
        row.misjudged = t.second;
        row.ratio = t.first > 0 ? static_cast<double>(t.second) / t.first : 0.0;
        rows.push_back(row);
    }
    if (!cfg.out_dir.empty()) {
        auto out = open_out(cfg.out_dir, "judgment_summary.csv");
        out << "n_vertices,convex_truth,runs,misjudged,ratio\n";
        for (const auto& row : rows)
            out << row.vertex_count << ',' << (row.convex_truth ? 1 : 0) << ',' << row.runs << ','
                << row.misjudged << ',' << csv::fmt(row.ratio) << '\n';
    }
    return rows;
}

std::vector<PerimeterRow> perimeter_experiment(const std::vector<polygen::CorpusEntry>& corpus,
                                               const ExperimentConfig& cfg) {
    struct Group {
        std::vector<double> err_auto, err_convex;
    };
    std::map<std::pair<int, bool>, Group> groups;
    std::ofstream runs_csv;
    if (!cfg.out_dir.empty()) {
        runs_csv = open_out(cfg.out_dir, "perimeter_runs.csv");
        runs_csv << "poly_id,n_vertices,convex_truth,run,perimeter_true,perimeter_auto,"
                    "perimeter_convex,relerr_auto,relerr_convex\n";
    }

    est::AutoOptions auto_opts;
    auto_opts.ratios = cfg.ratios;
    auto_opts.threshold = cfg.threshold;
    auto_opts.s1 = cfg.s1;

    for (std::size_t p = 0; p < corpus.size(); ++p) {
        const auto& entry = corpus[p];
        double truth = entry.polygon.perimeter();
        for (int run = 0; run < cfg.runs_per_polygon; ++run) {
            auto rs = simulate_nd(entry.polygon, cfg, run_seed(cfg.seed * 7919u + 1, p, run));
            auto report = est::estimate_auto(rs, cfg.arena, auto_opts);
            double l_convex = est::estimate_convex(rs, cfg.arena).perimeter_hat;
            double ea = (report.perimeter_hat - truth) / truth;
            double ec = (l_convex - truth) / truth;
            auto& g = groups[{entry.vertex_count, entry.convex}];
            g.err_auto.push_back(ea);
            g.err_convex.push_back(ec);
            if (runs_csv.is_open())
                runs_csv << p << ',' << entry.vertex_count << ',' << (entry.convex ? 1 : 0) << ','
                         << run << ',' << csv::fmt(truth) << ',' << csv::fmt(report.perimeter_hat)
                         << ',' << csv::fmt(l_convex) << ',' << csv::fmt(ea) << ',' << csv::fmt(ec)
                         << '\n';
        }
    }

    std::vector<PerimeterRow> rows;
    std::vector<svg::Box> boxes;
    for (const auto& [key, g] : groups) {
        PerimeterRow row;
        row.vertex_count = key.first;
        row.convex_truth = key.second;
        auto ma = mean_sd(g.err_auto);
        auto mc = mean_sd(g.err_convex);
        row.relerr_auto_mean = ma.mean;
        row.relerr_auto_sd = ma.sd;
        row.relerr_convex_mean = mc.mean;
        row.relerr_convex_sd = mc.sd;
        row.runs = static_cast<int>(g.err_auto.size());
        rows.push_back(row);
        std::string tag = std::to_string(key.first) + "v " + (key.second ? "cvx" : "ncvx");
        boxes.push_back({"auto " + tag, g.err_auto});
        boxes.push_back({"mle " + tag, g.err_convex});
    }
    if (!cfg.out_dir.empty()) {
        auto out = open_out(cfg.out_dir, "perimeter_summary.csv");
        out << "n_vertices,convex_truth,runs,relerr_auto_mean,relerr_auto_sd,"
               "relerr_convex_mean,relerr_convex_sd\n";
        for (const auto& row : rows)
            out << row.vertex_count << ',' << (row.convex_truth ? 1 : 0) << ',' << row.runs << ','
                << csv::fmt(row.relerr_auto_mean) << ',' << csv::fmt(row.relerr_auto_sd) << ','
                << csv::fmt(row.relerr_convex_mean) << ',' << csv::fmt(row.relerr_convex_sd)
                << '\n';
        svg::write_box_chart(cfg.out_dir + "/perimeter_relerr.svg",
                             "Perimeter relative error by method", "relative error", boxes);
    }
    return rows;
}

std::vector<SweepRow> rmax_sweep(const geom::Polygon& target, const ExperimentConfig& cfg,
                                 const std::vector<double>& r_max_list,
                                 const std::vector<double>& ratio_grid, int runs) {
    std::vector<SweepRow> rows;
    std::vector<svg::Series> series;
    for (double r_max : r_max_list) {
        ExperimentConfig local = cfg;
        local.arena.r_max = r_max;
        svg::Series s;
        s.label = "r_max=" + csv::fmt(r_max);
        for (double ratio : ratio_grid) {
            std::vector<double> stats;
            for (int run = 0; run < runs; ++run) {
                auto rs = simulate_nd(target, local,
                                      run_seed(cfg.seed * 31 + 5,
                                               static_cast<std::uint64_t>(r_max * 1000.0), run));
                auto verdict = est::convexity_test(rs, local.arena, {ratio}, cfg.threshold);
                stats.push_back(verdict.e_over_sigma.front());
            }
            SweepRow row{r_max, ratio, mean_sd(stats).mean};
            rows.push_back(row);
            s.x.push_back(ratio);
            s.y.push_back(row.mean_e_over_sigma);
        }
        series.push_back(std::move(s));
    }
    if (!cfg.out_dir.empty()) {
        auto out = open_out(cfg.out_dir, "rmax_sweep.csv");
        out << "r_max,ratio,mean_e_over_sigma\n";
        for (const auto& row : rows)
            out << csv::fmt(row.r_max) << ',' << csv::fmt(row.ratio) << ','
                << csv::fmt(row.mean_e_over_sigma) << '\n';
        svg::write_line_chart(cfg.out_dir + "/rmax_sweep.svg", "e(r)/sigma vs r/r_max", "r/r_max",
                              "mean e(r)/sigma", series);
    }
    return rows;
}

std::vector<S1S2Row> s1s2_sweep(const geom::Polygon& target, const ExperimentConfig& cfg,
                                const std::vector<double>& s1_list,
                                const std::vector<double>& s2_list, int runs) {
    double truth = target.perimeter();
    std::vector<sim::ReportSet> sets;
    sets.reserve(runs);
    for (int run = 0; run < runs; ++run)
        sets.push_back(simulate_nd(target, cfg, run_seed(cfg.seed * 131 + 17, 0, run)));

    std::vector<S1S2Row> rows;
    std::vector<svg::Series> series;
    for (double s1 : s1_list) {
        svg::Series s;
        s.label = "s1=" + csv::fmt(s1);
        for (double s2 : s2_list) {
            if (s2 <= s1) continue;
            std::vector<double> errs;
            for (const auto& rs : sets) {
                auto ne = est::estimate_nonconvex(rs, cfg.arena, s1, s2);
                errs.push_back((ne.perimeter_hat - truth) / truth);
            }
            auto ms = mean_sd(errs);
            rows.push_back({s1, s2, ms.mean, ms.sd});
            s.x.push_back(s2);
            s.y.push_back(ms.mean);
        }
        series.push_back(std::move(s));
    }
    std::vector<double> convex_errs;
    for (const auto& rs : sets)
        convex_errs.push_back((est::estimate_convex(rs, cfg.arena).perimeter_hat - truth) / truth);
    auto ms = mean_sd(convex_errs);
    rows.push_back({0.0, 0.0, ms.mean, ms.sd});  // convex-only reference

    if (!cfg.out_dir.empty()) {
        auto out = open_out(cfg.out_dir, "s1s2_sweep.csv");
        out << "s1,s2,relerr_mean,relerr_sd\n";
        for (const auto& row : rows)
            out << csv::fmt(row.s1) << ',' << csv::fmt(row.s2) << ',' << csv::fmt(row.relerr_mean)
                << ',' << csv::fmt(row.relerr_sd) << '\n';
        svg::write_line_chart(cfg.out_dir + "/s1s2_sweep.svg",
                              "Perimeter relative error vs s2 (per s1)", "s2",
                              "mean relative error", series);
    }
    return rows;
}

}  // namespace polysense::exp
