#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "polysense/concave.hpp"
#include "polysense/csv.hpp"
#include "polysense/errors.hpp"
#include "polysense/estimators.hpp"
#include "polysense/experiments.hpp"
#include "polysense/oracle.hpp"
#include "polysense/polygen.hpp"
#include "polysense/simulator.hpp"

namespace fs = std::filesystem;
using namespace polysense;

namespace {

struct CommonOpts {
    std::string polygon_path;
    double omega_w = 50.0, omega_h = 50.0;
    double r_max = 20.0;
    long long ns = 0, nd = 0;
    int epochs = 1;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_dir = ".";
};

analytic::Arena arena_of(const CommonOpts& o) { return {o.omega_w, o.omega_h, o.r_max}; }

void add_omega_option(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option_function<std::string>(
           "--omega",
           [&o](const std::string& v) {
               auto x = v.find('x');
               if (x == std::string::npos)
                   throw CLI::ValidationError("--omega expects WxH, e.g. 50x50");
               o.omega_w = std::stod(v.substr(0, x));
               o.omega_h = std::stod(v.substr(x + 1));
           },
           "Arena size as WxH (default 50x50)");
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_sim) {
    cmd->add_option("--polygon", o.polygon_path, "Polygon file (x,y per line)")->required();
    add_omega_option(cmd, o);
    cmd->add_option("--rmax", o.r_max, "Maximum sensing range (default 20)");
    cmd->add_option("--seed", o.seed, "Random seed (default 1)");
    cmd->add_option("--threads", o.threads, "Worker lanes (default: hardware)");
    cmd->add_option("--out", o.out_dir, "Output directory (default .)");
    if (with_sim) {
        cmd->add_option("--ns", o.ns, "Fixed sensor count per epoch");
        cmd->add_option("--nd", o.nd, "Generate until this many detections");
        cmd->add_option("--epochs", o.epochs, "Sensing epochs (default 1)");
    }
}

sim::ReportSet simulate(const geom::Polygon& poly, const CommonOpts& o) {
    sim::DeploymentConfig cfg;
    cfg.arena = arena_of(o);
    if (o.nd > 0) {
        cfg.mode = sim::DeployMode::detection_count;
        cfg.count = o.nd;
    } else if (o.ns > 0) {
        cfg.mode = sim::DeployMode::sensor_count;
        cfg.count = o.ns;
    } else {
        throw std::invalid_argument("one of --ns or --nd is required");
    }
    cfg.epochs = o.epochs;
    cfg.seed = o.seed;
    auto placed = sim::place_target(poly, cfg.arena);
    return sim::run(placed, cfg, o.threads);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory: " + dir);
}

std::vector<double> parse_grid(const std::string& spec) {
    // lo:hi:step
    auto c1 = spec.find(':');
    auto c2 = spec.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("--grid expects lo:hi:step");
    double lo = std::stod(spec.substr(0, c1));
    double hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    double step = std::stod(spec.substr(c2 + 1));
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("--grid: bad range");
    std::vector<double> grid;
    for (double r = lo; r <= hi + 1e-12; r += step) grid.push_back(r);
    return grid;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Polygon shape estimation from location-unknown distance sensors"};
    app.require_subcommand(1);
    app.set_config("--config");
    app.allow_config_extras(CLI::config_extras_mode::error);

    // --- gen ---
    auto* gen = app.add_subcommand("gen", "Generate a random polygon corpus");
    struct {
        std::vector<int> counts{4, 6, 10};
        int per_count = 20;
        double scale = 9.0;
        std::uint64_t seed = 1;
        std::string out_dir = ".";
    } gen_o;
    gen->add_option("--counts", gen_o.counts, "Vertex counts (default 4 6 10)");
    gen->add_option("--per-count", gen_o.per_count, "Polygons per count (default 20)");
    gen->add_option("--scale", gen_o.scale, "Diameter bound (default 9)");
    gen->add_option("--seed", gen_o.seed, "Random seed");
    gen->add_option("--out", gen_o.out_dir, "Output directory");
    gen->callback([&] {
        ensure_dir(gen_o.out_dir);
        polygen::CorpusSpec spec;
        spec.vertex_counts = gen_o.counts;
        spec.polygons_per_count = gen_o.per_count;
        spec.scale = gen_o.scale;
        spec.seed = gen_o.seed;
        auto corpus = polygen::make_corpus(spec);
        std::ofstream manifest(gen_o.out_dir + "/manifest.csv");
        if (!manifest) throw io_error("cannot write manifest.csv");
        manifest << "file,n_vertices,convex\n";
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "poly_%03zu.csv", i);
            geom::write_polygon_file(gen_o.out_dir + "/" + name, corpus[i].polygon);
            manifest << name << ',' << corpus[i].vertex_count << ','
                     << (corpus[i].convex ? 1 : 0) << '\n';
        }
        std::printf("wrote %zu polygons to %s\n", corpus.size(), gen_o.out_dir.c_str());
    });

    // --- simulate ---
    auto* simulate_cmd = app.add_subcommand("simulate", "Deploy sensors and write a report file");
    CommonOpts sim_o;
    add_common(simulate_cmd, sim_o, true);
    simulate_cmd->callback([&] {
        auto poly = geom::read_polygon_file(sim_o.polygon_path);
        auto rs = simulate(poly, sim_o);
        ensure_dir(sim_o.out_dir);
        sim::write_report_file(sim_o.out_dir + "/report.csv", rs);
        std::printf("n_s=%lld N0=%lld N+=%lld Nmiss=%lld\n", rs.n_s(), rs.n_zero(), rs.n_plus(),
                    rs.n_miss());
    });

    // --- estimate ---
    auto* est_cmd = app.add_subcommand("estimate", "Estimate area/perimeter/convexity");
    CommonOpts est_o;
    add_common(est_cmd, est_o, true);
    struct {
        std::string report_path;
        double s1 = 1.0;
        double s2 = 0.0;  // 0: pilot rule
        std::vector<double> ratios{0.3, 0.5, 0.7};
        double threshold = 2.0;
        long long pilot = 0;
    } est_x;
    est_cmd->get_option("--polygon")->required(false);
    est_cmd->add_option("--report", est_x.report_path, "Reuse an existing report file");
    est_cmd->add_option("--s1", est_x.s1, "First abscissa (default 1)");
    est_cmd->add_option("--s2", est_x.s2, "Second abscissa (default: pilot perimeter/10)");
    est_cmd->add_option("--ratios", est_x.ratios, "Convexity test ratios (default 0.3 0.5 0.7)");
    est_cmd->add_option("--threshold", est_x.threshold, "Convexity threshold (default 2)");
    est_cmd->add_option("--pilot", est_x.pilot, "Pilot sample size for s2 (default: all)");
    est_cmd->callback([&] {
        sim::ReportSet rs({}, arena_of(est_o).r_max);
        if (!est_x.report_path.empty()) {
            rs = sim::read_report_file(est_x.report_path, est_o.r_max);
        } else if (!est_o.polygon_path.empty()) {
            rs = simulate(geom::read_polygon_file(est_o.polygon_path), est_o);
        } else {
            throw std::invalid_argument("estimate needs --polygon or --report");
        }
        est::AutoOptions opts;
        opts.ratios = est_x.ratios;
        opts.threshold = est_x.threshold;
        opts.s1 = est_x.s1;
        if (est_x.s2 > 0.0) opts.s2 = est_x.s2;
        opts.pilot_count = est_x.pilot;
        auto report = est::estimate_auto(rs, arena_of(est_o), opts);
        ensure_dir(est_o.out_dir);
        est::write_estimate_report_file(est_o.out_dir + "/estimate.csv", report);
        std::printf("area_hat=%s perimeter_hat=%s method=%s\n", csv::fmt(report.area_hat).c_str(),
                    csv::fmt(report.perimeter_hat).c_str(),
                    est::method_name(report.method).c_str());
    });

    // --- convexity ---
    auto* cvx_cmd = app.add_subcommand("convexity", "Convexity test only");
    CommonOpts cvx_o;
    add_common(cvx_cmd, cvx_o, true);
    struct {
        std::vector<double> ratios{0.3, 0.5, 0.7};
        double threshold = 2.0;
    } cvx_x;
    cvx_cmd->add_option("--ratios", cvx_x.ratios, "Test ratios (default 0.3 0.5 0.7)");
    cvx_cmd->add_option("--threshold", cvx_x.threshold, "Threshold (default 2)");
    cvx_cmd->callback([&] {
        auto rs = simulate(geom::read_polygon_file(cvx_o.polygon_path), cvx_o);
        auto verdict = est::convexity_test(rs, arena_of(cvx_o), cvx_x.ratios, cvx_x.threshold);
        ensure_dir(cvx_o.out_dir);
        std::ofstream out(cvx_o.out_dir + "/convexity.csv");
        if (!out) throw io_error("cannot write convexity.csv");
        out << "key,value\n";
        for (std::size_t i = 0; i < verdict.ratios.size(); ++i) {
            char key[32];
            std::snprintf(key, sizeof(key), "e_sigma_%03d",
                          static_cast<int>(std::lround(verdict.ratios[i] * 100.0)));
            out << key << ',' << csv::fmt(verdict.e_over_sigma[i]) << '\n';
        }
        out << "convex," << (verdict.non_convex ? "false" : "true") << '\n';
        std::printf("convex=%s\n", verdict.non_convex ? "false" : "true");
    });

    // --- concave ---
    auto* ccv_cmd = app.add_subcommand("concave", "Recover concave vertex parameters");
    CommonOpts ccv_o;
    add_common(ccv_cmd, ccv_o, true);
    struct {
        bool analytic_mode = false;
        int grid_n = 400;
        double s1 = 1.0;
    } ccv_x;
    ccv_cmd->add_flag("--analytic", ccv_x.analytic_mode, "Noiseless run from the exact CDF");
    ccv_cmd->add_option("--grid-n", ccv_x.grid_n, "q-curve grid points (default 400)");
    ccv_cmd->add_option("--s1", ccv_x.s1, "First abscissa for the empirical estimates");
    ccv_cmd->callback([&] {
        auto poly = geom::read_polygon_file(ccv_o.polygon_path);
        auto arena = arena_of(ccv_o);
        ensure_dir(ccv_o.out_dir);
        concave::ConcaveEstimate result;
        if (ccv_x.analytic_mode) {
            std::vector<double> grid;
            for (int j = 1; j <= ccv_x.grid_n; ++j)
                grid.push_back(arena.r_max * static_cast<double>(j) / ccv_x.grid_n);
            concave::write_qcurve_file(ccv_o.out_dir + "/qcurve.csv",
                                       concave::q_analytic_curve(poly, arena, grid));
            result = concave::recover_all_analytic(poly, arena, ccv_x.grid_n);
        } else {
            auto rs = simulate(poly, ccv_o);
            auto auto_report = est::estimate_auto(rs, arena);
            est::NonconvexEstimate base;
            if (auto_report.g1sum_hat) {
                base = {auto_report.perimeter_hat, auto_report.area_hat, *auto_report.g1sum_hat};
            } else {
                double s2 = std::max(2.0 * ccv_x.s1,
                                     std::min(auto_report.perimeter_hat / 10.0, arena.r_max));
                base = est::estimate_nonconvex(rs, arena, ccv_x.s1, s2);
            }
            std::vector<double> grid;
            for (int j = 1; j <= ccv_x.grid_n; ++j)
                grid.push_back(arena.r_max * static_cast<double>(j) / ccv_x.grid_n);
            concave::write_qcurve_file(
                ccv_o.out_dir + "/qcurve.csv",
                concave::q_hat_curve(rs, arena, base.area_hat, base.perimeter_hat,
                                     base.g1sum_hat, grid));
            result = concave::recover_all_empirical(rs, arena, base, ccv_x.grid_n);
        }
        concave::write_concave_estimate_file(ccv_o.out_dir + "/concave.csv", result);
        for (const auto& p : result.pairs)
            std::printf("phi_hat=%s l_hat=%s residual=%s\n", csv::fmt(p.phi_hat).c_str(),
                        csv::fmt(p.l_hat).c_str(), csv::fmt(p.residual).c_str());
        if (!result.failure.empty()) {
            std::fprintf(stderr, "partial recovery: %s\n", result.failure.c_str());
            throw infeasible_error(result.failure);
        }
        std::printf("stages=%d exhausted=%d\n", result.stages_run, result.exhausted ? 1 : 0);
    });

    // --- oracle ---
    auto* orc_cmd = app.add_subcommand("oracle", "Monte Carlo ground-truth CDF");
    CommonOpts orc_o;
    add_common(orc_cmd, orc_o, false);
    struct {
        long long samples = 1000000;
        std::string grid = "1:20:1";
    } orc_x;
    orc_cmd->add_option("--samples", orc_x.samples, "Sample count (default 1e6)");
    orc_cmd->add_option("--grid", orc_x.grid, "r grid as lo:hi:step (default 1:20:1)");
    orc_cmd->callback([&] {
        auto poly = geom::read_polygon_file(orc_o.polygon_path);
        auto arena = arena_of(orc_o);
        auto placed = sim::place_target(poly, arena);
        auto res = oracle::mc_cdf(placed, arena, parse_grid(orc_x.grid), orc_x.samples, orc_o.seed,
                                  orc_o.threads);
        ensure_dir(orc_o.out_dir);
        oracle::write_oracle_result_file(orc_o.out_dir + "/oracle.csv", res);
        std::printf("wrote %zu grid points (n=%lld)\n", res.abscissas.size(), res.sample_count);
    });

    // --- experiment ---
    auto* exp_cmd = app.add_subcommand("experiment", "Reproduce the paper-style experiments");
    struct {
        std::string name;
        std::string polygon_path;
        std::string corpus_dir;
        long long nd = 10000;
        int runs = 5;
        std::uint64_t seed = 1;
        int threads = 0;
        double omega_w = 50.0, omega_h = 50.0, r_max = 20.0;
        std::string out_dir = ".";
    } exp_o;
    exp_cmd->add_option("--name", exp_o.name, "judgment | perimeter | rmax-sweep | s1s2-sweep")
        ->required();
    exp_cmd->add_option("--polygon", exp_o.polygon_path, "Target polygon (sweeps)");
    exp_cmd->add_option("--corpus", exp_o.corpus_dir, "Corpus directory from `gen`");
    exp_cmd->add_option("--nd", exp_o.nd, "Detections per run (default 10000)");
    exp_cmd->add_option("--runs", exp_o.runs, "Runs per polygon (default 5)");
    exp_cmd->add_option("--seed", exp_o.seed, "Random seed");
    exp_cmd->add_option("--threads", exp_o.threads, "Worker lanes");
    exp_cmd->add_option("--rmax", exp_o.r_max, "Maximum sensing range");
    exp_cmd->add_option("--out", exp_o.out_dir, "Output directory");
    exp_cmd->add_option_function<std::string>(
        "--omega",
        [&exp_o](const std::string& v) {
            auto x = v.find('x');
            if (x == std::string::npos) throw CLI::ValidationError("--omega expects WxH");
            exp_o.omega_w = std::stod(v.substr(0, x));
            exp_o.omega_h = std::stod(v.substr(x + 1));
        },
        "Arena size as WxH");
    exp_cmd->callback([&] {
        ensure_dir(exp_o.out_dir);
        exp::ExperimentConfig cfg;
        cfg.arena = {exp_o.omega_w, exp_o.omega_h, exp_o.r_max};
        cfg.n_d = exp_o.nd;
        cfg.runs_per_polygon = exp_o.runs;
        cfg.seed = exp_o.seed;
        cfg.threads = exp_o.threads;
        cfg.out_dir = exp_o.out_dir;

        auto load_corpus = [&]() {
            std::vector<polygen::CorpusEntry> corpus;
            if (exp_o.corpus_dir.empty()) {
                corpus = polygen::make_corpus({});
            } else {
                std::ifstream manifest(exp_o.corpus_dir + "/manifest.csv");
                if (!manifest) throw io_error("cannot open corpus manifest");
                std::string line;
                std::getline(manifest, line);
                while (std::getline(manifest, line)) {
                    if (line.empty()) continue;
                    auto f = csv::split_line(line);
                    polygen::CorpusEntry entry;
                    entry.polygon = geom::read_polygon_file(exp_o.corpus_dir + "/" + f[0]);
                    entry.vertex_count = std::stoi(f[1]);
                    entry.convex = f[2] == "1";
                    corpus.push_back(std::move(entry));
                }
            }
            return corpus;
        };
        auto load_target = [&]() {
            return exp_o.polygon_path.empty() ? exp::paper_quadrangle()
                                              : geom::read_polygon_file(exp_o.polygon_path);
        };

        if (exp_o.name == "judgment") {
            auto rows = exp::judgment_experiment(load_corpus(), cfg);
            for (const auto& row : rows)
                std::printf("n=%d convex=%d misjudgment=%s (%d/%d)\n", row.vertex_count,
                            row.convex_truth ? 1 : 0, csv::fmt(row.ratio).c_str(), row.misjudged,
                            row.runs);
        } else if (exp_o.name == "perimeter") {
            auto rows = exp::perimeter_experiment(load_corpus(), cfg);
            for (const auto& row : rows)
                std::printf("n=%d convex=%d auto=%s+-%s convex-only=%s+-%s\n", row.vertex_count,
                            row.convex_truth ? 1 : 0, csv::fmt(row.relerr_auto_mean).c_str(),
                            csv::fmt(row.relerr_auto_sd).c_str(),
                            csv::fmt(row.relerr_convex_mean).c_str(),
                            csv::fmt(row.relerr_convex_sd).c_str());
        } else if (exp_o.name == "rmax-sweep") {
            auto rows = exp::rmax_sweep(load_target(), cfg, {10.0, 15.0, 20.0},
                                        {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}, 20);
            std::printf("wrote %zu sweep rows\n", rows.size());
        } else if (exp_o.name == "s1s2-sweep") {
            auto rows = exp::s1s2_sweep(load_target(), cfg, {0.5, 1.0, 2.0, 3.0},
                                        {2.0, 3.0, 4.0, 5.0, 6.0, 8.0}, 20);
            std::printf("wrote %zu sweep rows\n", rows.size());
        } else {
            throw std::invalid_argument("unknown experiment: " + exp_o.name);
        }
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const infeasible_error& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 3;
    } catch (const io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
