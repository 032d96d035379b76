#include "csc/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "csc/bench.hpp"
#include "csc/dicod.hpp"
#include "csc/io.hpp"
#include "csc/objective.hpp"
#include "csc/solvers.hpp"

namespace csc {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct GenFlags {
    GenerationSpec spec = desk_spec(0);
    bool paper_scale = false;

    void attach(CLI::App *app) {
        app->add_option("--T", spec.T, "signal length");
        app->add_option("--W", spec.W, "atom width");
        app->add_option("--K", spec.K, "number of atoms");
        app->add_option("--P", spec.P, "channels");
        app->add_option("--rho", spec.rho, "activation probability");
        app->add_option("--sigma", spec.sigma, "activation std");
        app->add_option("--noise-std", spec.noise_std, "noise std");
        app->add_option("--lambda", spec.lambda, "absolute regularization");
        app->add_option("--lambda-scale", spec.lambda_scale,
                        "lambda as a fraction of max |correlate(D, X)| (0 disables)");
        app->add_option("--seed", spec.seed, "RNG seed");
        app->add_flag("--paper-scale", paper_scale, "use the paper-scale dimensions");
    }
    GenerationSpec resolve() const {
        if (!paper_scale) return spec;
        GenerationSpec s = paper_spec(spec.seed);
        return s;
    }
};

Instance load_or_generate(const std::string &signal_path, const std::string &dict_path,
                          const GenFlags &gen, double lambda_flag, double lambda_scale) {
    if (!signal_path.empty() || !dict_path.empty()) {
        if (signal_path.empty() || dict_path.empty())
            throw config_error("need both --signal and --dict (or neither)");
        Instance inst;
        if (signal_path.size() > 4 &&
            signal_path.compare(signal_path.size() - 4, 4, ".csv") == 0) {
            std::ifstream f(signal_path);
            if (!f) throw config_error("cannot open file: " + signal_path);
            inst.x = read_signal_csv(f);
        } else {
            inst.x = load_csc1_signal(signal_path);
        }
        inst.dict = load_csc1_dictionary(dict_path);
        if (lambda_scale > 0.0) {
            double peak = 0.0;
            for (int64_t k = 0; k < inst.dict.num_atoms(); ++k)
                for (double c : correlate(inst.dict.atom(k), inst.x))
                    peak = std::max(peak, std::fabs(c));
            inst.lambda = lambda_scale * peak;
        } else {
            inst.lambda = lambda_flag;
        }
        if (inst.lambda <= 0.0) throw config_error("lambda must be > 0");
        return inst;
    }
    return generate_instance(gen.resolve());
}

void write_file(const std::string &path, const std::function<void(std::ostream &)> &fn) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot write file: " + path);
    fn(f);
}

int do_main(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Convolutional sparse coding solvers and benchmarks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file");

    // generate ---------------------------------------------------------
    auto *gen_cmd = app.add_subcommand("generate", "write a synthetic instance as CSC1 files");
    GenFlags gen_flags;
    gen_flags.attach(gen_cmd);
    std::string gen_out = "instance";
    std::string gen_csv;
    gen_cmd->add_option("--out", gen_out, "output path prefix");
    gen_cmd->add_option("--csv", gen_csv, "also export the signal as CSV");

    // solve ------------------------------------------------------------
    auto *solve_cmd = app.add_subcommand("solve", "run one solver on one instance");
    GenFlags solve_gen;
    solve_gen.attach(solve_cmd);
    std::string solve_signal, solve_dict, solver_name = "greedy";
    std::string trace_out, update_log_out, code_out;
    double solve_lambda = 0.0, solve_lambda_scale = 0.0, solve_eps = 1e-6;
    int64_t solve_m = 4, solve_max_iter = 10'000'000, solve_log_every = 100, solve_dmax = 1;
    int64_t baseline_iters = 100'000;
    uint64_t solve_seed = 0;
    std::string solve_mode = "stepped";
    solve_cmd->add_option("--signal", solve_signal, "CSC1 signal file");
    solve_cmd->add_option("--dict", solve_dict, "CSC1 dictionary file");
    solve_cmd
        ->add_option("--solver", solver_name,
                     "greedy | randomized | seq-dicod | dicod | ista | fista")
        ->check(CLI::IsMember({"greedy", "randomized", "seq-dicod", "dicod", "ista", "fista"}));
    solve_cmd->add_option("--solver-lambda", solve_lambda, "lambda for loaded instances");
    solve_cmd->add_option("--solver-lambda-scale", solve_lambda_scale,
                          "relative lambda for loaded instances");
    solve_cmd->add_option("--eps", solve_eps, "stopping tolerance on |dZ|");
    solve_cmd->add_option("--M", solve_m, "segments / workers");
    solve_cmd->add_option("--max-iter", solve_max_iter, "update budget");
    solve_cmd->add_option("--log-every", solve_log_every, "trajectory stride");
    solve_cmd->add_option("--mode", solve_mode, "dicod runtime: stepped | free")
        ->check(CLI::IsMember({"stepped", "free"}));
    solve_cmd->add_option("--d-max", solve_dmax, "stepped-mode delay bound");
    int64_t solve_max_rounds = 1'000'000'000;
    solve_cmd->add_option("--max-rounds", solve_max_rounds, "dicod round budget");
    solve_cmd->add_option("--solve-seed", solve_seed, "solver RNG seed");
    solve_cmd->add_option("--baseline-iters", baseline_iters, "ista/fista iterations");
    solve_cmd->add_option("--trace", trace_out, "write trajectory CSV");
    solve_cmd->add_option("--update-log", update_log_out, "write update-log CSV");
    solve_cmd->add_option("--code-out", code_out, "write the solution code as CSC1");

    // bench ------------------------------------------------------------
    auto *bench_cmd = app.add_subcommand("bench", "experiment harness");
    bench_cmd->require_subcommand(1);

    auto *cmp_cmd = bench_cmd->add_subcommand("compare", "cost-vs-updates solver comparison");
    GenFlags cmp_gen;
    cmp_gen.attach(cmp_cmd);
    std::string cmp_out = "compare.csv", cmp_svg;
    double cmp_eps = 1e-6;
    int64_t cmp_log_every = 100, cmp_baseline_iters = 100'000;
    uint64_t cmp_seed = 0;
    std::vector<int64_t> cmp_seq_m = {4}, cmp_dicod_m = {4};
    cmp_cmd->add_option("--out", cmp_out, "trajectory CSV path");
    cmp_cmd->add_option("--svg", cmp_svg, "optional SVG plot path");
    cmp_cmd->add_option("--eps", cmp_eps, "stopping tolerance");
    cmp_cmd->add_option("--log-every", cmp_log_every, "trajectory stride");
    cmp_cmd->add_option("--seq-M", cmp_seq_m, "seq-dicod segment counts");
    cmp_cmd->add_option("--dicod-M", cmp_dicod_m, "dicod worker counts (stepped)");
    cmp_cmd->add_option("--baseline-iters", cmp_baseline_iters, "prox baseline budget");
    cmp_cmd->add_option("--run-seed", cmp_seed, "solver RNG seed");

    auto *swp_cmd = bench_cmd->add_subcommand("speedup", "speedup sweep over worker counts");
    GenFlags swp_gen;
    swp_gen.attach(swp_cmd);
    std::string swp_out = "speedup.csv", swp_svg;
    std::vector<int64_t> swp_m = {1, 2, 4};
    int64_t swp_repeats = 5;
    double swp_eps = 1e-6;
    uint64_t swp_seed = 0;
    bool swp_no_wall = false, swp_no_proxy = false;
    swp_cmd->add_option("--out", swp_out, "sweep CSV path");
    swp_cmd->add_option("--svg", swp_svg, "optional SVG plot path");
    swp_cmd->add_option("--M", swp_m, "worker counts");
    swp_cmd->add_option("--repeats", swp_repeats, "runs per M");
    swp_cmd->add_option("--eps", swp_eps, "stopping tolerance");
    swp_cmd->add_option("--run-seed", swp_seed, "solver RNG seed");
    swp_cmd->add_flag("--no-wall-clock", swp_no_wall, "skip free-running wall-clock runs");
    swp_cmd->add_flag("--no-proxy", swp_no_proxy, "skip the update-count proxy");

    // check h1 -----------------------------------------------------------
    auto *check_cmd = app.add_subcommand("check", "hypothesis checks");
    check_cmd->require_subcommand(1);
    auto *h1_cmd = check_cmd->add_subcommand("h1", "dictionary coherence check");
    GenFlags h1_gen;
    h1_gen.attach(h1_cmd);
    std::string h1_dict, h1_csv;
    h1_cmd->add_option("--dict", h1_dict, "CSC1 dictionary file");
    h1_cmd->add_option("--csv", h1_csv, "write the report as CSV");

    // bound --------------------------------------------------------------
    auto *bound_cmd = app.add_subcommand("bound", "theoretical speedup bound table");
    std::vector<int64_t> bound_m = {4};
    std::vector<double> bound_alpha = {0.0};
    bool bound_table = false;
    bound_cmd->add_option("--m", bound_m, "worker counts");
    bound_cmd->add_option("--alpha", bound_alpha, "W/T ratios");
    bound_cmd->add_flag("--table", bound_table,
                        "print the full table with small-alpha expansion values");

    std::vector<const char *> argv;
    argv.push_back("csc");
    for (const std::string &a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    if (*gen_cmd) {
        const GenerationSpec spec = gen_flags.resolve();
        const Instance inst = generate_instance(spec);
        save_csc1(gen_out + "_signal.csc1", inst.x);
        save_csc1(gen_out + "_dict.csc1", inst.dict);
        save_csc1(gen_out + "_code.csc1", inst.z_true);
        if (!gen_csv.empty())
            write_file(gen_csv, [&](std::ostream &f) { write_signal_csv(f, inst.x); });
        out << "wrote " << gen_out << "_{signal,dict,code}.csc1  T=" << inst.x.length()
            << " P=" << inst.x.channels() << " K=" << inst.dict.num_atoms()
            << " W=" << inst.dict.width() << " lambda=" << fmt(inst.lambda) << "\n";
        return 0;
    }

    if (*solve_cmd) {
        const Instance inst = load_or_generate(solve_signal, solve_dict, solve_gen,
                                               solve_lambda, solve_lambda_scale);
        SolveTrace trace;
        SparseCode code;
        UpdateLog log;
        if (solver_name == "dicod") {
            DicodConfig c;
            c.lambda = inst.lambda;
            c.eps = solve_eps;
            c.M = solve_m;
            c.mode = solve_mode == "free" ? DicodMode::free_running : DicodMode::stepped;
            c.seed = solve_seed;
            c.d_max = solve_dmax;
            c.log_every = solve_log_every;
            c.max_rounds = solve_max_rounds;
            DicodResult res = dicod_solve(inst.x, inst.dict, c);
            trace = std::move(res.trace);
            code = std::move(res.code);
            log = std::move(res.log);
            out << "interference: pairs=" << res.stats.interfering_pairs
                << " border_updates=" << res.stats.border_updates
                << " rounds=" << res.stats.parallel_rounds << "\n";
        } else if (solver_name == "ista" || solver_name == "fista") {
            auto [c, t] = prox_gradient_baseline(inst.x, inst.dict, inst.lambda,
                                                 baseline_iters, solver_name == "fista",
                                                 solve_log_every);
            code = std::move(c);
            trace = std::move(t);
        } else {
            SolverConfig c;
            c.lambda = inst.lambda;
            c.eps = solve_eps;
            c.max_iter = solve_max_iter;
            c.seed = solve_seed;
            c.log_every = solve_log_every;
            c.segments = solve_m;
            std::pair<SparseCode, SolveTrace> res;
            if (solver_name == "greedy") {
                c.strategy = Strategy::greedy;
                res = greedy_cd(inst.x, inst.dict, c, &log);
            } else if (solver_name == "randomized") {
                c.strategy = Strategy::randomized;
                res = randomized_cd(inst.x, inst.dict, c, &log);
            } else {
                c.strategy = Strategy::seq_dicod;
                res = seq_dicod(inst.x, inst.dict, c, &log);
            }
            code = std::move(res.first);
            trace = std::move(res.second);
        }
        out << "solver=" << solver_name << " updates=" << trace.iterations
            << " converged=" << (trace.converged ? "yes" : "no")
            << " final_cost=" << fmt(trace.trajectory.back().cost)
            << " final_max_dz=" << fmt(trace.final_max_dz) << "\n";
        if (!trace_out.empty()) {
            std::vector<TrajectoryRow> rows;
            for (const TracePoint &p : trace.trajectory)
                rows.push_back({solver_name, p.iteration, p.seconds, p.cost});
            write_file(trace_out, [&](std::ostream &f) { write_trajectory_csv(f, rows); });
        }
        if (!update_log_out.empty())
            write_file(update_log_out,
                       [&](std::ostream &f) { write_update_log_csv(f, log); });
        if (!code_out.empty()) save_csc1(code_out, code);
        return 0;
    }

    if (*cmp_cmd) {
        const Instance inst = generate_instance(cmp_gen.resolve());
        CompareConfig cfg;
        cfg.eps = cmp_eps;
        cfg.seed = cmp_seed;
        cfg.log_every = cmp_log_every;
        cfg.seq_m = cmp_seq_m;
        cfg.dicod_m = cmp_dicod_m;
        cfg.baseline_iters = cmp_baseline_iters;
        const ExperimentReport report = run_comparison(inst, cfg);
        write_file(cmp_out,
                   [&](std::ostream &f) { write_trajectory_csv(f, report.trajectories); });
        for (const auto &[name, c] : report.final_costs)
            out << name << ": final_cost=" << fmt(c)
                << (report.converged.at(name) ? "" : " (not converged)") << "\n";
        for (const std::string &w : report.warnings) err << "warning: " << w << "\n";
        if (!cmp_svg.empty()) {
            std::vector<PlotSeries> series;
            for (const auto &[name, c] : report.final_costs) {
                PlotSeries s;
                s.label = name;
                for (const TrajectoryRow &r : report.trajectories)
                    if (r.solver == name)
                        s.points.push_back({double(r.updates), r.cost});
                series.push_back(std::move(s));
            }
            write_file(cmp_svg, [&](std::ostream &f) {
                write_svg_plot(f, series, "cost vs coordinate updates", "updates", "cost");
            });
        }
        return 0;
    }

    if (*swp_cmd) {
        SweepConfig cfg;
        cfg.m_values = swp_m;
        cfg.repeats = swp_repeats;
        cfg.eps = swp_eps;
        cfg.seed = swp_seed;
        cfg.wall_clock = !swp_no_wall;
        cfg.proxy = !swp_no_proxy;
        const ExperimentReport report = run_speedup_sweep(swp_gen.resolve(), cfg);
        write_file(swp_out, [&](std::ostream &f) { write_sweep_csv(f, report.sweep); });
        out << "alpha=" << fmt(report.alpha)
            << " predicted transition near M=" << fmt(report.transition_m) << "\n";
        if (report.warm_median_m1 > 0.0)
            out << "median warm-start solve time at M=1 (spawn and init excluded): "
                << fmt(report.warm_median_m1) << "s\n";
        for (const ProxyRow &p : report.proxies)
            out << "M=" << p.M << " update-count speedup proxy=" << fmt(p.proxy)
                << " (cd_updates=" << p.cd_updates << ", rounds=" << p.dicod_rounds << ")\n";
        for (const std::string &w : report.warnings) err << "warning: " << w << "\n";
        if (!swp_svg.empty()) {
            PlotSeries measured{"median speedup", {}}, bound{"theoretical bound", {}};
            std::map<int64_t, std::vector<double>> by_m;
            std::map<int64_t, double> bound_by_m;
            for (const SweepRow &r : report.sweep) {
                by_m[r.M].push_back(r.speedup);
                bound_by_m[r.M] = r.bound;
            }
            double peak = 1.0;
            for (auto &[m, v] : by_m) {
                std::sort(v.begin(), v.end());
                measured.points.push_back({double(m), v[v.size() / 2]});
                bound.points.push_back({double(m), bound_by_m[m]});
                peak = std::max({peak, v[v.size() / 2], bound_by_m[m]});
            }
            std::vector<PlotSeries> series = {measured, bound};
            const double last_m = measured.points.back().first;
            if (report.transition_m <= last_m) // mark where alpha M = 1/2
                series.push_back({"alpha M = 1/2",
                                  {{report.transition_m, 0.0}, {report.transition_m, peak}}});
            write_file(swp_svg, [&](std::ostream &f) {
                write_svg_plot(f, series, "speedup vs workers", "M", "speedup");
            });
        }
        return 0;
    }

    if (*h1_cmd) {
        Dictionary dict;
        if (!h1_dict.empty()) {
            dict = load_csc1_dictionary(h1_dict);
        } else {
            dict = generate_instance(h1_gen.resolve()).dict;
        }
        const H1Report report = check_h1(dict);
        out << "H1 " << (report.holds ? "holds" : "violated")
            << ": worst coherence=" << fmt(report.worst_coherence) << " at (k0="
            << report.worst_k0 << ", k1=" << report.worst_k1 << ", lag=" << report.worst_lag
            << ")\n";
        if (!h1_csv.empty())
            write_file(h1_csv, [&](std::ostream &f) { write_h1_csv(f, report); });
        return 0;
    }

    if (*bound_cmd) {
        for (int64_t m : bound_m) {
            for (double a : bound_alpha) {
                const SpeedupBound b = theoretical_speedup_bound(m, a);
                if (bound_table) {
                    out << "M=" << m << " alpha=" << fmt(a) << " bound=" << fmt(b.value)
                        << " expansion=" << fmt(b.expansion)
                        << (b.hypothesis_ok ? "" : " (hypothesis alpha*M < 1/4 violated)")
                        << "\n";
                } else {
                    out << fmt(b.value) << "\n";
                }
            }
        }
        return 0;
    }

    return 0;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
    try {
        return do_main(std::move(args), out, err);
    } catch (const config_error &e) {
        err << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const dimension_error &e) {
        err << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const protocol_error &e) {
        err << "protocol violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace csc
