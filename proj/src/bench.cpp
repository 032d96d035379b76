#include "csc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace csc {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n == 0 ? 0.0 : (n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]));
}

} // namespace

GenerationSpec desk_spec(uint64_t seed) {
    GenerationSpec s;
    s.W = 20;
    s.K = 10;
    s.P = 3;
    s.T = 300 * s.W;
    // lambda = 1 as at paper scale; desk_instance() falls back to a
    // relative lambda if that ever degenerates.
    s.lambda = 1.0;
    s.lambda_scale = 0.0;
    s.seed = seed;
    return s;
}

Instance desk_instance(uint64_t seed) {
    Instance inst = generate_instance(desk_spec(seed));
    // lambda = 1 gives a ~13% solution support at these dimensions, so the
    // relative fallback only needs to cover the fully-empty corner where
    // even the strongest correlation is thresholded away.
    double peak = 0.0;
    for (int64_t k = 0; k < inst.dict.num_atoms(); ++k)
        for (double c : correlate(inst.dict.atom(k), inst.x))
            peak = std::max(peak, std::fabs(c));
    if (peak <= inst.lambda) inst.lambda = 0.1 * peak;
    return inst;
}

GenerationSpec paper_spec(uint64_t seed) {
    GenerationSpec s;
    s.W = 200;
    s.K = 25;
    s.P = 7;
    s.T = 600 * s.W;
    s.lambda = 1.0;
    s.lambda_scale = 0.0;
    s.seed = seed;
    return s;
}

Instance generate_instance(const GenerationSpec &spec) {
    if (spec.T < spec.W) throw config_error("generate: need W <= T");
    if (spec.rho < 0.0 || spec.rho >= 1.0) throw config_error("generate: need 0 <= rho < 1");
    if (spec.K < 1 || spec.P < 1 || spec.W < 1) throw config_error("generate: bad dims");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Atom> atoms;
    atoms.reserve(size_t(spec.K));
    for (int64_t k = 0; k < spec.K; ++k) {
        Atom a(spec.W, spec.P);
        double n2 = 0.0;
        for (double &v : a.raw()) {
            v = gauss(rng);
            n2 += v * v;
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (double &v : a.raw()) v *= inv;
        atoms.push_back(std::move(a));
    }
    Dictionary dict(std::move(atoms));

    const int64_t L = spec.T - spec.W + 1;
    SparseCode z_true(spec.K, L);
    for (double &v : z_true.raw())
        if (unit(rng) < spec.rho) v = spec.sigma * gauss(rng);

    Signal x = reconstruct(z_true, dict);
    if (spec.noise_std > 0.0)
        for (double &v : x.raw()) v += spec.noise_std * gauss(rng);

    double lambda = spec.lambda;
    if (spec.lambda_scale > 0.0) {
        double peak = 0.0;
        for (int64_t k = 0; k < spec.K; ++k)
            for (double c : correlate(dict.atom(k), x)) peak = std::max(peak, std::fabs(c));
        lambda = spec.lambda_scale * peak;
    }
    if (lambda <= 0.0) throw config_error("generate: lambda must end up > 0");
    return {std::move(x), std::move(dict), std::move(z_true), lambda};
}

SpeedupBound theoretical_speedup_bound(int64_t M, double alpha) {
    if (M < 1) throw config_error("speedup bound: M must be >= 1");
    if (alpha < 0.0) throw config_error("speedup bound: alpha must be >= 0");
    const double m = double(M);
    const double a2m2 = 2.0 * alpha * alpha * m * m;
    SpeedupBound b;
    b.value = m * m * (1.0 - a2m2 * std::pow(1.0 + a2m2, 0.5 * m - 1.0));
    b.expansion = m * m * (1.0 - a2m2);
    b.hypothesis_ok = alpha * m < 0.25;
    return b;
}

std::vector<ReplayPoint> replay_cost_curve(const Signal &x, const Dictionary &dict,
                                           double lambda, const UpdateLog &log,
                                           const std::vector<double> *seconds,
                                           int64_t checkpoints, double stop_below) {
    const int64_t K = dict.num_atoms();
    const int64_t L = x.length() - dict.width() + 1;
    SparseCode z(K, L);
    std::vector<ReplayPoint> curve;
    curve.push_back({0, 0, 0.0, cost(x, dict, z, lambda)});
    if (log.empty()) return curve;
    const int64_t n = int64_t(log.size());
    const int64_t stride = std::max<int64_t>(1, n / std::max<int64_t>(1, checkpoints));
    for (int64_t i = 0; i < n; ++i) {
        const UpdateRecord &row = log[size_t(i)];
        z.at(row.k, row.t) = row.new_value;
        if ((i + 1) % stride == 0 || i + 1 == n) {
            curve.push_back({i + 1, row.round,
                             seconds ? (*seconds)[size_t(i)] : 0.0,
                             cost(x, dict, z, lambda)});
            if (curve.back().cost <= stop_below) break;
        }
    }
    return curve;
}

double seconds_to_reach(const std::vector<ReplayPoint> &curve, double target) {
    for (const ReplayPoint &p : curve)
        if (p.cost <= target) return p.seconds;
    return std::numeric_limits<double>::infinity();
}

int64_t rounds_to_reach(const std::vector<ReplayPoint> &curve, double target) {
    for (const ReplayPoint &p : curve)
        if (p.cost <= target) return p.round;
    return -1;
}

int64_t updates_to_reach(const std::vector<ReplayPoint> &curve, double target) {
    for (const ReplayPoint &p : curve)
        if (p.cost <= target) return p.updates;
    return -1;
}

namespace {

void append_trajectory(ExperimentReport &report, const std::string &name,
                       const SolveTrace &trace) {
    for (const TracePoint &p : trace.trajectory)
        report.trajectories.push_back({name, p.iteration, p.seconds, p.cost});
    report.final_costs[name] = trace.trajectory.back().cost;
    report.converged[name] = trace.converged;
    if (!trace.converged)
        report.warnings.push_back("solver " + name + " did not converge");
}

} // namespace

ExperimentReport run_comparison(const Instance &inst, const CompareConfig &cfg) {
    ExperimentReport report;
    report.e0 = cost(inst.x, inst.dict, SparseCode(inst.dict.num_atoms(),
                                                   inst.x.length() - inst.dict.width() + 1),
                     inst.lambda);

    SolverConfig base;
    base.lambda = inst.lambda;
    base.eps = cfg.eps;
    base.max_iter = cfg.max_iter;
    base.seed = cfg.seed;
    base.log_every = cfg.log_every;

    if (cfg.greedy) {
        SolverConfig c = base;
        c.strategy = Strategy::greedy;
        append_trajectory(report, "greedy", greedy_cd(inst.x, inst.dict, c).second);
    }
    if (cfg.randomized) {
        SolverConfig c = base;
        c.strategy = Strategy::randomized;
        append_trajectory(report, "randomized", randomized_cd(inst.x, inst.dict, c).second);
    }
    for (int64_t m : cfg.seq_m) {
        SolverConfig c = base;
        c.strategy = Strategy::seq_dicod;
        c.segments = m;
        append_trajectory(report, "seq-dicod-" + std::to_string(m),
                          seq_dicod(inst.x, inst.dict, c).second);
    }
    for (int64_t m : cfg.dicod_m) {
        DicodConfig c;
        c.lambda = inst.lambda;
        c.eps = cfg.eps;
        c.M = m;
        c.mode = DicodMode::stepped;
        c.seed = cfg.seed;
        const DicodResult res = dicod_solve(inst.x, inst.dict, c);
        const std::string name = "dicod-" + std::to_string(m);
        append_trajectory(report, name, res.trace);
        report.stats[name] = res.stats;
    }
    if (cfg.baseline_iters > 0) {
        append_trajectory(report, cfg.baseline_accel ? "fista" : "ista",
                          prox_gradient_baseline(inst.x, inst.dict, inst.lambda,
                                                 cfg.baseline_iters, cfg.baseline_accel,
                                                 cfg.log_every)
                              .second);
    }
    return report;
}

ExperimentReport run_speedup_sweep(const GenerationSpec &spec, const SweepConfig &cfg) {
    ExperimentReport report;
    report.alpha = double(spec.W) / double(spec.T);
    report.transition_m = 0.5 / report.alpha;

    const unsigned hw = std::thread::hardware_concurrency();
    for (int64_t m : cfg.m_values)
        if (cfg.wall_clock && hw > 0 && uint64_t(m) > hw)
            report.warnings.push_back("M=" + std::to_string(m) +
                                      " oversubscribes " + std::to_string(hw) +
                                      "-way hardware");

    std::vector<std::vector<double>> seconds_by_m(cfg.m_values.size());
    std::vector<double> warm_m1;
    std::vector<double> base_seconds;

    if (cfg.wall_clock) {
        for (int64_t run = 0; run < cfg.repeats; ++run) {
            GenerationSpec gs = spec;
            gs.seed = spec.seed + uint64_t(run);
            const Instance inst = generate_instance(gs);
            const double e0 = cost(inst.x, inst.dict,
                                   SparseCode(inst.dict.num_atoms(),
                                              inst.x.length() - inst.dict.width() + 1),
                                   inst.lambda);

            DicodConfig ref;
            ref.lambda = inst.lambda;
            ref.eps = cfg.eps;
            ref.M = 1;
            ref.mode = DicodMode::free_running;
            ref.seed = cfg.seed;
            const DicodResult res1 = dicod_solve(inst.x, inst.dict, ref);
            const double target =
                res1.trace.trajectory.back().cost + 1e-3 * e0;
            const auto curve1 = replay_cost_curve(inst.x, inst.dict, inst.lambda, res1.log,
                                                  &res1.update_seconds, 256);
            const double t1 = seconds_to_reach(curve1, target);
            warm_m1.push_back(res1.seconds_after_init);

            for (size_t mi = 0; mi < cfg.m_values.size(); ++mi) {
                const int64_t m = cfg.m_values[size_t(mi)];
                if (m == 1) {
                    seconds_by_m[mi].push_back(t1);
                    continue;
                }
                DicodConfig dc = ref;
                dc.M = m;
                const DicodResult res = dicod_solve(inst.x, inst.dict, dc);
                const auto curve = replay_cost_curve(inst.x, inst.dict, inst.lambda,
                                                     res.log, &res.update_seconds, 256);
                seconds_by_m[mi].push_back(seconds_to_reach(curve, target));
            }
            base_seconds.push_back(t1);
        }
        const double t1_median = median(base_seconds);
        report.warm_median_m1 = median(warm_m1);
        for (size_t mi = 0; mi < cfg.m_values.size(); ++mi) {
            const int64_t m = cfg.m_values[mi];
            const SpeedupBound bound = theoretical_speedup_bound(m, report.alpha);
            // speedup is the ratio of medians, so M = 1 is exactly 1
            const double med = median(seconds_by_m[mi]);
            const double speedup = m == 1 ? 1.0 : t1_median / med;
            for (int64_t run = 0; run < int64_t(seconds_by_m[mi].size()); ++run)
                report.sweep.push_back(
                    {m, run, seconds_by_m[mi][size_t(run)], speedup, bound.value});
        }
    }

    if (cfg.proxy) {
        GenerationSpec gs = spec;
        const Instance inst = generate_instance(gs);
        const double e0 = cost(inst.x, inst.dict,
                               SparseCode(inst.dict.num_atoms(),
                                          inst.x.length() - inst.dict.width() + 1),
                               inst.lambda);
        SolverConfig gc;
        gc.lambda = inst.lambda;
        gc.eps = cfg.eps;
        gc.strategy = Strategy::greedy;
        gc.seed = cfg.seed;
        UpdateLog greedy_log;
        const auto greedy_run = greedy_cd(inst.x, inst.dict, gc, &greedy_log);
        const double target = greedy_run.second.trajectory.back().cost + 1e-3 * e0;
        const auto greedy_curve =
            replay_cost_curve(inst.x, inst.dict, inst.lambda, greedy_log, nullptr, 256);
        const int64_t n_cd = updates_to_reach(greedy_curve, target);

        for (int64_t m : cfg.m_values) {
            if (m == 1) {
                report.proxies.push_back({1, 1.0, n_cd, n_cd});
                continue;
            }
            DicodConfig dc;
            dc.lambda = inst.lambda;
            dc.eps = cfg.eps;
            dc.M = m;
            dc.mode = DicodMode::stepped;
            dc.seed = cfg.seed;
            const DicodResult res = dicod_solve(inst.x, inst.dict, dc);
            const auto curve = replay_cost_curve(inst.x, inst.dict, inst.lambda, res.log,
                                                 nullptr, 256);
            const int64_t rounds = rounds_to_reach(curve, target);
            const double proxy =
                rounds > 0 ? double(m) * double(n_cd) / double(rounds) : 0.0;
            report.proxies.push_back({m, proxy, n_cd, rounds});
            report.stats["dicod-" + std::to_string(m)] = res.stats;
        }
        report.e0 = e0;
        report.target = target;
    }
    return report;
}

void write_trajectory_csv(std::ostream &out, const std::vector<TrajectoryRow> &rows) {
    out << "solver,updates,seconds,cost\n";
    for (const TrajectoryRow &r : rows)
        out << r.solver << ',' << r.updates << ',' << fmt(r.seconds) << ',' << fmt(r.cost)
            << "\n";
}

void write_sweep_csv(std::ostream &out, const std::vector<SweepRow> &rows) {
    out << "M,run,seconds,speedup,bound\n";
    for (const SweepRow &r : rows)
        out << r.M << ',' << r.run << ',' << fmt(r.seconds) << ',' << fmt(r.speedup) << ','
            << fmt(r.bound) << "\n";
}

void write_update_log_csv(std::ostream &out, const UpdateLog &log) {
    out << "round,worker,k,t,old,new,interfering\n";
    for (const UpdateRecord &r : log)
        out << r.round << ',' << r.worker << ',' << r.k << ',' << r.t << ','
            << fmt(r.old_value) << ',' << fmt(r.new_value) << ',' << (r.interfering ? 1 : 0)
            << "\n";
}

UpdateLog read_update_log_csv(std::istream &in) {
    UpdateLog log;
    std::string line;
    if (!std::getline(in, line)) throw config_error("update log: empty file");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        UpdateRecord r;
        std::getline(row, cell, ',');
        r.round = std::stoll(cell);
        std::getline(row, cell, ',');
        r.worker = std::stoll(cell);
        std::getline(row, cell, ',');
        r.k = std::stoll(cell);
        std::getline(row, cell, ',');
        r.t = std::stoll(cell);
        std::getline(row, cell, ',');
        r.old_value = std::stod(cell);
        std::getline(row, cell, ',');
        r.new_value = std::stod(cell);
        if (!std::getline(row, cell, ',')) throw config_error("update log: short row");
        r.interfering = cell == "1";
        log.push_back(r);
    }
    return log;
}

void write_h1_csv(std::ostream &out, const H1Report &report) {
    out << "holds,worst_k0,worst_k1,worst_lag,worst_coherence\n";
    out << (report.holds ? 1 : 0) << ',' << report.worst_k0 << ',' << report.worst_k1 << ','
        << report.worst_lag << ',' << fmt(report.worst_coherence) << "\n";
}

void write_svg_plot(std::ostream &out, const std::vector<PlotSeries> &series,
                    const std::string &title, const std::string &xlabel,
                    const std::string &ylabel) {
    const double width = 720, height = 480;
    const double ml = 70, mr = 160, mt = 40, mb = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const PlotSeries &s : series)
        for (const auto &[px, py] : s.points) {
            xmin = std::min(xmin, px);
            xmax = std::max(xmax, px);
            ymin = std::min(ymin, py);
            ymax = std::max(ymax, py);
        }
    if (!(xmin < xmax)) xmax = xmin + 1.0;
    if (!(ymin < ymax)) ymax = ymin + 1.0;
    const auto sx = [&](double v) {
        return ml + (v - xmin) / (xmax - xmin) * (width - ml - mr);
    };
    const auto sy = [&](double v) {
        return height - mb - (v - ymin) / (ymax - ymin) * (height - mt - mb);
    };
    static const char *colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\">" << title
        << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << (mt + height - mb) / 2
        << ")\">" << ylabel << "</text>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double fx = xmin + tick * (xmax - xmin) / 4;
        const double fy = ymin + tick * (ymax - ymin) / 4;
        out << "<text x=\"" << sx(fx) << "\" y=\"" << height - mb + 16
            << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(fx) << "</text>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << sy(fy) + 4
            << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(fy) << "</text>\n";
    }
    size_t ci = 0;
    for (const PlotSeries &s : series) {
        const char *color = colors[ci % 8];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (const auto &[px, py] : s.points) out << sx(px) << ',' << sy(py) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << width - mr + 12 << "\" y=\"" << mt + 16 * double(ci) + 8
            << "\" font-size=\"11\" fill=\"" << color << "\">" << s.label << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

} // namespace csc
