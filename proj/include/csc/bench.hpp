//
// Synthetic experiment harness: signal generation, solver comparison,
// speedup measurement, the closed-form speedup bound, and CSV/SVG report
// emission.
//
#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "csc/dicod.hpp"
#include "csc/signal.hpp"
#include "csc/solvers.hpp"

namespace csc {

struct GenerationSpec {
    int64_t T = 6000, W = 20, K = 10, P = 3;
    double rho = 0.007;       // Bernoulli activation probability
    double sigma = 10.0;      // activation standard deviation
    double noise_std = 1.0;
    double lambda = 1.0;      // absolute lambda, used when lambda_scale <= 0
    double lambda_scale = 0.1; // if > 0: lambda = scale * max |correlate(D, X)|
    uint64_t seed = 0;
};

// Paper-scale dimensions (minutes-to-hours runs); desk scale is the default.
GenerationSpec desk_spec(uint64_t seed);
GenerationSpec paper_spec(uint64_t seed);

struct Instance {
    Signal x;
    Dictionary dict;
    SparseCode z_true;
    double lambda = 1.0;
};

Instance generate_instance(const GenerationSpec &spec);

// Desk-scale instance with the paper's lambda = 1, retuned to
// 0.1 * max |correlate(D, X)| only if that leaves the problem degenerate.
Instance desk_instance(uint64_t seed);

struct SpeedupBound {
    double value = 0.0;      // M^2 (1 - 2 a^2 M^2 (1 + 2 a^2 M^2)^(M/2 - 1))
    double expansion = 0.0;  // small-alpha form M^2 (1 - 2 a^2 M^2)
    bool hypothesis_ok = true; // alpha * M < 1/4
};

SpeedupBound theoretical_speedup_bound(int64_t M, double alpha);

// Post-hoc cost trajectory: replays an update log against Z = 0 and
// evaluates the exact objective at ~checkpoints evenly spaced update counts.
struct ReplayPoint {
    int64_t updates = 0;
    int64_t round = 0;
    double seconds = 0.0;
    double cost = 0.0;
};

// stop_below, when finite, ends the replay at the first checkpoint whose
// cost reaches it (only the crossing matters for reach-target queries).
std::vector<ReplayPoint> replay_cost_curve(const Signal &x, const Dictionary &dict,
                                           double lambda, const UpdateLog &log,
                                           const std::vector<double> *seconds,
                                           int64_t checkpoints,
                                           double stop_below = -1e300);

// First checkpoint at or below target; +inf / -1 when never reached.
double seconds_to_reach(const std::vector<ReplayPoint> &curve, double target);
int64_t rounds_to_reach(const std::vector<ReplayPoint> &curve, double target);
int64_t updates_to_reach(const std::vector<ReplayPoint> &curve, double target);

struct TrajectoryRow {
    std::string solver;
    int64_t updates = 0;
    double seconds = 0.0;
    double cost = 0.0;
};

struct SweepRow {
    int64_t M = 0;
    int64_t run = 0;
    double seconds = 0.0;
    double speedup = 0.0;
    double bound = 0.0;
};

// Machine-independent speedup proxy: M * (greedy updates to target) /
// (stepped parallel rounds to target).
struct ProxyRow {
    int64_t M = 0;
    double proxy = 0.0;
    int64_t cd_updates = 0;
    int64_t dicod_rounds = 0;
};

struct ExperimentReport {
    std::vector<TrajectoryRow> trajectories;
    std::map<std::string, double> final_costs;
    std::map<std::string, bool> converged;
    std::vector<SweepRow> sweep;
    std::vector<ProxyRow> proxies;
    std::map<std::string, InterferenceStats> stats;
    std::vector<std::string> warnings;
    double e0 = 0.0;
    double target = 0.0;
    double alpha = 0.0;
    double transition_m = 0.0; // alpha M = 1/2
    double warm_median_m1 = 0.0, warm_median_m = 0.0;
};

struct CompareConfig {
    double eps = 1e-6;
    int64_t max_iter = 10'000'000;
    uint64_t seed = 0;
    int64_t log_every = 100;
    bool greedy = true;
    bool randomized = true;
    std::vector<int64_t> seq_m = {4};
    std::vector<int64_t> dicod_m = {4};
    int64_t baseline_iters = 100'000;
    bool baseline_accel = true;
};

ExperimentReport run_comparison(const Instance &inst, const CompareConfig &cfg);

struct SweepConfig {
    std::vector<int64_t> m_values = {1, 2, 4};
    int64_t repeats = 5;
    double eps = 1e-6;
    uint64_t seed = 0;
    bool wall_clock = true;  // free-running wall-clock runs
    bool proxy = true;       // stepped update-count proxy
};

ExperimentReport run_speedup_sweep(const GenerationSpec &spec, const SweepConfig &cfg);

// CSV emission. Doubles are printed round-trippably (%.17g).
void write_trajectory_csv(std::ostream &out, const std::vector<TrajectoryRow> &rows);
void write_sweep_csv(std::ostream &out, const std::vector<SweepRow> &rows);
void write_update_log_csv(std::ostream &out, const UpdateLog &log);
UpdateLog read_update_log_csv(std::istream &in);
void write_h1_csv(std::ostream &out, const H1Report &report);

// Minimal SVG line plot: axes, legend, one polyline per series.
struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

void write_svg_plot(std::ostream &out, const std::vector<PlotSeries> &series,
                    const std::string &title, const std::string &xlabel,
                    const std::string &ylabel);

} // namespace csc
