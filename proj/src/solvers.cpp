#include "csc/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace csc {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

void validate_common(const Signal &x, const Dictionary &dict, const SolverConfig &cfg) {
    if (cfg.lambda <= 0.0) throw config_error("solver: lambda must be > 0");
    if (cfg.eps <= 0.0) throw config_error("solver: eps must be > 0");
    if (cfg.max_iter < 1) throw config_error("solver: max_iter must be >= 1");
    if (cfg.log_every < 1) throw config_error("solver: log_every must be >= 1");
    if (x.channels() != dict.channels())
        throw dimension_error("solver: signal/dictionary channel mismatch");
    if (x.length() < dict.width())
        throw dimension_error("solver: signal shorter than atoms");
}

struct TraceRecorder {
    const Signal &x;
    const Dictionary &dict;
    double lambda;
    int64_t log_every;
    clock_type::time_point start = clock_type::now();
    SolveTrace trace;

    void checkpoint(const SparseCode &code) {
        trace.trajectory.push_back(
            {trace.iterations, seconds_since(start), cost(x, dict, code, lambda)});
    }
    void maybe_checkpoint(const SparseCode &code) {
        if (trace.iterations % log_every == 0) checkpoint(code);
    }
};

void log_update(UpdateLog *log, int64_t round, int64_t worker,
                const CoordinateUpdate &upd) {
    if (log)
        log->push_back({round, worker, upd.k0, upd.t0, upd.old_value, upd.new_value, false});
}

} // namespace

Candidate scan_segment(const BetaState &beta, const SparseCode &code,
                       const std::vector<double> &sq_norms, double lambda,
                       int64_t t_lo, int64_t t_hi, int64_t *evals) {
    const int64_t K = beta.num_atoms();
    const int64_t L = beta.length();
    Candidate best;
    for (int64_t k = 0; k < K; ++k) {
        const double *brow = beta.raw().data() + size_t(k * L);
        const double *zrow = code.raw().data() + size_t(k * L);
        const double inv_n2 = 1.0 / sq_norms[size_t(k)];
        for (int64_t t = t_lo; t <= t_hi; ++t) {
            const double target = soft_threshold(brow[t], lambda) * inv_n2;
            const double adz = std::fabs(zrow[t] - target);
            if (adz > best.adz) best = {k, t, target, adz};
        }
    }
    if (evals) *evals += K * (t_hi - t_lo + 1);
    return best;
}

ArgmaxScanner::ArgmaxScanner(int64_t L, int64_t block_size) {
    if (block_size < 1) block_size = 1;
    for (int64_t lo = 0; lo < L; lo += block_size) {
        Block b;
        b.lo = lo;
        b.hi = std::min(L - 1, lo + block_size - 1);
        blocks_.push_back(b);
    }
}

void ArgmaxScanner::invalidate(int64_t t_lo, int64_t t_hi) {
    for (Block &b : blocks_) {
        if (b.hi >= t_lo && b.lo <= t_hi) b.dirty = true;
    }
}

Candidate ArgmaxScanner::best(const BetaState &beta, const SparseCode &code,
                              const std::vector<double> &sq_norms, double lambda,
                              int64_t *evals) {
    Candidate best;
    for (Block &b : blocks_) {
        if (b.dirty) {
            b.cached = scan_segment(beta, code, sq_norms, lambda, b.lo, b.hi, evals);
            b.dirty = false;
        }
        if (b.cached.improves_on(best)) best = b.cached;
    }
    return best;
}

std::vector<std::pair<int64_t, int64_t>> balanced_partition(int64_t L, int64_t M) {
    if (M < 1) throw config_error("partition: M must be >= 1");
    if (M > L) throw config_error("partition: M must be <= L");
    std::vector<std::pair<int64_t, int64_t>> segs;
    segs.reserve(size_t(M));
    const int64_t base = L / M;
    const int64_t extra = L % M;
    int64_t lo = 0;
    for (int64_t m = 0; m < M; ++m) {
        const int64_t len = base + (m < extra ? 1 : 0);
        segs.emplace_back(lo, lo + len - 1);
        lo += len;
    }
    return segs;
}

std::pair<SparseCode, SolveTrace> greedy_cd(const Signal &x, const Dictionary &dict,
                                            const SolverConfig &config, UpdateLog *log) {
    validate_common(x, dict, config);
    const int64_t K = dict.num_atoms();
    const int64_t W = dict.width();
    const int64_t L = x.length() - W + 1;
    SparseCode code(K, L);
    BetaState beta = beta_init(x, dict, code);
    ArgmaxScanner scanner(L, std::max<int64_t>(32, W));

    TraceRecorder rec{x, dict, config.lambda, config.log_every, clock_type::now(), {}};
    rec.checkpoint(code);

    while (true) {
        const Candidate c = scanner.best(beta, code, dict.sq_norms(), config.lambda,
                                         &rec.trace.candidate_evals);
        rec.trace.final_max_dz = c.adz;
        if (c.adz < config.eps) {
            rec.trace.converged = true;
            break;
        }
        if (rec.trace.iterations >= config.max_iter) break;
        const CoordinateUpdate upd{c.k, c.t, code.at(c.k, c.t), c.new_value};
        beta_apply_update(beta, upd, dict.cross_corr());
        code.at(c.k, c.t) = c.new_value;
        scanner.invalidate(c.t - W + 1, c.t + W - 1);
        ++rec.trace.iterations;
        log_update(log, rec.trace.iterations, 0, upd);
        rec.maybe_checkpoint(code);
    }
    rec.checkpoint(code);
    return {std::move(code), std::move(rec.trace)};
}

std::pair<SparseCode, SolveTrace> randomized_cd(const Signal &x, const Dictionary &dict,
                                                const SolverConfig &config,
                                                UpdateLog *log) {
    validate_common(x, dict, config);
    const int64_t K = dict.num_atoms();
    const int64_t W = dict.width();
    const int64_t L = x.length() - W + 1;
    SparseCode code(K, L);
    BetaState beta = beta_init(x, dict, code);

    TraceRecorder rec{x, dict, config.lambda, config.log_every, clock_type::now(), {}};
    rec.checkpoint(code);

    // Already-optimal start (e.g. lambda >= max |beta|): no draws at all.
    const Candidate init = scan_segment(beta, code, dict.sq_norms(), config.lambda,
                                        0, L - 1, &rec.trace.candidate_evals);
    rec.trace.final_max_dz = init.adz;
    if (init.adz < config.eps) {
        rec.trace.converged = true;
        rec.checkpoint(code);
        return {std::move(code), std::move(rec.trace)};
    }

    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<int64_t> draw(0, K * L - 1);
    const int64_t window = K * L; // sweep-equivalent quiescence window
    int64_t quiet = 0;
    double last_adz = init.adz;
    while (rec.trace.iterations < config.max_iter) {
        const int64_t i = draw(rng);
        ++rec.trace.draws;
        const int64_t k = i / L;
        const int64_t t = i % L;
        ++rec.trace.candidate_evals;
        const double target = coordinate_target(beta, k, t, config.lambda, dict.sq_norms());
        const double adz = std::fabs(code.at(k, t) - target);
        last_adz = adz;
        if (adz < config.eps) {
            if (++quiet >= window) {
                rec.trace.converged = true;
                break;
            }
            continue;
        }
        quiet = 0;
        const CoordinateUpdate upd{k, t, code.at(k, t), target};
        beta_apply_update(beta, upd, dict.cross_corr());
        code.at(k, t) = target;
        ++rec.trace.iterations;
        log_update(log, rec.trace.iterations, 0, upd);
        rec.maybe_checkpoint(code);
    }
    rec.trace.final_max_dz = last_adz;
    rec.checkpoint(code);
    return {std::move(code), std::move(rec.trace)};
}

std::pair<SparseCode, SolveTrace> seq_dicod(const Signal &x, const Dictionary &dict,
                                            const SolverConfig &config, UpdateLog *log) {
    validate_common(x, dict, config);
    const int64_t K = dict.num_atoms();
    const int64_t W = dict.width();
    const int64_t L = x.length() - W + 1;
    const int64_t M = config.segments;
    if (M < 1 || M > L) throw config_error("seq-dicod: need 1 <= M <= L");
    const auto segs = balanced_partition(L, M);

    SparseCode code(K, L);
    BetaState beta = beta_init(x, dict, code);

    TraceRecorder rec{x, dict, config.lambda, config.log_every, clock_type::now(), {}};
    rec.checkpoint(code);

    std::vector<double> dz(size_t(M), std::numeric_limits<double>::infinity());
    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<int64_t> draw(0, M - 1);

    // Refreshes every per-segment maximum in one pass; used for the
    // ||dZ||_inf < eps confirmation.
    int64_t stopping_evals = 0; // init pre-scan + confirmation rescans
    auto full_rescan = [&]() {
        double global = 0.0;
        for (int64_t m = 0; m < M; ++m) {
            const Candidate c = scan_segment(beta, code, dict.sq_norms(), config.lambda,
                                             segs[size_t(m)].first, segs[size_t(m)].second,
                                             &stopping_evals);
            dz[size_t(m)] = c.adz;
            global = std::max(global, c.adz);
        }
        return global;
    };

    const double init_max = full_rescan();
    rec.trace.final_max_dz = init_max;
    if (init_max < config.eps) {
        rec.trace.converged = true;
        rec.checkpoint(code);
        return {std::move(code), std::move(rec.trace)};
    }

    while (rec.trace.iterations < config.max_iter) {
        const int64_t m = draw(rng);
        ++rec.trace.draws;
        const Candidate c = scan_segment(beta, code, dict.sq_norms(), config.lambda,
                                         segs[size_t(m)].first, segs[size_t(m)].second,
                                         &rec.trace.candidate_evals);
        dz[size_t(m)] = c.adz;
        if (c.adz >= config.eps) {
            const CoordinateUpdate upd{c.k, c.t, code.at(c.k, c.t), c.new_value};
            beta_apply_update(beta, upd, dict.cross_corr());
            code.at(c.k, c.t) = c.new_value;
            ++rec.trace.iterations;
            log_update(log, rec.trace.iterations, m, upd);
            rec.maybe_checkpoint(code);
            continue;
        }
        if (*std::max_element(dz.begin(), dz.end()) < config.eps) {
            // Local maxima are all quiet; confirm with a full scan, since
            // updates may have bled into neighbors through the halo.
            const double global = full_rescan();
            rec.trace.final_max_dz = global;
            if (global < config.eps) {
                rec.trace.converged = true;
                break;
            }
        }
    }
    rec.checkpoint(code);
    return {std::move(code), std::move(rec.trace)};
}

std::pair<SparseCode, SolveTrace> prox_gradient_baseline(const Signal &x,
                                                         const Dictionary &dict,
                                                         double lambda, int64_t iters,
                                                         bool accel, int64_t log_every) {
    if (lambda <= 0.0) throw config_error("prox baseline: lambda must be > 0");
    if (iters < 1) throw config_error("prox baseline: iters must be >= 1");
    const int64_t K = dict.num_atoms();
    const int64_t W = dict.width();
    const int64_t L = x.length() - W + 1;

    // Largest eigenvalue of the composite operator by power iteration,
    // padded by 1% so the step stays on the safe side of 1/L_op.
    double l_op = 1.0;
    {
        std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
        std::normal_distribution<double> gauss(0.0, 1.0);
        SparseCode v(K, L);
        for (double &val : v.raw()) val = gauss(rng);
        for (int iter = 0; iter < 50; ++iter) {
            const Signal rec = reconstruct(v, dict);
            SparseCode w(K, L);
            for (int64_t k = 0; k < K; ++k) {
                const std::vector<double> corr = correlate(dict.atom(k), rec);
                for (int64_t t = 0; t < L; ++t) w.at(k, t) = corr[size_t(t)];
            }
            double norm = 0.0;
            for (double val : w.raw()) norm += val * val;
            norm = std::sqrt(norm);
            if (norm == 0.0) break;
            l_op = norm;
            for (int64_t i = 0; i < K * L; ++i) v.raw()[size_t(i)] = w.raw()[size_t(i)] / norm;
        }
        l_op *= 1.01;
    }
    const double step = 1.0 / l_op;

    SparseCode z(K, L);
    SparseCode y = z;
    double momentum = 1.0;

    TraceRecorder rec{x, dict, lambda, log_every, clock_type::now(), {}};
    rec.checkpoint(z);

    double prev_cost = std::numeric_limits<double>::infinity();
    int64_t stationary_streak = 0;
    for (int64_t it = 0; it < iters; ++it) {
        const SparseCode &point = accel ? y : z;
        const Signal res = residual(x, dict, point);
        SparseCode z_new(K, L);
        for (int64_t k = 0; k < K; ++k) {
            const std::vector<double> corr = correlate(dict.atom(k), res);
            for (int64_t t = 0; t < L; ++t)
                z_new.at(k, t) =
                    soft_threshold(point.at(k, t) + step * corr[size_t(t)], lambda * step);
        }

        double max_change = 0.0;
        double max_abs = 0.0;
        for (int64_t i = 0; i < K * L; ++i) {
            max_change = std::max(max_change,
                                  std::fabs(z_new.raw()[size_t(i)] - z.raw()[size_t(i)]));
            max_abs = std::max(max_abs, std::fabs(z_new.raw()[size_t(i)]));
        }

        if (accel) {
            const double c = cost(x, dict, z_new, lambda);
            if (c > prev_cost) { // restart momentum on a cost increase
                momentum = 1.0;
                y = z_new;
            } else {
                const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
                const double gamma = (momentum - 1.0) / next;
                momentum = next;
                y = z_new;
                for (int64_t i = 0; i < K * L; ++i)
                    y.raw()[size_t(i)] +=
                        gamma * (z_new.raw()[size_t(i)] - z.raw()[size_t(i)]);
            }
            prev_cost = c;
        }

        z = std::move(z_new);
        ++rec.trace.iterations;
        rec.trace.final_max_dz = max_change;
        rec.maybe_checkpoint(z);

        if (max_change <= 1e-14 * (1.0 + max_abs)) {
            if (++stationary_streak >= 10) {
                rec.trace.converged = true;
                break;
            }
        } else {
            stationary_streak = 0;
        }
    }
    rec.checkpoint(z);
    return {std::move(z), std::move(rec.trace)};
}

double max_abs_dz(const Signal &x, const Dictionary &dict, const SparseCode &code,
                  double lambda) {
    const BetaState beta = beta_init(x, dict, code);
    double best = 0.0;
    for (int64_t k = 0; k < code.num_atoms(); ++k)
        for (int64_t t = 0; t < code.length(); ++t) {
            const double target = coordinate_target(beta, k, t, lambda, dict.sq_norms());
            best = std::max(best, std::fabs(code.at(k, t) - target));
        }
    return best;
}

} // namespace csc
