#include "csc/dicod.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <map>
#include <mutex>
#include <random>
#include <thread>

namespace csc {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

double zero_code_cost(const Signal &x) {
    double s = 0.0;
    for (double v : x.raw()) s += v * v;
    return 0.5 * s;
}

} // namespace

std::vector<SegmentAssignment> partition(int64_t L, int64_t M, int64_t W) {
    const auto ranges = balanced_partition(L, M);
    std::vector<SegmentAssignment> segs;
    segs.reserve(ranges.size());
    for (int64_t m = 0; m < M; ++m) {
        const auto [lo, hi] = ranges[size_t(m)];
        if (hi - lo + 1 < W)
            throw config_error("partition: segment shorter than atom width W");
        segs.push_back({m, lo, hi, W - 1});
    }
    return segs;
}

bool TerminationDetector::offer(const std::vector<ProbeReply> &snapshot) {
    bool all_converged = true;
    uint64_t sent = 0, received = 0;
    for (const ProbeReply &r : snapshot) {
        all_converged = all_converged && r.local_converged;
        sent += r.sent;
        received += r.received;
    }
    const bool fire =
        all_converged && sent == received && has_last_ && snapshot == last_;
    last_ = snapshot;
    has_last_ = true;
    return fire;
}

Worker::Worker(const Signal &x, const Dictionary &dict, double lambda, double eps,
               SegmentAssignment seg, int64_t num_workers)
    : dict_(&dict), lambda_(lambda), eps_(eps), seg_(seg), M_(num_workers) {
    const int64_t K = dict.num_atoms();
    const int64_t W = dict.width();
    L_ = x.length() - W + 1;
    span_lo_ = seg_.halo_lo();
    span_hi_ = seg_.halo_hi(L_);
    const int64_t span = span_hi_ - span_lo_ + 1;
    const int64_t own = seg_.end - seg_.start + 1;
    beta_.assign(size_t(K * span), 0.0);
    z_.assign(size_t(K * own), 0.0);
    // Z starts at zero, so beta over the stored rows is just the atom/signal
    // correlation restricted to the slab.
    const int64_t P = x.channels();
    for (int64_t k = 0; k < K; ++k) {
        const Atom &a = dict.atom(k);
        for (int64_t t = span_lo_; t <= span_hi_; ++t) {
            double acc = 0.0;
            for (int64_t tau = 0; tau < W; ++tau)
                for (int64_t p = 0; p < P; ++p)
                    acc += a.at(tau, p) * x.at(t + tau, p);
            beta_[size_t(k * span + t - span_lo_)] = acc;
        }
    }
}

void Worker::receive(const UpdateMessage &msg) {
    const int64_t W = dict_->width();
    if (msg.sender != seg_.m - 1 && msg.sender != seg_.m + 1)
        throw protocol_error("worker: message from a non-neighbor");
    if (msg.t0 >= seg_.start && msg.t0 <= seg_.end)
        throw protocol_error("worker: message for an owned coordinate");
    if (msg.t0 < seg_.start - W || msg.t0 > seg_.end + W)
        throw protocol_error("worker: message outside halo range");

    const int dir = msg.sender == seg_.m - 1 ? 0 : 1;
    ++link_recv_[dir];
    ++recv_count_;
    ++epoch_;
    paused_ = false;
    local_converged_ = false;

    // Pairs are counted once, on the right-hand worker of each border.
    if (dir == 0) {
        while (!sent_left_.empty() && sent_left_.front().seq <= msg.ack)
            sent_left_.pop_front();
        for (const SentRecord &rec : sent_left_) {
            if (std::llabs(rec.t0 - msg.t0) < W)
                pairs_.push_back({msg.sender, msg.update_ordinal, seg_.m, rec.ordinal});
        }
    }

    const CoordinateUpdate upd{msg.k0, msg.t0, msg.delta, 0.0}; // delta() == msg.delta
    beta_apply_update_ranged(beta_, span_lo_, span_hi_, upd, dict_->cross_corr());
}

Worker::StepResult Worker::step(int64_t *eval_counter) {
    StepResult result;
    if (paused_) {
        result.local_converged = local_converged_;
        return result;
    }
    const int64_t K = dict_->num_atoms();
    const int64_t W = dict_->width();
    const int64_t span = span_hi_ - span_lo_ + 1;
    const int64_t own = seg_.end - seg_.start + 1;

    Candidate best;
    for (int64_t k = 0; k < K; ++k) {
        const double *brow = beta_.data() + size_t(k * span);
        const double *zrow = z_.data() + size_t(k * own);
        const double inv_n2 = 1.0 / dict_->sq_norm(k);
        for (int64_t t = seg_.start; t <= seg_.end; ++t) {
            const double target = soft_threshold(brow[t - span_lo_], lambda_) * inv_n2;
            const double adz = std::fabs(zrow[t - seg_.start] - target);
            if (adz > best.adz) best = {k, t, target, adz};
        }
    }
    if (eval_counter) *eval_counter += K * own;

    if (best.adz < eps_) {
        local_converged_ = true;
        paused_ = true;
        result.local_converged = true;
        return result;
    }

    double &zref = z_[size_t(best.k * own + best.t - seg_.start)];
    const CoordinateUpdate upd{best.k, best.t, zref, best.new_value};
    beta_apply_update_ranged(beta_, span_lo_, span_hi_, upd, dict_->cross_corr());
    zref = best.new_value;
    ++updates_applied_;
    ++epoch_;

    result.applied = true;
    result.update = upd;

    if (seg_.m > 0 && best.t - seg_.start < W) {
        UpdateMessage msg{best.k, best.t, upd.delta(), seg_.m,
                          ++link_seq_[0], link_recv_[0], updates_applied_};
        result.outbound.emplace_back(seg_.m - 1, msg);
        sent_left_.push_back({msg.seq, best.t, updates_applied_});
        ++sent_count_;
    }
    if (seg_.m < M_ - 1 && seg_.end + 1 - best.t < W) {
        result.outbound.emplace_back(seg_.m + 1,
                                     UpdateMessage{best.k, best.t, upd.delta(), seg_.m,
                                                   ++link_seq_[1], link_recv_[1],
                                                   updates_applied_});
        ++sent_count_;
    }
    return result;
}

void Worker::gather_into(SparseCode &code) const {
    const int64_t own = seg_.end - seg_.start + 1;
    for (int64_t k = 0; k < dict_->num_atoms(); ++k)
        for (int64_t t = 0; t < own; ++t)
            code.at(k, seg_.start + t) = z_[size_t(k * own + t)];
}

// ---------------------------------------------------------------------------
// Stepped scheduler: deterministic single-threaded interleaving.
// ---------------------------------------------------------------------------

namespace {

struct TimedUpdate {
    UpdateMessage msg;
    int64_t deliver_round = 0;
};

struct TimedProbeReq {
    uint64_t probe_id = 0;
    int64_t deliver_round = 0;
};

struct TimedProbeReply {
    uint64_t probe_id = 0;
    int64_t worker = 0;
    ProbeReply reply;
    int64_t deliver_round = 0;
};

struct FifoClock {
    int64_t last = 0;
    int64_t stamp(int64_t round, int64_t delay) {
        last = std::max(last, round + delay);
        return last;
    }
};

DicodResult run_stepped(const Signal &x, const Dictionary &dict, const DicodConfig &cfg,
                        const std::vector<SegmentAssignment> &segs) {
    const auto t_start = clock_type::now();
    const int64_t M = cfg.M;
    const int64_t K = dict.num_atoms();
    const int64_t L = x.length() - dict.width() + 1;

    std::vector<Worker> workers;
    workers.reserve(size_t(M));
    for (const SegmentAssignment &seg : segs)
        workers.emplace_back(x, dict, cfg.lambda, cfg.eps, seg, M);
    const auto t_ready = clock_type::now();

    // data_links[m][0]: messages m -> m-1, data_links[m][1]: m -> m+1.
    std::vector<std::array<std::deque<TimedUpdate>, 2>> data_links(static_cast<size_t>(M));
    std::vector<std::array<FifoClock, 2>> data_clocks(static_cast<size_t>(M));
    std::vector<std::deque<TimedProbeReq>> probe_links(static_cast<size_t>(M));
    std::vector<FifoClock> probe_clocks(static_cast<size_t>(M));
    std::vector<FifoClock> reply_clocks(static_cast<size_t>(M));
    std::deque<TimedProbeReply> reply_link;
    std::map<uint64_t, std::map<int64_t, ProbeReply>> collections;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int64_t> delay_draw(1, std::max<int64_t>(1, cfg.d_max));
    auto delay = [&]() { return delay_draw(rng); };

    DicodResult out;
    out.code = SparseCode(K, L);
    TerminationDetector detector;
    uint64_t probe_id = 0;
    bool terminated = false;
    int64_t round = 0;

    std::vector<std::vector<size_t>> row_of_ordinal(static_cast<size_t>(M)); // per worker, 1-based

    auto checkpoint = [&]() {
        for (const Worker &w : workers) w.gather_into(out.code);
        out.trace.trajectory.push_back({out.stats.total_updates, seconds_since(t_start),
                                        cost(x, dict, out.code, cfg.lambda)});
    };

    out.trace.trajectory.push_back({0, seconds_since(t_start), zero_code_cost(x)});

    std::vector<int64_t> order(static_cast<size_t>(M));
    for (int64_t m = 0; m < M; ++m) order[size_t(m)] = m;

    while (!terminated && round < cfg.max_rounds) {
        ++round;
        std::shuffle(order.begin(), order.end(), rng);

        for (int64_t m : order) {
            Worker &w = workers[size_t(m)];
            // Deliver due data messages, left link first, FIFO per link.
            if (m > 0) {
                auto &q = data_links[size_t(m - 1)][1];
                while (!q.empty() && q.front().deliver_round <= round) {
                    w.receive(q.front().msg);
                    q.pop_front();
                }
            }
            if (m < M - 1) {
                auto &q = data_links[size_t(m + 1)][0];
                while (!q.empty() && q.front().deliver_round <= round) {
                    w.receive(q.front().msg);
                    q.pop_front();
                }
            }
            // Answer due probes with the post-drain state.
            auto &pq = probe_links[size_t(m)];
            while (!pq.empty() && pq.front().deliver_round <= round) {
                reply_link.push_back({pq.front().probe_id, m, w.snapshot(),
                                      reply_clocks[size_t(m)].stamp(round, delay())});
                pq.pop_front();
            }
            if (w.paused()) continue;

            const Worker::StepResult res = w.step(&out.trace.candidate_evals);
            if (!res.applied) continue;
            ++out.stats.total_updates;
            if (!res.outbound.empty()) ++out.stats.border_updates;
            row_of_ordinal[size_t(m)].push_back(out.log.size());
            out.log.push_back({round, m, res.update.k0, res.update.t0,
                               res.update.old_value, res.update.new_value, false});
            out.update_seconds.push_back(seconds_since(t_start));
            for (const auto &[dest, msg] : res.outbound) {
                const int d = dest < m ? 0 : 1;
                data_links[size_t(m)][size_t(d)].push_back(
                    {msg, data_clocks[size_t(m)][size_t(d)].stamp(round, delay())});
            }
        }

        // Controller: consume due replies, then possibly start a new probe.
        while (!reply_link.empty() && reply_link.front().deliver_round <= round) {
            const TimedProbeReply &r = reply_link.front();
            collections[r.probe_id][r.worker] = r.reply;
            if (int64_t(collections[r.probe_id].size()) == M) {
                std::vector<ProbeReply> snapshot;
                snapshot.reserve(size_t(M));
                for (auto &[worker, reply] : collections[r.probe_id])
                    snapshot.push_back(reply);
                collections.erase(r.probe_id);
                if (!terminated && detector.offer(snapshot)) {
                    terminated = true;
                    ++out.termination_fires;
                }
            }
            reply_link.pop_front();
        }
        if (!terminated && round % cfg.probe_interval == 0) {
            ++probe_id;
            for (int64_t m = 0; m < M; ++m)
                probe_links[size_t(m)].push_back(
                    {probe_id, probe_clocks[size_t(m)].stamp(round, delay())});
        }

        if (round % cfg.log_every == 0) checkpoint();
    }

    out.stats.parallel_rounds = round;
    if (terminated) {
        bool clean = true;
        for (const auto &links : data_links)
            clean = clean && links[0].empty() && links[1].empty();
        for (const Worker &w : workers) clean = clean && w.snapshot().local_converged;
        out.clean_termination = clean;
    }
    for (const Worker &w : workers) {
        w.gather_into(out.code);
        for (const InterferencePair &p : w.interference_pairs()) {
            ++out.stats.interfering_pairs;
            if (p.ordinal_a >= 1 && size_t(p.ordinal_a) <= row_of_ordinal[size_t(p.worker_a)].size())
                out.log[row_of_ordinal[size_t(p.worker_a)][size_t(p.ordinal_a - 1)]].interfering = true;
            if (p.ordinal_b >= 1 && size_t(p.ordinal_b) <= row_of_ordinal[size_t(p.worker_b)].size())
                out.log[row_of_ordinal[size_t(p.worker_b)][size_t(p.ordinal_b - 1)]].interfering = true;
        }
    }
    // Updates participating in more than one pair.
    {
        std::map<std::pair<int64_t, int64_t>, int64_t> uses;
        for (const Worker &w : workers)
            for (const InterferencePair &p : w.interference_pairs()) {
                ++uses[{p.worker_a, p.ordinal_a}];
                ++uses[{p.worker_b, p.ordinal_b}];
            }
        for (const auto &[key, n] : uses)
            if (n > 1) ++out.stats.multi_interference;
    }

    out.trace.iterations = out.stats.total_updates;
    out.trace.converged = terminated;
    checkpoint();
    out.trace.final_max_dz = max_abs_dz(x, dict, out.code, cfg.lambda);
    out.seconds_total = seconds_since(t_start);
    out.seconds_after_init = seconds_since(t_ready);
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Free-running runtime: one thread per worker, mutex/condvar mailboxes.
// ---------------------------------------------------------------------------

namespace {

struct Envelope {
    enum class Kind { update, probe, stop } kind = Kind::update;
    UpdateMessage msg;
    uint64_t probe_id = 0;
};

class Mailbox {
public:
    void push(const Envelope &e) {
        {
            std::lock_guard<std::mutex> lock(mu_);
            q_.push_back(e);
        }
        cv_.notify_one();
    }
    bool try_pop(Envelope &e) {
        std::lock_guard<std::mutex> lock(mu_);
        if (q_.empty()) return false;
        e = q_.front();
        q_.pop_front();
        return true;
    }
    void wait_pop(Envelope &e) {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return !q_.empty(); });
        e = q_.front();
        q_.pop_front();
    }
    int64_t leftover_updates() {
        std::lock_guard<std::mutex> lock(mu_);
        int64_t n = 0;
        for (const Envelope &e : q_)
            if (e.kind == Envelope::Kind::update) ++n;
        return n;
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Envelope> q_;
};

struct ControllerReply {
    uint64_t probe_id = 0;
    int64_t worker = 0;
    ProbeReply reply;
};

class ControllerInbox {
public:
    void push(ControllerReply r) {
        std::lock_guard<std::mutex> lock(mu_);
        q_.push_back(r);
    }
    // The controller is a low-rate poller; a short sleep loop keeps the
    // inbox free of timed condition waits.
    bool pop_for(ControllerReply &r, std::chrono::microseconds timeout) {
        const auto deadline = clock_type::now() + timeout;
        while (true) {
            {
                std::lock_guard<std::mutex> lock(mu_);
                if (!q_.empty()) {
                    r = q_.front();
                    q_.pop_front();
                    return true;
                }
            }
            if (clock_type::now() >= deadline) return false;
            std::this_thread::sleep_for(std::chrono::microseconds(100));
        }
    }

private:
    std::mutex mu_;
    std::deque<ControllerReply> q_;
};

struct WorkerThreadState {
    UpdateLog log;
    std::vector<double> seconds;
    int64_t steps = 0;
    int64_t border_updates = 0;
    int64_t evals = 0;
    std::exception_ptr error;
};

DicodResult run_free(const Signal &x, const Dictionary &dict, const DicodConfig &cfg,
                     const std::vector<SegmentAssignment> &segs) {
    const auto t_start = clock_type::now();
    const int64_t M = cfg.M;
    const int64_t K = dict.num_atoms();
    const int64_t L = x.length() - dict.width() + 1;

    std::vector<Worker> workers;
    workers.reserve(size_t(M));
    for (const SegmentAssignment &seg : segs)
        workers.emplace_back(x, dict, cfg.lambda, cfg.eps, seg, M);

    std::vector<Mailbox> mailboxes(static_cast<size_t>(M));
    ControllerInbox controller;
    std::vector<WorkerThreadState> states(static_cast<size_t>(M));
    std::atomic<bool> failed{false};

    auto worker_main = [&](int64_t m) {
        Worker &w = workers[size_t(m)];
        WorkerThreadState &st = states[size_t(m)];
        try {
            bool stop = false;
            auto handle = [&](Envelope &e) {
                switch (e.kind) {
                case Envelope::Kind::update:
                    w.receive(e.msg);
                    break;
                case Envelope::Kind::probe:
                    controller.push({e.probe_id, m, w.snapshot()});
                    break;
                case Envelope::Kind::stop:
                    stop = true;
                    break;
                }
            };
            Envelope e;
            while (!stop) {
                while (mailboxes[size_t(m)].try_pop(e)) {
                    handle(e);
                    if (stop) break;
                }
                if (stop) break;
                if (w.paused()) {
                    mailboxes[size_t(m)].wait_pop(e);
                    handle(e);
                    continue;
                }
                const Worker::StepResult res = w.step(&st.evals);
                ++st.steps;
                if (res.applied) {
                    st.log.push_back({st.steps, m, res.update.k0, res.update.t0,
                                      res.update.old_value, res.update.new_value, false});
                    st.seconds.push_back(seconds_since(t_start));
                    if (!res.outbound.empty()) ++st.border_updates;
                    for (const auto &[dest, msg] : res.outbound)
                        mailboxes[size_t(dest)].push({Envelope::Kind::update, msg, 0});
                }
            }
        } catch (...) {
            st.error = std::current_exception();
            failed.store(true);
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(size_t(M));
    for (int64_t m = 0; m < M; ++m) threads.emplace_back(worker_main, m);
    const auto t_ready = clock_type::now();

    TerminationDetector detector;
    uint64_t probe_id = 0;
    bool terminated = false;
    int64_t fires = 0;
    std::map<int64_t, ProbeReply> collection;

    while (!terminated && !failed.load()) {
        if (seconds_since(t_start) > cfg.max_seconds) break;
        ++probe_id;
        for (int64_t m = 0; m < M; ++m)
            mailboxes[size_t(m)].push({Envelope::Kind::probe, {}, probe_id});
        collection.clear();
        const auto deadline = clock_type::now() + std::chrono::milliseconds(100);
        while (int64_t(collection.size()) < M && clock_type::now() < deadline &&
               !failed.load()) {
            ControllerReply r;
            if (!controller.pop_for(r, std::chrono::microseconds(500))) continue;
            if (r.probe_id == probe_id) collection[r.worker] = r.reply;
        }
        if (int64_t(collection.size()) == M) {
            std::vector<ProbeReply> snapshot;
            snapshot.reserve(size_t(M));
            for (auto &[worker, reply] : collection) snapshot.push_back(reply);
            if (detector.offer(snapshot)) {
                terminated = true;
                ++fires;
                break;
            }
        }
        std::this_thread::sleep_for(std::chrono::microseconds(300));
    }

    for (int64_t m = 0; m < M; ++m)
        mailboxes[size_t(m)].push({Envelope::Kind::stop, {}, 0});
    for (std::thread &t : threads) t.join();

    for (const WorkerThreadState &st : states)
        if (st.error) {
            try {
                std::rethrow_exception(st.error);
            } catch (const std::exception &e) {
                throw protocol_error(std::string("dicod worker failed: ") + e.what());
            }
        }

    DicodResult out;
    out.code = SparseCode(K, L);
    out.termination_fires = fires;
    if (terminated) {
        bool clean = true;
        for (Mailbox &mb : mailboxes) clean = clean && mb.leftover_updates() == 0;
        for (const Worker &w : workers) clean = clean && w.snapshot().local_converged;
        out.clean_termination = clean;
    }
    out.trace.trajectory.push_back({0, 0.0, zero_code_cost(x)});

    // Merge per-worker logs into wall-clock order.
    std::vector<std::pair<double, std::pair<int64_t, size_t>>> ordering;
    for (int64_t m = 0; m < M; ++m)
        for (size_t i = 0; i < states[size_t(m)].log.size(); ++i)
            ordering.push_back({states[size_t(m)].seconds[i], {m, i}});
    std::sort(ordering.begin(), ordering.end());
    std::vector<std::vector<size_t>> row_of_ordinal(static_cast<size_t>(M));
    for (const auto &[sec, loc] : ordering) {
        const auto &[m, i] = loc;
        row_of_ordinal[size_t(m)].push_back(out.log.size());
        out.log.push_back(states[size_t(m)].log[i]);
        out.update_seconds.push_back(sec);
    }

    for (int64_t m = 0; m < M; ++m) {
        const Worker &w = workers[size_t(m)];
        w.gather_into(out.code);
        out.stats.total_updates += w.updates_applied();
        out.stats.border_updates += states[size_t(m)].border_updates;
        out.stats.parallel_rounds = std::max(out.stats.parallel_rounds, states[size_t(m)].steps);
        out.trace.candidate_evals += states[size_t(m)].evals;
        for (const InterferencePair &p : w.interference_pairs()) {
            ++out.stats.interfering_pairs;
            if (p.ordinal_a >= 1 && size_t(p.ordinal_a) <= row_of_ordinal[size_t(p.worker_a)].size())
                out.log[row_of_ordinal[size_t(p.worker_a)][size_t(p.ordinal_a - 1)]].interfering = true;
            if (p.ordinal_b >= 1 && size_t(p.ordinal_b) <= row_of_ordinal[size_t(p.worker_b)].size())
                out.log[row_of_ordinal[size_t(p.worker_b)][size_t(p.ordinal_b - 1)]].interfering = true;
        }
    }
    {
        std::map<std::pair<int64_t, int64_t>, int64_t> uses;
        for (const Worker &w : workers)
            for (const InterferencePair &p : w.interference_pairs()) {
                ++uses[{p.worker_a, p.ordinal_a}];
                ++uses[{p.worker_b, p.ordinal_b}];
            }
        for (const auto &[key, n] : uses)
            if (n > 1) ++out.stats.multi_interference;
    }

    out.trace.iterations = out.stats.total_updates;
    out.trace.converged = terminated;
    out.trace.trajectory.push_back({out.stats.total_updates, seconds_since(t_start),
                                    cost(x, dict, out.code, cfg.lambda)});
    out.trace.final_max_dz = max_abs_dz(x, dict, out.code, cfg.lambda);
    out.seconds_total = seconds_since(t_start);
    out.seconds_after_init = seconds_since(t_ready);
    return out;
}

} // namespace

DicodResult dicod_solve(const Signal &x, const Dictionary &dict, const DicodConfig &cfg) {
    if (cfg.lambda <= 0.0) throw config_error("dicod: lambda must be > 0");
    if (cfg.eps <= 0.0) throw config_error("dicod: eps must be > 0");
    if (cfg.M < 1) throw config_error("dicod: M must be >= 1");
    if (x.channels() != dict.channels())
        throw dimension_error("dicod: signal/dictionary channel mismatch");
    const int64_t L = x.length() - dict.width() + 1;
    const auto segs = partition(L, cfg.M, dict.width());
    return cfg.mode == DicodMode::stepped ? run_stepped(x, dict, cfg, segs)
                                          : run_free(x, dict, cfg, segs);
}

InterferenceRate interference_rate(const InterferenceStats &stats, int64_t M, double alpha) {
    InterferenceRate rate;
    const double rounds = double(std::max<int64_t>(1, stats.parallel_rounds));
    const double pairs = double(std::max<int64_t>(1, M - 1));
    rate.observed = double(stats.interfering_pairs) / (rounds * pairs);
    rate.predicted = (double(M) * alpha) * (double(M) * alpha);
    return rate;
}

InterferenceStats simulate_uniform_interference(int64_t L, int64_t M, int64_t W,
                                                int64_t rounds, uint64_t seed) {
    const auto segs = balanced_partition(L, M);
    std::mt19937_64 rng(seed);
    InterferenceStats stats;
    stats.parallel_rounds = rounds;
    std::vector<int64_t> pos(static_cast<size_t>(M));
    for (int64_t r = 0; r < rounds; ++r) {
        for (int64_t m = 0; m < M; ++m) {
            std::uniform_int_distribution<int64_t> draw(segs[size_t(m)].first,
                                                        segs[size_t(m)].second);
            pos[size_t(m)] = draw(rng);
            ++stats.total_updates;
        }
        for (int64_t m = 0; m + 1 < M; ++m)
            if (std::llabs(pos[size_t(m)] - pos[size_t(m + 1)]) < W)
                ++stats.interfering_pairs;
    }
    return stats;
}

} // namespace csc
