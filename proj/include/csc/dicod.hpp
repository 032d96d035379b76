//
// Distributed coordinate descent over contiguous signal segments: M
// single-writer workers, asynchronous neighbor-only update messages,
// pause/resume, and counting-based global termination detection.
//
// Two runtimes share the same Worker logic: a deterministic single-threaded
// stepped scheduler (seeded interleaving, bounded per-link delay) used for
// all correctness tests, and a free-running std::thread runtime used for
// wall-clock measurements.
//
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "csc/objective.hpp"
#include "csc/signal.hpp"
#include "csc/solvers.hpp"

namespace csc {

struct SegmentAssignment {
    int64_t m = 0;            // worker index in [0, M-1]
    int64_t start = 0;        // owned coordinate range, inclusive
    int64_t end = 0;
    int64_t halo = 0;         // border width W - 1

    int64_t halo_lo() const { return std::max<int64_t>(0, start - halo); }
    int64_t halo_hi(int64_t L) const { return std::min<int64_t>(L - 1, end + halo); }
};

// Balanced contiguous partition of [0, L-1]; every segment must be at
// least W long or the local-communication premise breaks.
std::vector<SegmentAssignment> partition(int64_t L, int64_t M, int64_t W);

// Border-update notification sent to a neighboring worker. seq numbers a
// directed link; ack counts messages received on the reverse link before
// this one was sent (used to detect interfering update pairs).
struct UpdateMessage {
    int64_t k0 = 0;
    int64_t t0 = 0;           // absolute time index
    double delta = 0.0;       // old - new
    int64_t sender = 0;
    uint64_t seq = 0;
    uint64_t ack = 0;
    int64_t update_ordinal = 0; // sender's update count at apply time
};

// What a worker reports to the termination controller.
struct ProbeReply {
    uint64_t epoch = 0;
    bool local_converged = false;
    uint64_t sent = 0;
    uint64_t received = 0;

    bool operator==(const ProbeReply &) const = default;
};

// Two-phase counting protocol: global termination is declared once two
// consecutive complete probe snapshots are identical, every worker reports
// local convergence, and total sent equals total received (no message can
// still be in flight).
class TerminationDetector {
public:
    bool offer(const std::vector<ProbeReply> &snapshot);
    void reset() { has_last_ = false; }

private:
    std::vector<ProbeReply> last_;
    bool has_last_ = false;
};

// An interfering pair of updates, identified by (worker, update ordinal).
struct InterferencePair {
    int64_t worker_a = 0;
    int64_t ordinal_a = 0;
    int64_t worker_b = 0;
    int64_t ordinal_b = 0;
};

struct InterferenceStats {
    int64_t total_updates = 0;
    int64_t border_updates = 0;     // updates that emitted >= 1 message
    int64_t interfering_pairs = 0;  // pairs applied before either message was consumed
    int64_t multi_interference = 0; // updates involved in more than one pair
    int64_t parallel_rounds = 0;
};

// One segment owner. Owns Z over [start, end] and a beta slab over
// owned + halo rows; halo entries are kept on a best-effort basis and are
// never read for coordinate selection.
//
// Border sends: an update at t0 messages the left neighbor when
// t0 - start < W and the right neighbor when end + 1 - t0 < W. The left
// condition over-sends by one lag position (the t0 - start == W - 1
// message has no effect on the receiver); receivers therefore accept the
// band [start - W, end + W] and reject anything further as a protocol
// violation.
class Worker {
public:
    Worker(const Signal &x, const Dictionary &dict, double lambda, double eps,
           SegmentAssignment seg, int64_t num_workers);

    struct StepResult {
        bool applied = false;
        CoordinateUpdate update; // absolute coordinates
        // (destination worker, message); at most one per neighbor.
        std::vector<std::pair<int64_t, UpdateMessage>> outbound;
        bool local_converged = false;
    };

    // Applies one neighbor update to the local beta slab (messages must be
    // handed over in per-link FIFO order before the next step()).
    void receive(const UpdateMessage &msg);

    // Greedy step over the owned segment: applies the best local update if
    // it clears eps, else pauses.
    StepResult step(int64_t *eval_counter = nullptr);

    ProbeReply snapshot() const {
        return {epoch_, local_converged_, sent_count_, recv_count_};
    }

    bool paused() const { return paused_; }
    int64_t index() const { return seg_.m; }
    int64_t updates_applied() const { return updates_applied_; }

    // Owned rows of the final code, gathered by the runtime.
    void gather_into(SparseCode &code) const;

    // Interfering pairs detected on this worker's receive side.
    const std::vector<InterferencePair> &interference_pairs() const { return pairs_; }

private:
    struct SentRecord {
        uint64_t seq = 0;
        int64_t t0 = 0;
        int64_t ordinal = 0;
    };

    double candidate(int64_t k, int64_t t, double *target) const;

    const Dictionary *dict_;
    double lambda_, eps_;
    SegmentAssignment seg_;
    int64_t M_, L_, span_lo_, span_hi_;
    std::vector<double> beta_; // K x (span_hi - span_lo + 1)
    std::vector<double> z_;    // K x (end - start + 1)

    bool paused_ = false;
    bool local_converged_ = false;
    uint64_t epoch_ = 0;
    uint64_t sent_count_ = 0, recv_count_ = 0;
    int64_t updates_applied_ = 0;

    // Per-link bookkeeping, index 0 = left neighbor, 1 = right neighbor.
    uint64_t link_seq_[2] = {0, 0};
    uint64_t link_recv_[2] = {0, 0};
    std::deque<SentRecord> sent_left_; // pending own border updates, for pair detection
    std::vector<InterferencePair> pairs_;
};

enum class DicodMode { stepped, free_running };

struct DicodConfig {
    double lambda = 1.0;
    double eps = 1e-6;
    int64_t M = 1;
    DicodMode mode = DicodMode::stepped;
    uint64_t seed = 0;
    int64_t d_max = 1;          // per-link delay bound, in rounds (stepped)
    int64_t probe_interval = 4; // rounds between probes (stepped)
    int64_t max_rounds = 1'000'000'000;
    double max_seconds = 3600.0; // wall timeout (free-running)
    int64_t log_every = 256;     // cost checkpoint stride, in rounds (stepped)
};

struct DicodResult {
    SparseCode code;
    SolveTrace trace;
    InterferenceStats stats;
    UpdateLog log;                      // round,worker,k,t,old,new,interfering
    std::vector<double> update_seconds; // wall time per log row
    double seconds_total = 0.0;
    double seconds_after_init = 0.0;    // excludes worker spawn + beta init
    int64_t termination_fires = 0;
    // True iff termination fired with every worker locally converged and no
    // update message left in any channel.
    bool clean_termination = false;
};

DicodResult dicod_solve(const Signal &x, const Dictionary &dict, const DicodConfig &config);

struct InterferenceRate {
    double observed = 0.0;  // pairs per round per neighboring pair
    double predicted = 0.0; // (M alpha)^2
};

InterferenceRate interference_rate(const InterferenceStats &stats, int64_t M, double alpha);

// Monte-Carlo check of the uniform-spread interference model: each round
// every worker updates a uniformly random position of its segment.
InterferenceStats simulate_uniform_interference(int64_t L, int64_t M, int64_t W,
                                                int64_t rounds, uint64_t seed);

} // namespace csc
