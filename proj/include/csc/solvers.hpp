//
// Sequential solvers: greedy coordinate descent, randomized coordinate
// descent, locally-greedy coordinate descent over random segments
// (seq-dicod), and a proximal-gradient baseline used as an optimality
// oracle in tests and benchmarks.
//
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "csc/objective.hpp"
#include "csc/signal.hpp"

namespace csc {

enum class Strategy { greedy, randomized, seq_dicod };

struct SolverConfig {
    double lambda = 1.0;
    double eps = 1e-6;           // stopping tolerance on |dZ|
    int64_t max_iter = 10'000'000;
    Strategy strategy = Strategy::greedy;
    int64_t segments = 1;        // M, seq-dicod only
    uint64_t seed = 0;
    int64_t log_every = 100;     // trajectory sampling stride, in updates
};

struct TracePoint {
    int64_t iteration = 0;
    double seconds = 0.0;
    double cost = 0.0;
};

struct SolveTrace {
    int64_t iterations = 0;      // coordinate updates performed
    std::vector<TracePoint> trajectory;
    double final_max_dz = 0.0;
    bool converged = false;
    // Instrumentation. For seq-dicod, candidate_evals counts only the
    // per-draw segment scans (not the init pre-scan or the stopping-rule
    // rescans), so candidate_evals / draws is the per-iteration work.
    int64_t candidate_evals = 0;
    int64_t draws = 0;
};

// One applied update, as written to the update-log CSV
// (round,worker,k,t,old,new,interfering).
struct UpdateRecord {
    int64_t round = 0;
    int64_t worker = 0;
    int64_t k = 0;
    int64_t t = 0;
    double old_value = 0.0;
    double new_value = 0.0;
    bool interfering = false;
};
using UpdateLog = std::vector<UpdateRecord>;

// Candidate coordinate for the next update. adz = |Z - Z'|.
struct Candidate {
    int64_t k = -1;
    int64_t t = -1;
    double new_value = 0.0;
    double adz = -1.0;

    bool improves_on(const Candidate &other) const {
        if (adz != other.adz) return adz > other.adz;
        if (k != other.k) return k < other.k; // tie: smallest (k, t)
        return t < other.t;
    }
};

// Straightforward scan of all K rows over t in [t_lo, t_hi], ties broken
// towards the lexicographically smallest (k, t). This is both the
// seq-dicod per-segment workhorse and the reference the cached scanner is
// checked against.
Candidate scan_segment(const BetaState &beta, const SparseCode &code,
                       const std::vector<double> &sq_norms, double lambda,
                       int64_t t_lo, int64_t t_hi, int64_t *evals = nullptr);

// Block-cached argmax over all coordinates. Blocks only get rescanned
// after an invalidate() overlapping them, so a steady-state greedy update
// costs O(K(W + B)) candidate evaluations instead of O(KL).
class ArgmaxScanner {
public:
    ArgmaxScanner(int64_t L, int64_t block_size);

    void invalidate(int64_t t_lo, int64_t t_hi);
    Candidate best(const BetaState &beta, const SparseCode &code,
                   const std::vector<double> &sq_norms, double lambda,
                   int64_t *evals = nullptr);

private:
    struct Block {
        int64_t lo = 0, hi = 0;
        Candidate cached;
        bool dirty = true;
    };
    std::vector<Block> blocks_;
};

// Contiguous balanced split of [0, L-1] into M segments: the first
// (L mod M) segments get ceil(L/M) coordinates, the rest floor(L/M).
std::vector<std::pair<int64_t, int64_t>> balanced_partition(int64_t L, int64_t M);

std::pair<SparseCode, SolveTrace> greedy_cd(const Signal &x, const Dictionary &dict,
                                            const SolverConfig &config,
                                            UpdateLog *log = nullptr);

std::pair<SparseCode, SolveTrace> randomized_cd(const Signal &x, const Dictionary &dict,
                                                const SolverConfig &config,
                                                UpdateLog *log = nullptr);

std::pair<SparseCode, SolveTrace> seq_dicod(const Signal &x, const Dictionary &dict,
                                            const SolverConfig &config,
                                            UpdateLog *log = nullptr);

// Proximal gradient on the same objective; accel=true adds momentum with a
// restart whenever the cost increases. Step size is 1/L_op with L_op
// estimated by 50 power iterations on the composite operator. Iterations
// end early once the iterate is stationary to machine precision.
std::pair<SparseCode, SolveTrace> prox_gradient_baseline(const Signal &x,
                                                         const Dictionary &dict,
                                                         double lambda, int64_t iters,
                                                         bool accel,
                                                         int64_t log_every = 100);

// Convergence certificate: largest |Z - Z'| over all coordinates, from a
// freshly recomputed beta.
double max_abs_dz(const Signal &x, const Dictionary &dict, const SparseCode &code,
                  double lambda);

} // namespace csc
