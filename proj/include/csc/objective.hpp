//
// Coordinate-descent mathematics: the beta auxiliary state, closed-form
// optimal coordinate values, single and pairwise cost deltas, the
// interference lower bound and the dictionary coherence check.
//
// beta_k[t] is the correlation of atom k with the residual in which the
// contribution of Z_k[t] itself has been removed. It makes the optimal
// value of any single coordinate a closed form:
//   Z'_k[t] = soft_threshold(beta_k[t], lambda) / ||D_k||^2.
//
#pragma once

#include <cmath>

#include "csc/signal.hpp"

namespace csc {

// One coordinate change. delta is old minus new, matching the sign
// convention used by the incremental beta update and the cost deltas.
struct CoordinateUpdate {
    int64_t k0 = 0;
    int64_t t0 = 0;
    double old_value = 0.0;
    double new_value = 0.0;

    double delta() const { return old_value - new_value; }
};

// K x L beta array kept consistent with a (X, D, Z, lambda) quadruple by
// incremental updates. Single-writer; safe to read concurrently.
class BetaState {
public:
    BetaState() = default;
    BetaState(int64_t K, int64_t L) : K_(K), L_(L), data_(size_t(K * L), 0.0) {}

    int64_t num_atoms() const { return K_; }
    int64_t length() const { return L_; }

    double &at(int64_t k, int64_t t) { return data_[size_t(k * L_ + t)]; }
    double at(int64_t k, int64_t t) const { return data_[size_t(k * L_ + t)]; }

    std::vector<double> &raw() { return data_; }
    const std::vector<double> &raw() const { return data_; }

private:
    int64_t K_ = 0, L_ = 0;
    std::vector<double> data_;
};

inline double soft_threshold(double u, double lambda) {
    if (u > lambda) return u - lambda;
    if (u < -lambda) return u + lambda;
    return 0.0;
}

// Builds beta from scratch. For Z = 0 this is correlate(D_k, X) per atom;
// in general beta_k[t] = correlate(D_k, residual)[t] + ||D_k||^2 Z_k[t],
// which equals the masked-residual definition.
BetaState beta_init(const Signal &x, const Dictionary &dict, const SparseCode &code);

// Closed-form optimal value for coordinate (k0, t0) given current beta.
inline double coordinate_target(const BetaState &beta, int64_t k0, int64_t t0,
                                double lambda, const std::vector<double> &sq_norms) {
    return soft_threshold(beta.at(k0, t0), lambda) / sq_norms[size_t(k0)];
}

// Cost variation E(Z) - E(Z with Z_k0[t0] <- u):
//   e(u) = ||D||^2/2 (z^2 - u^2) - beta (z - u) + lambda (|z| - |u|).
inline double delta_cost_single(double z_old, double u, double beta_val,
                                double sq_norm, double lambda) {
    return 0.5 * sq_norm * (z_old * z_old - u * u) - beta_val * (z_old - u) +
           lambda * (std::fabs(z_old) - std::fabs(u));
}

// Cost variation of two simultaneous updates:
//   dE0 + dE1 - S_{k0,k1}[t0 - t1] * dZ0 * dZ1.
// Both single deltas must be evaluated against the beta state preceding
// either update; that is exactly the interference situation.
double delta_cost_pair(const CoordinateUpdate &upd0, const CoordinateUpdate &upd1,
                       const CrossCorrTable &table, double delta_e0, double delta_e1);

// Applies one coordinate update to beta incrementally:
//   beta_k[t] += S_{k,k0}[t - t0] * (old - new)   for (k, t) != (k0, t0),
// restricted to |t - t0| <= W-1. beta_k0[t0] is left untouched: it masks
// its own coordinate, so it stays valid across the update.
void beta_apply_update(BetaState &beta, const CoordinateUpdate &upd,
                       const CrossCorrTable &table);

// Same update restricted to stored rows [t_lo, t_hi] of a worker-local
// beta slab whose column 0 corresponds to absolute time t_lo.
void beta_apply_update_ranged(std::vector<double> &beta_rows, int64_t t_lo,
                              int64_t t_hi, const CoordinateUpdate &upd,
                              const CrossCorrTable &table);

// Interference lower bound dE0 + dE1 - 2 C sqrt(dE0 dE1), C the normalized
// coherence magnitude |S_{k0,k1}[t0-t1]| / (||D_k0|| ||D_k1||).
inline double interference_lower_bound(double delta_e0, double delta_e1, double c) {
    return delta_e0 + delta_e1 - 2.0 * c * std::sqrt(delta_e0 * delta_e1);
}

// Worst normalized coherence over all atom pairs and lags, excluding only
// the trivial (k0 == k1, lag 0) entry. H1 holds iff the worst is < 1.
struct H1Report {
    bool holds = false;
    int64_t worst_k0 = 0;
    int64_t worst_k1 = 0;
    int64_t worst_lag = 0;
    double worst_coherence = 0.0;
};

H1Report check_h1(const Dictionary &dict);

} // namespace csc
