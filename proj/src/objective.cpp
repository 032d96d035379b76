#include "csc/objective.hpp"

#include <algorithm>

namespace csc {

BetaState beta_init(const Signal &x, const Dictionary &dict, const SparseCode &code) {
    const int64_t K = dict.num_atoms();
    const int64_t L = code.length();
    if (code.num_atoms() != K)
        throw dimension_error("beta_init: code K does not match dictionary");
    if (x.length() != L + dict.width() - 1)
        throw dimension_error("beta_init: T != L + W - 1");
    const Signal res = residual(x, dict, code);
    BetaState beta(K, L);
    for (int64_t k = 0; k < K; ++k) {
        const std::vector<double> corr = correlate(dict.atom(k), res);
        const double n2 = dict.sq_norm(k);
        for (int64_t t = 0; t < L; ++t)
            beta.at(k, t) = corr[size_t(t)] + n2 * code.at(k, t);
    }
    return beta;
}

double delta_cost_pair(const CoordinateUpdate &upd0, const CoordinateUpdate &upd1,
                       const CrossCorrTable &table, double delta_e0, double delta_e1) {
    const int64_t lag = upd0.t0 - upd1.t0;
    return delta_e0 + delta_e1 -
           table.at(upd0.k0, upd1.k0, lag) * upd0.delta() * upd1.delta();
}

void beta_apply_update(BetaState &beta, const CoordinateUpdate &upd,
                       const CrossCorrTable &table) {
    if (upd.k0 < 0 || upd.k0 >= beta.num_atoms() || upd.t0 < 0 || upd.t0 >= beta.length())
        throw std::out_of_range("beta_apply_update: coordinate out of range");
    const double dz = upd.delta();
    if (dz == 0.0) return;
    const int64_t W = table.width();
    const int64_t lo = std::max<int64_t>(0, upd.t0 - W + 1);
    const int64_t hi = std::min<int64_t>(beta.length() - 1, upd.t0 + W - 1);
    // The updated coordinate masks its own contribution: restore it bit-exact.
    const double own = beta.at(upd.k0, upd.t0);
    for (int64_t k = 0; k < beta.num_atoms(); ++k) {
        for (int64_t t = lo; t <= hi; ++t)
            beta.at(k, t) += table.at(k, upd.k0, t - upd.t0) * dz;
    }
    beta.at(upd.k0, upd.t0) = own;
}

void beta_apply_update_ranged(std::vector<double> &beta_rows, int64_t t_lo,
                              int64_t t_hi, const CoordinateUpdate &upd,
                              const CrossCorrTable &table) {
    const double dz = upd.delta();
    if (dz == 0.0) return;
    const int64_t W = table.width();
    const int64_t K = table.atoms();
    const int64_t span = t_hi - t_lo + 1;
    const int64_t lo = std::max(t_lo, upd.t0 - W + 1);
    const int64_t hi = std::min(t_hi, upd.t0 + W - 1);
    if (lo > hi) return;
    const bool own_stored = upd.t0 >= t_lo && upd.t0 <= t_hi;
    const size_t own_idx = own_stored ? size_t(upd.k0 * span + upd.t0 - t_lo) : 0;
    const double own = own_stored ? beta_rows[own_idx] : 0.0;
    for (int64_t k = 0; k < K; ++k) {
        double *row = beta_rows.data() + size_t(k * span);
        for (int64_t t = lo; t <= hi; ++t)
            row[t - t_lo] += table.at(k, upd.k0, t - upd.t0) * dz;
    }
    if (own_stored) beta_rows[own_idx] = own;
}

H1Report check_h1(const Dictionary &dict) {
    const int64_t K = dict.num_atoms();
    const int64_t W = dict.width();
    const CrossCorrTable &table = dict.cross_corr();
    H1Report report;
    report.worst_coherence = -1.0;
    for (int64_t k0 = 0; k0 < K; ++k0) {
        for (int64_t k1 = 0; k1 < K; ++k1) {
            const double denom = std::sqrt(dict.sq_norm(k0) * dict.sq_norm(k1));
            for (int64_t lag = -W + 1; lag < W; ++lag) {
                if (k0 == k1 && lag == 0) continue; // same coordinate, not a pair
                const double c = std::fabs(table.at(k0, k1, lag)) / denom;
                if (c > report.worst_coherence) {
                    report.worst_coherence = c;
                    report.worst_k0 = k0;
                    report.worst_k1 = k1;
                    report.worst_lag = lag;
                }
            }
        }
    }
    if (report.worst_coherence < 0.0) report.worst_coherence = 0.0;
    report.holds = report.worst_coherence < 1.0;
    return report;
}

} // namespace csc
