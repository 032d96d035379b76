//
// Core types and numerical kernels for convolutional sparse coding of long
// 1-D multivariate signals: signals, dictionary atoms, sparse codes, the
// pairwise atom cross-correlation table, and the direct convolution /
// correlation / objective routines every solver builds on.
//
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace csc {

// Inconsistent shapes between signals, atoms and codes.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid user-supplied configuration (CLI exit code 1).
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A message-passing contract was broken, which indicates a bug in the
// partition or routing logic, not bad user input (CLI exit code 2).
struct protocol_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Length-T sequence of P-dimensional samples, stored row-major (time-major).
// Reads outside [0, T-1] are zero by convention.
class Signal {
public:
    Signal() = default;
    Signal(int64_t T, int64_t P) : T_(T), P_(P), data_(size_t(T * P), 0.0) {
        if (T < 1 || P < 1) throw dimension_error("Signal: T and P must be >= 1");
    }

    int64_t length() const { return T_; }
    int64_t channels() const { return P_; }

    double &at(int64_t t, int64_t p) { return data_[size_t(t * P_ + p)]; }
    double at(int64_t t, int64_t p) const { return data_[size_t(t * P_ + p)]; }

    // Zero-padded read: any t outside [0, T-1] yields 0.
    double padded(int64_t t, int64_t p) const {
        return (t < 0 || t >= T_) ? 0.0 : data_[size_t(t * P_ + p)];
    }

    std::vector<double> &raw() { return data_; }
    const std::vector<double> &raw() const { return data_; }

private:
    int64_t T_ = 0, P_ = 0;
    std::vector<double> data_;
};

// One dictionary pattern: W x P weights, row-major.
class Atom {
public:
    Atom() = default;
    Atom(int64_t W, int64_t P) : W_(W), P_(P), data_(size_t(W * P), 0.0) {
        if (W < 1 || P < 1) throw dimension_error("Atom: W and P must be >= 1");
    }

    int64_t width() const { return W_; }
    int64_t channels() const { return P_; }

    double &at(int64_t tau, int64_t p) { return data_[size_t(tau * P_ + p)]; }
    double at(int64_t tau, int64_t p) const { return data_[size_t(tau * P_ + p)]; }

    double squared_norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return s;
    }

    std::vector<double> &raw() { return data_; }
    const std::vector<double> &raw() const { return data_; }

private:
    int64_t W_ = 0, P_ = 0;
    std::vector<double> data_;
};

// Pairwise atom cross-correlations S at every lag |t| < W:
//   S_{k,l}[t] = sum_tau <D_k[tau], D_l[tau + t]>,  t in [-W+1, W-1].
// Entry (k, l, idx) stores the lag idx - (W-1). Lags outside the band are 0.
class CrossCorrTable {
public:
    CrossCorrTable() = default;
    CrossCorrTable(int64_t K, int64_t W)
        : K_(K), W_(W), table_(size_t(K * K * (2 * W - 1)), 0.0) {}

    int64_t atoms() const { return K_; }
    int64_t width() const { return W_; }

    double &entry(int64_t k, int64_t l, int64_t lag) {
        return table_[size_t(((k * K_) + l) * (2 * W_ - 1) + lag + W_ - 1)];
    }

    // Lag access with the implicit zero outside the [-W+1, W-1] band.
    double at(int64_t k, int64_t l, int64_t lag) const {
        if (lag <= -W_ || lag >= W_) return 0.0;
        return table_[size_t(((k * K_) + l) * (2 * W_ - 1) + lag + W_ - 1)];
    }

private:
    int64_t K_ = 0, W_ = 0;
    std::vector<double> table_;
};

// The K atoms plus the cached quantities solvers need: per-atom squared
// norms and the cross-correlation table.
class Dictionary {
public:
    Dictionary() = default;
    explicit Dictionary(std::vector<Atom> atoms);

    int64_t num_atoms() const { return int64_t(atoms_.size()); }
    int64_t width() const { return atoms_.empty() ? 0 : atoms_[0].width(); }
    int64_t channels() const { return atoms_.empty() ? 0 : atoms_[0].channels(); }

    const Atom &atom(int64_t k) const { return atoms_[size_t(k)]; }
    const std::vector<Atom> &atoms() const { return atoms_; }
    double sq_norm(int64_t k) const { return sq_norms_[size_t(k)]; }
    const std::vector<double> &sq_norms() const { return sq_norms_; }
    const CrossCorrTable &cross_corr() const { return cross_corr_; }

private:
    std::vector<Atom> atoms_;
    std::vector<double> sq_norms_;
    CrossCorrTable cross_corr_;
};

// K activation signals of length L = T - W + 1, row-major. Reads outside
// [0, L-1] are zero.
class SparseCode {
public:
    SparseCode() = default;
    SparseCode(int64_t K, int64_t L) : K_(K), L_(L), data_(size_t(K * L), 0.0) {
        if (K < 1 || L < 1) throw dimension_error("SparseCode: K and L must be >= 1");
    }

    int64_t num_atoms() const { return K_; }
    int64_t length() const { return L_; }

    double &at(int64_t k, int64_t t) { return data_[size_t(k * L_ + t)]; }
    double at(int64_t k, int64_t t) const { return data_[size_t(k * L_ + t)]; }

    double l1_norm() const {
        double s = 0.0;
        for (double v : data_) s += v < 0 ? -v : v;
        return s;
    }

    std::vector<double> &raw() { return data_; }
    const std::vector<double> &raw() const { return data_; }

private:
    int64_t K_ = 0, L_ = 0;
    std::vector<double> data_;
};

// Full linear convolution of one activation row with one atom:
//   (Z * D)[t] = sum_{tau=0}^{W-1} Z[t - tau] D[tau],  t in [0, L+W-2].
Signal convolve(const std::vector<double> &activation, const Atom &atom);

// Reconstruction sum_k Z_k * D_k as a T x P signal.
Signal reconstruct(const SparseCode &code, const Dictionary &dict);

// Valid-mode cross-correlation of an atom against a signal:
//   out[t] = sum_{tau=0}^{W-1} <D[tau], X[t + tau]>,  t in [0, T-W].
std::vector<double> correlate(const Atom &atom, const Signal &x);

// S_{k,l}[t] for all atom pairs and all lags |t| < W.
CrossCorrTable cross_correlation_table(const std::vector<Atom> &atoms);

// The l1-regularized objective
//   E(Z) = 1/2 ||X - sum_k Z_k * D_k||_2^2 + lambda sum_k ||Z_k||_1.
double cost(const Signal &x, const Dictionary &dict, const SparseCode &code,
            double lambda);

// Residual X - sum_k Z_k * D_k.
Signal residual(const Signal &x, const Dictionary &dict, const SparseCode &code);

} // namespace csc
