#include "csc/signal.hpp"

#include <cmath>

namespace csc {

Dictionary::Dictionary(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw dimension_error("Dictionary: needs at least one atom");
    const int64_t W = atoms_[0].width();
    const int64_t P = atoms_[0].channels();
    for (const Atom &a : atoms_) {
        if (a.width() != W || a.channels() != P)
            throw dimension_error("Dictionary: atoms must share W and P");
    }
    sq_norms_.reserve(atoms_.size());
    for (const Atom &a : atoms_) {
        const double n2 = a.squared_norm();
        if (n2 <= 0.0) throw dimension_error("Dictionary: atom with zero norm");
        sq_norms_.push_back(n2);
    }
    cross_corr_ = cross_correlation_table(atoms_);
}

Signal convolve(const std::vector<double> &activation, const Atom &atom) {
    const int64_t L = int64_t(activation.size());
    const int64_t W = atom.width();
    const int64_t P = atom.channels();
    const int64_t T = L + W - 1;
    Signal out(T, P);
    for (int64_t tz = 0; tz < L; ++tz) {
        const double z = activation[size_t(tz)];
        if (z == 0.0) continue;
        for (int64_t tau = 0; tau < W; ++tau)
            for (int64_t p = 0; p < P; ++p)
                out.at(tz + tau, p) += z * atom.at(tau, p);
    }
    return out;
}

Signal reconstruct(const SparseCode &code, const Dictionary &dict) {
    if (code.num_atoms() != dict.num_atoms())
        throw dimension_error("reconstruct: code K does not match dictionary");
    const int64_t W = dict.width();
    const int64_t P = dict.channels();
    const int64_t L = code.length();
    Signal out(L + W - 1, P);
    for (int64_t k = 0; k < code.num_atoms(); ++k) {
        const Atom &a = dict.atom(k);
        for (int64_t tz = 0; tz < L; ++tz) {
            const double z = code.at(k, tz);
            if (z == 0.0) continue;
            for (int64_t tau = 0; tau < W; ++tau)
                for (int64_t p = 0; p < P; ++p)
                    out.at(tz + tau, p) += z * a.at(tau, p);
        }
    }
    return out;
}

std::vector<double> correlate(const Atom &atom, const Signal &x) {
    const int64_t W = atom.width();
    const int64_t P = atom.channels();
    const int64_t T = x.length();
    if (x.channels() != P)
        throw dimension_error("correlate: channel count mismatch");
    if (T < W)
        throw dimension_error("correlate: signal shorter than atom");
    const int64_t L = T - W + 1;
    std::vector<double> out(size_t(L), 0.0);
    for (int64_t t = 0; t < L; ++t) {
        double acc = 0.0;
        for (int64_t tau = 0; tau < W; ++tau)
            for (int64_t p = 0; p < P; ++p)
                acc += atom.at(tau, p) * x.at(t + tau, p);
        out[size_t(t)] = acc;
    }
    return out;
}

CrossCorrTable cross_correlation_table(const std::vector<Atom> &atoms) {
    const int64_t K = int64_t(atoms.size());
    const int64_t W = atoms[0].width();
    const int64_t P = atoms[0].channels();
    for (const Atom &a : atoms)
        if (a.width() != W || a.channels() != P)
            throw dimension_error("cross_correlation_table: atoms must share W and P");
    CrossCorrTable table(K, W);
    for (int64_t k = 0; k < K; ++k) {
        for (int64_t l = 0; l < K; ++l) {
            for (int64_t lag = -W + 1; lag < W; ++lag) {
                double acc = 0.0;
                const int64_t lo = std::max<int64_t>(0, -lag);
                const int64_t hi = std::min<int64_t>(W, W - lag);
                for (int64_t tau = lo; tau < hi; ++tau)
                    for (int64_t p = 0; p < P; ++p)
                        acc += atoms[size_t(k)].at(tau, p) * atoms[size_t(l)].at(tau + lag, p);
                table.entry(k, l, lag) = acc;
            }
        }
    }
    return table;
}

double cost(const Signal &x, const Dictionary &dict, const SparseCode &code,
            double lambda) {
    if (lambda <= 0.0) throw config_error("cost: lambda must be > 0");
    const Signal rec = reconstruct(code, dict);
    if (rec.length() != x.length() || rec.channels() != x.channels())
        throw dimension_error("cost: reconstruction does not match signal shape");
    double quad = 0.0;
    const std::vector<double> &xa = x.raw();
    const std::vector<double> &ra = rec.raw();
    for (size_t i = 0; i < xa.size(); ++i) {
        const double d = xa[i] - ra[i];
        quad += d * d;
    }
    return 0.5 * quad + lambda * code.l1_norm();
}

Signal residual(const Signal &x, const Dictionary &dict, const SparseCode &code) {
    Signal rec = reconstruct(code, dict);
    if (rec.length() != x.length() || rec.channels() != x.channels())
        throw dimension_error("residual: reconstruction does not match signal shape");
    std::vector<double> &ra = rec.raw();
    const std::vector<double> &xa = x.raw();
    for (size_t i = 0; i < ra.size(); ++i) ra[i] = xa[i] - ra[i];
    return rec;
}

} // namespace csc
