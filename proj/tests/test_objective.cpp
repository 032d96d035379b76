#include <doctest.h>

#include <cmath>
#include <random>

#include "csc/objective.hpp"
#include "csc/signal.hpp"
#include "oracles.hpp"

using namespace csc;

namespace {

struct TinyInstance {
    Signal x;
    Dictionary dict;
    SparseCode z;
    BetaState beta;
    double lambda;
};

TinyInstance make_tiny(std::mt19937_64 &rng, int64_t T = 30, int64_t W = 4, int64_t K = 3,
                       int64_t P = 2, double lambda = 0.4) {
    TinyInstance inst{oracle::random_signal(T, P, rng),
                      oracle::random_dictionary(K, W, P, rng),
                      oracle::random_code(K, T - W + 1, rng, 0.3),
                      BetaState(),
                      lambda};
    inst.beta = beta_init(inst.x, inst.dict, inst.z);
    return inst;
}

} // namespace

TEST_CASE("soft threshold definition") {
    CHECK(soft_threshold(2.0, 1.0) == 1.0);
    CHECK(soft_threshold(-0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
}

TEST_CASE("beta at Z = 0 is the atom/signal correlation") {
    std::mt19937_64 rng(31);
    const int64_t T = 25, W = 5, K = 3, P = 2, L = T - W + 1;
    const Signal x = oracle::random_signal(T, P, rng);
    Dictionary dict = oracle::random_dictionary(K, W, P, rng);
    const BetaState beta = beta_init(x, dict, SparseCode(K, L));
    for (int64_t k = 0; k < K; ++k) {
        const std::vector<double> corr = correlate(dict.atom(k), x);
        for (int64_t t = 0; t < L; ++t)
            CHECK(beta.at(k, t) == doctest::Approx(corr[size_t(t)]).epsilon(1e-12));
    }
}

TEST_CASE("beta of the all-zero problem is zero") {
    std::mt19937_64 rng(32);
    Dictionary dict = oracle::random_dictionary(2, 3, 1, rng);
    const BetaState beta = beta_init(Signal(10, 1), dict, SparseCode(2, 8));
    for (double v : beta.raw()) CHECK(v == 0.0);
}

TEST_CASE("beta matches the brute-force masked-residual formula") {
    std::mt19937_64 rng(33);
    for (int rep = 0; rep < 5; ++rep) {
        TinyInstance inst = make_tiny(rng, 16, 3, 2, 1);
        const BetaState want = oracle::brute_beta(inst.x, inst.dict, inst.z);
        for (int64_t k = 0; k < 2; ++k)
            for (int64_t t = 0; t < inst.z.length(); ++t)
                CHECK(inst.beta.at(k, t) == doctest::Approx(want.at(k, t)).epsilon(1e-12));
    }
}

TEST_CASE("coordinate target basics") {
    BetaState beta(1, 3);
    std::vector<double> n2 = {2.0};
    CHECK(coordinate_target(beta, 0, 0, 1.0, n2) == 0.0);
    beta.at(0, 1) = 3.0;
    CHECK(coordinate_target(beta, 0, 1, 1.0, n2) == doctest::Approx(1.0));
}

TEST_CASE("coordinate target minimizes the one-coordinate cost on a grid") {
    std::mt19937_64 rng(34);
    for (int rep = 0; rep < 5; ++rep) {
        TinyInstance inst = make_tiny(rng);
        const int64_t k = rep % inst.z.num_atoms();
        const int64_t t = (rep * 7) % inst.z.length();
        const double star =
            coordinate_target(inst.beta, k, t, inst.lambda, inst.dict.sq_norms());
        const double b = inst.beta.at(k, t);
        const double z_old = inst.z.at(k, t);
        const double n2 = inst.dict.sq_norm(k);
        const double best =
            delta_cost_single(z_old, star, b, n2, inst.lambda);
        const double span = 3.0 * std::fabs(b) + 1.0;
        double grid_best = -1e300;
        double grid_arg = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double u = -span + 2.0 * span * double(i) / 1000.0;
            const double d = delta_cost_single(z_old, u, b, n2, inst.lambda);
            if (d > grid_best) {
                grid_best = d;
                grid_arg = u;
            }
        }
        CHECK(best >= grid_best - 1e-9);
        CHECK(std::fabs(star - grid_arg) <= 2.0 * 2.0 * span / 1000.0);
    }
}

TEST_CASE("delta_cost_single is zero for a no-op update") {
    CHECK(delta_cost_single(1.3, 1.3, -0.7, 2.0, 0.5) == 0.0);
}

TEST_CASE("delta_cost_single equals the full objective difference") {
    std::mt19937_64 rng(35);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        TinyInstance inst = make_tiny(rng);
        const int64_t k = rep % inst.z.num_atoms();
        const int64_t t = (3 + 5 * rep) % inst.z.length();
        const double u = rep % 3 == 0
                             ? coordinate_target(inst.beta, k, t, inst.lambda,
                                                 inst.dict.sq_norms())
                             : gauss(rng);
        const double before = cost(inst.x, inst.dict, inst.z, inst.lambda);
        SparseCode z2 = inst.z;
        z2.at(k, t) = u;
        const double after = cost(inst.x, inst.dict, z2, inst.lambda);
        const double want = before - after;
        const double got = delta_cost_single(inst.z.at(k, t), u, inst.beta.at(k, t),
                                             inst.dict.sq_norm(k), inst.lambda);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("delta_cost_pair: far-apart updates just add") {
    std::mt19937_64 rng(36);
    TinyInstance inst = make_tiny(rng, 40, 4, 2, 1);
    const CoordinateUpdate u0{0, 2, inst.z.at(0, 2), 1.0};
    const CoordinateUpdate u1{1, 20, inst.z.at(1, 20), -0.5};
    CHECK(delta_cost_pair(u0, u1, inst.dict.cross_corr(), 0.3, 0.4) ==
          doctest::Approx(0.7).epsilon(1e-12));
    // a zero second delta also removes the interference term
    const CoordinateUpdate u2{1, 3, 0.8, 0.8};
    CHECK(delta_cost_pair(u0, u2, inst.dict.cross_corr(), 0.3, 0.4) ==
          doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("pair identity: cost(before) - cost(after both) == delta_cost_pair") {
    std::mt19937_64 rng(37);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int overlapping = 0;
    for (int rep = 0; rep < 40; ++rep) {
        TinyInstance inst = make_tiny(rng, 24, 4, 2, 2);
        const int64_t L = inst.z.length();
        std::uniform_int_distribution<int64_t> kd(0, 1), td(0, L - 1);
        const int64_t k0 = kd(rng), k1 = kd(rng);
        int64_t t0 = td(rng), t1 = td(rng);
        if (rep % 2 == 0) t1 = std::min(L - 1, t0 + rep % 4); // force overlaps often
        if (k0 == k1 && t0 == t1) t1 = (t1 + 1) % L;
        if (std::llabs(t1 - t0) < inst.dict.width()) ++overlapping;

        const bool optimal = rep % 3 != 0;
        const double u0 = optimal ? coordinate_target(inst.beta, k0, t0, inst.lambda,
                                                      inst.dict.sq_norms())
                                  : gauss(rng);
        const double u1 = optimal ? coordinate_target(inst.beta, k1, t1, inst.lambda,
                                                      inst.dict.sq_norms())
                                  : gauss(rng);
        // Both deltas are measured against the state before either update:
        // exactly the interference situation.
        const double de0 = delta_cost_single(inst.z.at(k0, t0), u0, inst.beta.at(k0, t0),
                                             inst.dict.sq_norm(k0), inst.lambda);
        const double de1 = delta_cost_single(inst.z.at(k1, t1), u1, inst.beta.at(k1, t1),
                                             inst.dict.sq_norm(k1), inst.lambda);
        const CoordinateUpdate upd0{k0, t0, inst.z.at(k0, t0), u0};
        const CoordinateUpdate upd1{k1, t1, inst.z.at(k1, t1), u1};

        const double before = cost(inst.x, inst.dict, inst.z, inst.lambda);
        SparseCode z2 = inst.z;
        z2.at(k0, t0) = u0;
        z2.at(k1, t1) = u1;
        const double after = cost(inst.x, inst.dict, z2, inst.lambda);

        const double got = delta_cost_pair(upd0, upd1, inst.dict.cross_corr(), de0, de1);
        const double want = before - after;
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
    CHECK(overlapping > 10); // the instance mix must actually exercise interference
}

TEST_CASE("beta_apply_update: zero delta leaves beta untouched") {
    std::mt19937_64 rng(38);
    TinyInstance inst = make_tiny(rng);
    const BetaState before = inst.beta;
    beta_apply_update(inst.beta, {1, 5, 0.7, 0.7}, inst.dict.cross_corr());
    CHECK(inst.beta.raw() == before.raw());
}

TEST_CASE("beta_apply_update matches a from-scratch recompute") {
    std::mt19937_64 rng(39);
    for (int rep = 0; rep < 10; ++rep) {
        TinyInstance inst = make_tiny(rng);
        const int64_t k = rep % inst.z.num_atoms();
        const int64_t t = (11 * rep + 2) % inst.z.length();
        const double u =
            coordinate_target(inst.beta, k, t, inst.lambda, inst.dict.sq_norms());
        const CoordinateUpdate upd{k, t, inst.z.at(k, t), u};
        beta_apply_update(inst.beta, upd, inst.dict.cross_corr());
        inst.z.at(k, t) = u;
        const BetaState fresh = beta_init(inst.x, inst.dict, inst.z);
        for (int64_t kk = 0; kk < inst.z.num_atoms(); ++kk)
            for (int64_t tt = 0; tt < inst.z.length(); ++tt)
                CHECK(inst.beta.at(kk, tt) ==
                      doctest::Approx(fresh.at(kk, tt)).epsilon(1e-10));
    }
}

TEST_CASE("beta entries beyond the halo are bit-identical after an update") {
    std::mt19937_64 rng(40);
    TinyInstance inst = make_tiny(rng, 60, 5, 3, 2);
    const BetaState before = inst.beta;
    const int64_t t0 = 30, k0 = 1;
    const double u =
        coordinate_target(inst.beta, k0, t0, inst.lambda, inst.dict.sq_norms());
    beta_apply_update(inst.beta, {k0, t0, inst.z.at(k0, t0), u}, inst.dict.cross_corr());
    const int64_t W = inst.dict.width();
    for (int64_t k = 0; k < 3; ++k)
        for (int64_t t = 0; t < inst.z.length(); ++t)
            if (std::llabs(t - t0) >= W) CHECK(inst.beta.at(k, t) == before.at(k, t));
    // the updated coordinate masks itself: also bit-identical
    CHECK(inst.beta.at(k0, t0) == before.at(k0, t0));
}

TEST_CASE("beta_apply_update rejects out-of-range coordinates") {
    std::mt19937_64 rng(41);
    TinyInstance inst = make_tiny(rng);
    CHECK_THROWS_AS(
        beta_apply_update(inst.beta, {0, inst.z.length(), 1.0, 0.0}, inst.dict.cross_corr()),
        std::out_of_range);
    CHECK_THROWS_AS(beta_apply_update(inst.beta, {-1, 0, 1.0, 0.0}, inst.dict.cross_corr()),
                    std::out_of_range);
}

TEST_CASE("beta stays consistent over a thousand random updates") {
    std::mt19937_64 rng(42);
    const int64_t T = 300, W = 8, K = 4, P = 2, L = T - W + 1;
    const Signal x = oracle::random_signal(T, P, rng);
    Dictionary dict = oracle::random_dictionary(K, W, P, rng);
    SparseCode z(K, L);
    BetaState beta = beta_init(x, dict, z);
    const double lambda = 0.3;
    std::uniform_int_distribution<int64_t> kd(0, K - 1), td(0, L - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const int64_t k = kd(rng), t = td(rng);
        const double u = i % 4 == 0 ? gauss(rng)
                                    : coordinate_target(beta, k, t, lambda, dict.sq_norms());
        const CoordinateUpdate upd{k, t, z.at(k, t), u};
        beta_apply_update(beta, upd, dict.cross_corr());
        z.at(k, t) = u;
    }
    const BetaState fresh = beta_init(x, dict, z);
    double max_err = 0.0, max_ref = 0.0;
    for (size_t i = 0; i < beta.raw().size(); ++i) {
        max_err = std::max(max_err, std::fabs(beta.raw()[i] - fresh.raw()[i]));
        max_ref = std::max(max_ref, std::fabs(fresh.raw()[i]));
    }
    CHECK(max_err / (1.0 + max_ref) <= 1e-8);
}

TEST_CASE("interference lower bound formula") {
    CHECK(interference_lower_bound(0.3, 0.4, 0.0) == doctest::Approx(0.7));
    CHECK(interference_lower_bound(0.5, 0.5, 1.0) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("strong convexity: |dZ| <= sqrt(2 dE) / ||D||") {
    std::mt19937_64 rng(43);
    for (int rep = 0; rep < 30; ++rep) {
        TinyInstance inst = make_tiny(rng);
        const int64_t k = rep % inst.z.num_atoms();
        const int64_t t = (7 * rep + 1) % inst.z.length();
        const double u =
            coordinate_target(inst.beta, k, t, inst.lambda, inst.dict.sq_norms());
        const double de = delta_cost_single(inst.z.at(k, t), u, inst.beta.at(k, t),
                                            inst.dict.sq_norm(k), inst.lambda);
        const double dz = std::fabs(inst.z.at(k, t) - u);
        CHECK(dz <= std::sqrt(2.0 * std::max(0.0, de)) / std::sqrt(inst.dict.sq_norm(k)) +
                        1e-10);
    }
}

TEST_CASE("pair delta dominates the interference lower bound") {
    std::mt19937_64 rng(44);
    for (int rep = 0; rep < 40; ++rep) {
        TinyInstance inst = make_tiny(rng, 24, 4, 2, 2);
        REQUIRE(check_h1(inst.dict).holds);
        const int64_t L = inst.z.length();
        std::uniform_int_distribution<int64_t> kd(0, 1), td(0, L - 1);
        const int64_t k0 = kd(rng), k1 = kd(rng);
        int64_t t0 = td(rng);
        int64_t t1 = std::min(L - 1, t0 + rep % (2 * inst.dict.width()));
        if (k0 == k1 && t0 == t1) t1 = (t1 + 1) % L;
        const double u0 =
            coordinate_target(inst.beta, k0, t0, inst.lambda, inst.dict.sq_norms());
        const double u1 =
            coordinate_target(inst.beta, k1, t1, inst.lambda, inst.dict.sq_norms());
        const double de0 = delta_cost_single(inst.z.at(k0, t0), u0, inst.beta.at(k0, t0),
                                             inst.dict.sq_norm(k0), inst.lambda);
        const double de1 = delta_cost_single(inst.z.at(k1, t1), u1, inst.beta.at(k1, t1),
                                             inst.dict.sq_norm(k1), inst.lambda);
        REQUIRE(de0 >= -1e-12);
        REQUIRE(de1 >= -1e-12);
        const CoordinateUpdate upd0{k0, t0, inst.z.at(k0, t0), u0};
        const CoordinateUpdate upd1{k1, t1, inst.z.at(k1, t1), u1};
        const double pair =
            delta_cost_pair(upd0, upd1, inst.dict.cross_corr(), de0, de1);
        const double c = std::fabs(inst.dict.cross_corr().at(k0, k1, t0 - t1)) /
                         std::sqrt(inst.dict.sq_norm(k0) * inst.dict.sq_norm(k1));
        CHECK(pair >= interference_lower_bound(std::max(0.0, de0), std::max(0.0, de1), c) -
                          1e-10);
    }
}

TEST_CASE("H1 check flags a duplicated atom") {
    std::mt19937_64 rng(45);
    Dictionary base = oracle::random_dictionary(2, 5, 2, rng);
    std::vector<Atom> atoms = {base.atom(0), base.atom(1), base.atom(0)};
    const H1Report report = check_h1(Dictionary(std::move(atoms)));
    CHECK_FALSE(report.holds);
    CHECK(report.worst_coherence == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.worst_lag == 0);
    CHECK(report.worst_k0 != report.worst_k1);
}

TEST_CASE("H1 check: disjoint one-spike atoms on distinct channels") {
    std::vector<Atom> atoms;
    for (int64_t k = 0; k < 3; ++k) {
        Atom a(1, 3);
        a.at(0, k) = 1.0;
        atoms.push_back(std::move(a));
    }
    const H1Report report = check_h1(Dictionary(std::move(atoms)));
    CHECK(report.holds);
    CHECK(report.worst_coherence == 0.0);
}

TEST_CASE("H1 holds for a random Gaussian dictionary at paper scale") {
    std::mt19937_64 rng(46);
    Dictionary dict = oracle::random_dictionary(25, 200, 7, rng);
    const H1Report report = check_h1(dict);
    CHECK(report.holds);
    CHECK(report.worst_coherence < 1.0);
    CHECK(report.worst_coherence > 0.0); // record a meaningful worst case
}
