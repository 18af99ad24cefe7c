#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "doctest.h"

#include "core/clt.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

using namespace stochham;

namespace {

Mat mat1(double v) {
    Mat m(1);
    m.at(0, 0) = v;
    return m;
}

GroupSpecD two_groups() {
    GroupSpecD g;
    g.m = {5, 3};
    g.A = {{0.3}, {-0.2}};
    g.Sigma = {mat1(0.04), mat1(0.09)};
    return g;
}

SampleSet scalar_set(std::vector<double> v) {
    SampleSet s;
    s.dim = 1;
    s.values = std::move(v);
    return s;
}

} // namespace

TEST_CASE("group spec validation") {
    GroupSpecD g = two_groups();
    CHECK_NOTHROW(g.validate(8));
    CHECK_THROWS_AS(g.validate(9), SpecError); // multiplicities sum to 8

    GroupSpecD neg = two_groups();
    neg.m = {9, -1};
    CHECK_THROWS_AS(neg.validate(8), SpecError);

    GroupSpecD baddim = two_groups();
    baddim.A[1] = {0.1, 0.2};
    CHECK_THROWS_AS(baddim.validate(8), SpecError);

    GroupSpecD indef;
    indef.m = {2};
    indef.A = {{0.0, 0.0}};
    Mat s2(2);
    s2.at(0, 0) = 1.0; s2.at(0, 1) = 2.0; s2.at(1, 0) = 2.0; s2.at(1, 1) = 1.0;
    indef.Sigma = {s2}; // eigenvalues 3 and -1
    CHECK_THROWS_AS(indef.validate(2), SpecError);
}

TEST_CASE("cf product: exact anchors") {
    CfModel model;
    model.groups = two_groups();
    model.n = 8;
    // t = 0: every factor is 1, no remainder.
    CHECK(cf_product(model, {0.0}) == std::complex<double>(1.0, 0.0));
    // A remainder term shifts the value additively.
    model.d_n = [](const Vec&) { return std::complex<double>(0.25, 0.0); };
    model.d_sup = 0.25;
    CHECK(cf_product(model, {0.0}) == std::complex<double>(1.25, 0.0));
    model.d_n = nullptr;

    // Closed form against a direct evaluation, with a prefactor c.
    model.c = [](const Vec& t) { return std::exp(std::complex<double>(0.0, 0.3 * t[0])); };
    for (double t : {-1.7, 0.4, 2.2}) {
        std::complex<double> expected =
            std::exp(std::complex<double>(-0.5 * t * t * (5 * 0.04 + 3 * 0.09),
                                          t * (5 * 0.3 - 3 * 0.2) + 0.3 * t));
        CHECK(std::abs(cf_product(model, {t}) - expected) < 1e-14);
    }
    model.c = nullptr;

    // Restricted neighborhood: |t| beyond the declared radius is a domain
    // error, not a silent extrapolation.
    model.t_radius = 1.0;
    CHECK_THROWS_AS(cf_product(model, {1.5}), DomainError);
    CHECK_NOTHROW(cf_product(model, {0.99}));

    CHECK_THROWS_AS(cf_product(model, {0.1, 0.1}), SpecError); // dim mismatch
}

TEST_CASE("cf product: iid normalization recovers the standard Gaussian") {
    // One group of n identical factors N(0, 1/1) evaluated at t/sqrt(n):
    // the product is exp(-t^2/2) for every n.
    for (int64_t n : {4, 16, 64}) {
        CfModel model;
        model.groups.m = {n};
        model.groups.A = {{0.0}};
        model.groups.Sigma = {mat1(1.0)};
        model.n = n;
        double root = std::sqrt(static_cast<double>(n));
        for (double t : {0.5, 1.0, 2.0}) {
            std::complex<double> v = cf_product(model, {t / root});
            CHECK(std::abs(v - std::complex<double>(std::exp(-0.5 * t * t), 0.0)) < 1e-12);
        }
    }
}

TEST_CASE("cf product matches the empirical CF of a grouped sum") {
    // Synthetic sum of 8 independent Gaussian factors in two groups; the
    // empirical CF of 1e5 replicas must track the model product uniformly.
    GroupSpecD g = two_groups();
    CfModel model;
    model.groups = g;
    model.n = 8;
    const int reps = 100000;
    std::vector<double> sums(reps);
    Stream rng(master_key(601u, Purpose::main), 11);
    for (int r = 0; r < reps; ++r) {
        double s = 0.0;
        for (int64_t j = 0; j < g.m[0]; ++j) s += 0.3 + 0.2 * rng.normal();
        for (int64_t j = 0; j < g.m[1]; ++j) s += -0.2 + 0.3 * rng.normal();
        sums[static_cast<size_t>(r)] = s;
    }
    SampleSet set = scalar_set(sums);
    double sup = 0.0;
    for (int i = 0; i < 21; ++i) {
        double t = -3.0 + 6.0 * i / 20.0;
        sup = std::max(sup, std::abs(empirical_cf(set, {t}) - cf_product(model, {t})));
    }
    CHECK(sup < 0.02);
}

TEST_CASE("gaussian limit from groups") {
    GroupSpecD one;
    one.m = {10};
    one.A = {{0.3}};
    one.Sigma = {mat1(0.7)};
    GaussianLimit lim = gaussian_limit_from_groups(one, 10);
    CHECK(lim.mean[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(lim.cov.at(0, 0) == doctest::Approx(0.7).epsilon(1e-15));

    GroupSpecD halves;
    halves.m = {6, 6};
    halves.A = {{0.0}, {0.0}};
    halves.Sigma = {mat1(0.4), mat1(1.0)};
    lim = gaussian_limit_from_groups(halves, 12);
    CHECK(lim.mean[0] == 0.0);
    CHECK(lim.cov.at(0, 0) == doctest::Approx(0.7).epsilon(1e-14)); // (v1 + v2)/2

    // One factor among n = 8 carrying variance 0.47: cov = 0.47/8.
    GroupSpecD sparse;
    sparse.m = {1, 7};
    sparse.A = {{0.0}, {0.0}};
    sparse.Sigma = {mat1(0.47), mat1(0.0)};
    lim = gaussian_limit_from_groups(sparse, 8);
    CHECK(lim.cov.at(0, 0) == doctest::Approx(0.05875).epsilon(1e-14));

    // The Gaussian CF of the limit at a few pins.
    GaussianLimit law;
    law.mean = {1.0};
    law.cov = mat1(2.0);
    std::complex<double> v = gaussian_cf(law, {0.5});
    std::complex<double> expected = std::exp(std::complex<double>(-0.25, 0.5));
    CHECK(std::abs(v - expected) < 1e-14);
}

TEST_CASE("gaussian limit family: Cauchy diagnostic") {
    std::vector<GroupSpecD> fam;
    std::vector<int64_t> ns;
    for (int j = 1; j <= 20; ++j) {
        int64_t n = 10 * j;
        GroupSpecD g;
        g.m = {n};
        g.A = {{0.0}};
        g.Sigma = {mat1(0.8 * (1.0 + 1.0 / static_cast<double>(n)))};
        fam.push_back(g);
        ns.push_back(n);
    }
    FamilyDiagnostic diag = gaussian_limit_family(fam, ns, 1e-3);
    CHECK(diag.converged);
    CHECK(diag.cauchy_gap < 1e-3);
    CHECK(diag.limit.cov.at(0, 0) == doctest::Approx(0.8 * (1.0 + 1.0 / 200.0)).epsilon(1e-14));

    // An oscillating family never settles.
    for (size_t j = 0; j < fam.size(); ++j)
        fam[j].Sigma = {mat1(j % 2 == 0 ? 0.5 : 1.0)};
    diag = gaussian_limit_family(fam, ns, 1e-3);
    CHECK_FALSE(diag.converged);
    CHECK(diag.cauchy_gap == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(gaussian_limit_family({}, {}, 1e-3), SpecError);
}

TEST_CASE("continuous limit from a multiplicity density") {
    auto a_zero = [](double) { return Vec{0.0}; };

    // Constant density: the covariance integral collapses to Sigma.
    auto lim = continuous_limit_from_density([](double) { return 1.0; }, a_zero,
                                             [](double) { return mat1(0.9); }, 3.0, 2.0);
    CHECK(lim.mean[0] == 0.0);
    CHECK(lim.cov.at(0, 0) == doctest::Approx(0.9).epsilon(1e-10));

    // m_s = s, Sigma_s = s on [1, 2] with T = 3/2: integral of s^2 is 7/3,
    // so the covariance is (7/3)/(3/2) = 14/9.
    lim = continuous_limit_from_density([](double s) { return s; }, a_zero,
                                        [](double s) { return mat1(s); }, 2.0, 1.5);
    CHECK(lim.cov.at(0, 0) == doctest::Approx(14.0 / 9.0).epsilon(1e-10));

    // Nonzero drift density integrates through the mean.
    lim = continuous_limit_from_density([](double) { return 1.0; },
                                        [](double s) { return Vec{s}; },
                                        [](double) { return mat1(0.0); }, 2.0, 1.0);
    CHECK(lim.mean[0] == doctest::Approx(1.5).epsilon(1e-10));

    // Declared T inconsistent with the density mass.
    CHECK_THROWS_AS(continuous_limit_from_density([](double) { return 1.0; }, a_zero,
                                                  [](double) { return mat1(1.0); }, 2.5, 1.0),
                    SpecError);
    CHECK_THROWS_AS(continuous_limit_from_density([](double) { return 1.0; }, a_zero,
                                                  [](double) { return mat1(1.0); }, 1.0, 1.0),
                    SpecError);
}

TEST_CASE("convergent subsequence extraction") {
    // Constant sequence: everything is within tol of the limit.
    std::vector<Mat> constant(30, mat1(0.3));
    SubsequenceResult res = extract_convergent_subsequence(constant, 1e-6, 0.5);
    CHECK(res.indices.size() == 30);
    CHECK(res.limit.at(0, 0) == doctest::Approx(0.3).epsilon(1e-14));

    // Alternating values: the smaller accumulation point wins, and exactly
    // the matching half of the sequence is selected.
    std::vector<Mat> alt;
    for (int j = 0; j < 40; ++j) alt.push_back(mat1(j % 2 == 0 ? 0.2 : 0.4));
    res = extract_convergent_subsequence(alt, 1e-3, 1.0);
    CHECK(res.limit.at(0, 0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(res.indices.size() == 20);
    for (size_t idx : res.indices) CHECK(idx % 2 == 0);

    // v + 1/j converges to v; the selection covers the tail.
    std::vector<Mat> tail;
    for (int j = 1; j <= 100; ++j) tail.push_back(mat1(0.3 + 1.0 / j));
    res = extract_convergent_subsequence(tail, 0.01, 1.0);
    CHECK(std::abs(res.limit.at(0, 0) - 0.3) < 0.02);
    CHECK(res.indices.size() >= 10);
    CHECK(res.indices.back() == 99);
    CHECK(res.indices.front() > 30); // early, far-from-limit entries are excluded

    CHECK_THROWS_AS(extract_convergent_subsequence({}, 0.01, 1.0), SpecError);
    CHECK_THROWS_AS(extract_convergent_subsequence(constant, -1.0, 1.0), SpecError);
    // The declared elementwise bound eta^2 is enforced on the limit.
    std::vector<Mat> big(20, mat1(0.5));
    CHECK_THROWS_AS(extract_convergent_subsequence(big, 1e-6, 0.1), SpecError);
}

TEST_CASE("statistic terms: extraction and alignment errors") {
    System sys = System::make_pendulum(9.81, 9.81); // omega = 1
    SimSpec spec;
    spec.I0 = {1.0};
    spec.theta0 = {0.0};
    spec.grid = TimeGrid{0.0, 0.25, 16}; // t_end = 4
    ActionAnglePath path = simulate(sys, spec, master_key(602u, Purpose::main), 0);

    std::vector<double> z;
    statistic_terms(path, 1.0, 4, z);
    REQUIRE(z.size() == 4);
    for (double v : z) CHECK(v == 1.0); // theta(k delta) = k delta exactly

    // delta off the grid.
    CHECK_THROWS_WITH_AS(statistic_terms(path, 0.3, 4, z),
                         doctest::Contains("k=1"), SpecError);
    // Path too short for n terms.
    CHECK_THROWS_WITH_AS(statistic_terms(path, 1.0, 5, z),
                         doctest::Contains("k=5"), SpecError);
    CHECK_THROWS_AS(statistic_terms(path, -1.0, 4, z), SpecError);
    CHECK_THROWS_AS(statistic_terms(path, 1.0, 0, z), SpecError);
}

TEST_CASE("statistic accumulator: slots, discards, order independence") {
    System sys = System::make_pendulum(9.81, 9.81);
    SimSpec spec;
    spec.I0 = {1.0};
    spec.theta0 = {0.0};
    spec.zeta = 0.5;
    spec.grid = TimeGrid{0.0, 0.25, 16};
    uint64_t master = master_key(603u, Purpose::main);
    ActionAnglePath p0 = simulate(sys, spec, master, 0);
    ActionAnglePath p1 = simulate(sys, spec, master, 1);
    ActionAnglePath p2 = simulate(sys, spec, master, 2);

    StatisticAccumulator fwd(1, 4, 1.0, 3);
    fwd.add_path(0, p0);
    fwd.add_path(1, p1);
    fwd.add_path(2, p2);
    StatisticAccumulator rev(1, 4, 1.0, 3);
    rev.add_path(2, p2);
    rev.add_path(0, p0);
    rev.add_path(1, p1);
    CltStatistic a = fwd.finalize();
    CltStatistic b = rev.finalize();
    CHECK(a.raw_sum == b.raw_sum); // slot-addressed: insertion order is invisible
    CHECK(a.normalized == b.normalized);
    CHECK(a.centering == b.centering);

    StatisticAccumulator disc(1, 4, 1.0, 3);
    disc.add_path(0, p0);
    disc.mark_discarded(1);
    disc.add_path(2, p2);
    CHECK(disc.discarded() == 1);
    CltStatistic c = disc.finalize();
    CHECK(c.replicas == 2);
    CHECK(c.raw_sum.size() == 2);
    CHECK(c.raw_sum[0] == a.raw_sum[0]);
    CHECK(c.raw_sum[1] == a.raw_sum[2]);

    StatisticAccumulator hole(1, 4, 1.0, 2);
    hole.add_path(0, p0);
    CHECK_THROWS_AS(hole.finalize(), SpecError); // unfilled slot

    StatisticAccumulator starved(1, 4, 1.0, 2);
    starved.add_path(0, p0);
    starved.mark_discarded(1);
    CHECK_THROWS_AS(starved.finalize(), SpecError); // fewer than 2 survivors

    CHECK_THROWS_AS(fwd.add_path(3, p0), SpecError); // slot out of range
    CHECK_THROWS_AS(StatisticAccumulator(1, 4, 1.0, 0), SpecError);
}

TEST_CASE("assemble statistic: degenerate ensembles vanish after centering") {
    System sys = System::make_pendulum(9.81, 9.81);
    SimSpec spec;
    spec.I0 = {1.0};
    spec.theta0 = {0.1};
    spec.zeta = 0.7;
    spec.grid = TimeGrid{0.0, 0.25, 16};
    uint64_t master = master_key(604u, Purpose::main);

    // The same replica twice: identical raw sums, so the centered values are
    // exactly zero and so is the replica spread.
    ActionAnglePath p = simulate(sys, spec, master, 0);
    CltStatistic s = assemble_statistic({p, p}, 1.0, 4);
    CHECK(s.normalized[0] == 0.0);
    CHECK(s.normalized[1] == 0.0);
    CHECK(s.centering_se[0] == 0.0);

    // Fully deterministic rotation: every replica gives the identical sum
    // n + theta0 * H_n / delta... the exact value is irrelevant; what matters
    // is that the normalized ensemble is identically zero.
    spec.zeta = 0.0;
    std::vector<ActionAnglePath> det;
    for (uint32_t r = 0; r < 4; ++r) det.push_back(simulate(sys, spec, master, r));
    s = assemble_statistic(det, 1.0, 4);
    for (double v : s.normalized) CHECK(v == 0.0);
    CHECK(s.replicas == 4);
}

TEST_CASE("assemble statistic: Brownian angle ensemble hits the exact variance") {
    // Pendulum with omega = 1 and pure Brownian angle noise: the summed
    // statistic has Var = zeta^2 (2n - H_n)/delta exactly, i.e. the
    // normalized values have variance zeta^2 (2n - H_n)/(n delta^2).
    // With zeta^2 = 1/2, n = 512, delta = 1: 0.5 * 1.986686 = 0.993343.
    System sys = System::make_pendulum(9.81, 9.81);
    const int64_t n = 512;
    const int64_t reps = 4000;
    SimSpec spec;
    spec.I0 = {1.0};
    spec.theta0 = {0.0};
    spec.zeta = 1.0 / std::sqrt(2.0);
    spec.grid = TimeGrid{0.0, 1.0, n};
    uint64_t master = master_key(605u, Purpose::main);

    StatisticAccumulator acc(1, n, 1.0, reps);
    for (int64_t r = 0; r < reps; ++r)
        acc.add_path(r, simulate(sys, spec, master, static_cast<uint32_t>(r)));
    CltStatistic s = acc.finalize();

    Moments m = sample_moments(scalar_set(s.normalized));
    CHECK(m.cov.at(0, 0) > 0.85);
    CHECK(m.cov.at(0, 0) < 1.15);
    // The ensemble is exactly Gaussian here, so the KS distance against the
    // fitted normal is pure sampling noise.
    CHECK(ks_vs_gaussian(s.normalized, 0.0, m.cov.at(0, 0)) < 0.03);
}

TEST_CASE("predicted limit law") {
    // Gaussian angle noise: rank-one covariance, no bounds attached.
    System pend = System::make_pendulum(9.81, 1.0);
    SimSpec cfg;
    cfg.I0 = {1.0};
    cfg.theta0 = {0.0};
    cfg.zeta = 0.5;
    GaussianLimit lim = predicted_limit(pend, cfg, {1.3});
    CHECK(lim.mean[0] == 0.0);
    CHECK(lim.cov.at(0, 0) == doctest::Approx(1.69).epsilon(1e-14));
    CHECK_FALSE(lim.cov_lower.has_value());
    CHECK_FALSE(lim.cov_upper.has_value());

    // 1-D Levy angle noise: the sandwich [w^2, w^2 + 2 zeta^2 gamma_2^2].
    LevyTriplet trip;
    trip.dim = 1;
    trip.gamma = {0.3};
    trip.xi = 1.0;
    cfg.angle_noise.is_levy = true;
    cfg.angle_noise.triplet = trip;
    cfg.zeta = 0.2;
    lim = predicted_limit(pend, cfg, {1.0});
    REQUIRE(lim.cov_lower.has_value());
    REQUIRE(lim.cov_upper.has_value());
    CHECK(lim.cov_lower->at(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lim.cov_upper->at(0, 0) == doctest::Approx(1.0072).epsilon(1e-12));

    // Two-dimensional case: rank-one center w w' and widened elementwise
    // upper bounds.
    CustomFrequencyMap map;
    map.base = {1.0, 2.0};
    map.width = 5.0;
    System cust = System::make_custom(map);
    SimSpec cfg2;
    cfg2.I0 = {1.0, 1.0};
    cfg2.theta0 = {0.0, 0.0};
    cfg2.zeta = 0.4;
    LevyTriplet trip2;
    trip2.dim = 2;
    trip2.gamma = {0.3, 0.3};
    trip2.xi = 1.0;
    cfg2.angle_noise.is_levy = true;
    cfg2.angle_noise.triplet = trip2;
    Vec w = {1.0, 2.0};
    lim = predicted_limit(cust, cfg2, w);
    CHECK(lim.cov.at(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lim.cov.at(0, 1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(lim.cov.at(1, 1) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(is_psd(lim.cov, 1e-12));
    double eta_sq = 0.4 * 0.4;
    for (size_t p = 0; p < 2; ++p)
        for (size_t q = 0; q < 2; ++q) {
            double base = w[p] * w[q];
            double width = eta_sq * 0.36 + 2.0 * base; // (gamma_p + gamma_q)^2 = 0.36
            CHECK(lim.cov_lower->at(p, q) == doctest::Approx(base).epsilon(1e-14));
            CHECK(lim.cov_upper->at(p, q) == doctest::Approx(base + width).epsilon(1e-13));
        }

    CHECK_THROWS_AS(predicted_limit(cust, cfg2, {1.0}), SpecError); // w_bar dim mismatch
}
