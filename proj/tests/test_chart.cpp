#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"

#include "core/oscillator.hpp"
#include "core/pendulum.hpp"
#include "core/rng.hpp"
#include "core/system.hpp"

using namespace stochham;

namespace {

std::string temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "stochham_chart_test";
    std::filesystem::create_directories(dir);
    return dir.string();
}

} // namespace

TEST_CASE("oscillator chart: period, constants, reference orbit") {
    auto chart = OscillatorChart::build(1, 1e-10);
    // Frozen oracle: independent regularized quadrature for the m = 1
    // reference period (also pinned in the quadrature tests).
    CHECK(std::abs(chart->t_star() - 7.4162987092) < 1e-8);
    CHECK(chart->energy_drift() <= 1e-10);
    CHECK(chart->alpha() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(chart->beta() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(chart->c() == doctest::Approx(3.0 / chart->t_star()).epsilon(1e-14));
    // The reference orbit starts at (1, 0).
    CHECK(chart->C(0.0) == 1.0);
    CHECK(chart->S(0.0) == 0.0);
}

TEST_CASE("oscillator chart: energy consistency over random chart points") {
    const double tol = 1e-10;
    auto chart = OscillatorChart::build(1, tol);
    Stream rng(master_key(301u, Purpose::main), 0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        double I = 0.5 + 4.5 * rng.uniform01();
        double theta = rng.uniform01();
        double x = 0.0, y = 0.0;
        chart->to_cartesian(I, theta, x, y);
        worst = std::max(worst, std::abs(chart->hamiltonian(x, y) - chart->energy_of_action(I)));
    }
    CHECK(worst <= 10.0 * tol);
}

TEST_CASE("oscillator chart: frequency-period duality") {
    for (int m = 1; m <= 3; ++m) {
        CAPTURE(m);
        auto chart = OscillatorChart::build(m, 1e-10);
        Stream rng(master_key(302u, Purpose::main), static_cast<uint64_t>(m));
        for (int i = 0; i < 10; ++i) {
            double I = 0.5 + 4.5 * rng.uniform01();
            double gap = std::abs(chart->frequency(I) * chart->measure_period(I) - 1.0);
            CHECK(gap <= 1e-6);
        }
    }
}

TEST_CASE("oscillator chart: reference-orbit symmetry and periodicity") {
    auto chart = OscillatorChart::build(1, 1e-10);
    double ts = chart->t_star();
    // Time-reversal through the section: C is even, S is odd; combined with
    // T_star-periodicity this reads C(T_star - s) = C(s), S(T_star - s) = -S(s).
    for (double s : {0.1, 0.7, 1.9, 3.3, 5.2}) {
        CHECK(std::abs(chart->C(ts - s) - chart->C(s)) < 1e-9);
        CHECK(std::abs(chart->S(ts - s) + chart->S(s)) < 1e-9);
        CHECK(std::abs(chart->C(s + ts) - chart->C(s)) < 1e-12);
        CHECK(std::abs(chart->S(s + ts) - chart->S(s)) < 1e-12);
    }
}

TEST_CASE("oscillator chart: angle wrap and the section image") {
    auto chart = OscillatorChart::build(1, 1e-10);
    for (double I : {0.5, 1.0, 3.7}) {
        double x1, y1, x2, y2;
        chart->to_cartesian(I, 0.37, x1, y1);
        chart->to_cartesian(I, 1.37, x2, y2);
        CHECK(std::abs(x1 - x2) < 1e-12);
        CHECK(std::abs(y1 - y2) < 1e-12);
        // theta = 0 lands on the section {y = 0, x = A(I)}.
        chart->to_cartesian(I, 0.0, x1, y1);
        CHECK(y1 == 0.0);
        CHECK(std::abs(x1 - chart->amplitude_of_action(I)) <= 1e-13 * chart->amplitude_of_action(I));
    }
}

TEST_CASE("oscillator chart: frequency scaling law and monotonicity") {
    auto chart = OscillatorChart::build(1, 1e-10);
    // omega(I) = beta c^(2 beta) I^(2 beta - 1)/(m + 1) is a pure power law:
    // omega(4 I)/omega(I) = 4^(2 beta - 1) for every I.
    double expo = 2.0 * chart->beta() - 1.0;
    for (double I : {0.25, 1.0, 2.5}) {
        double ratio = chart->frequency(4.0 * I) / chart->frequency(I);
        CHECK(ratio == doctest::Approx(std::pow(4.0, expo)).epsilon(1e-13));
    }
    double prev = chart->frequency(0.1);
    for (int j = 1; j <= 40; ++j) {
        double I = 0.1 + 0.25 * j;
        double cur = chart->frequency(I);
        CHECK(cur > prev);
        prev = cur;
    }
    // Frozen m = 1 frequency normalization: omega(I) = 0.09972196 * I^(1/3).
    CHECK(chart->frequency(1.0) == doctest::Approx(0.09972196).epsilon(1e-6));
}

TEST_CASE("oscillator chart: cache round-trip") {
    auto chart = OscillatorChart::build(1, 1e-10);
    std::string path = temp_dir() + "/chart_m1.cache";
    chart->save_cache(path);

    auto loaded = OscillatorChart::load_cache(path, 1, 1e-10);
    REQUIRE(loaded != nullptr);
    CHECK(loaded->t_star() == chart->t_star()); // 17-digit text round-trip is exact
    CHECK(loaded->c() == chart->c());
    CHECK(loaded->energy_drift() == chart->energy_drift());
    for (double s : {0.0, 0.31, 2.71, 6.9}) {
        CHECK(loaded->C(s) == chart->C(s));
        CHECK(loaded->S(s) == chart->S(s));
    }
    CHECK(OscillatorChart::load_cache(path, 2, 1e-10) == nullptr);
    CHECK(OscillatorChart::load_cache(path, 1, 1e-9) == nullptr);
    CHECK(OscillatorChart::load_cache(temp_dir() + "/absent.cache", 1, 1e-10) == nullptr);
    std::remove(path.c_str());
}

TEST_CASE("pendulum: frequency and period") {
    CHECK(Pendulum{9.81, 1.0}.omega() == doctest::Approx(3.132091952673165).epsilon(1e-12));
    CHECK(Pendulum{2.5, 2.5}.omega() == 1.0);  // g = l: sqrt(1) exactly
    CHECK(Pendulum{1.0, 4.0}.omega() == 0.5);  // sqrt(0.25) exactly
    Pendulum p{9.81, 1.0};
    CHECK(p.period() * p.omega() == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
}

TEST_CASE("pendulum: equilibrium classification") {
    Pendulum p{9.81, 1.0};
    double w = p.omega();
    auto eq = classify_equilibria(p, -2, 2);
    REQUIRE(eq.size() == 5);
    for (int k = -2; k <= 2; ++k) {
        const Equilibrium& e = eq[static_cast<size_t>(k + 2)];
        CHECK(e.q == doctest::Approx(k * M_PI).epsilon(1e-15));
        if (k % 2 == 0) {
            CHECK(e.kind == EquilibriumKind::center);
            CHECK(e.real_part == 0.0);
            CHECK(e.imag_part == doctest::Approx(w).epsilon(1e-14));
        } else {
            CHECK(e.kind == EquilibriumKind::saddle);
            CHECK(e.imag_part == 0.0);
            CHECK(e.real_part == doctest::Approx(w).epsilon(1e-14));
        }
    }
}

TEST_CASE("system facade: kinds, domains, frequencies") {
    System pend = System::make_pendulum(9.81, 1.0);
    CHECK(pend.kind() == SystemKind::pendulum);
    CHECK(pend.dim() == 1);
    double I = 2.0, w = 0.0;
    CHECK(pend.domain_ok(&I));
    pend.omega(&I, &w);
    CHECK(w == doctest::Approx(3.132091952673165).epsilon(1e-12));

    System osc = System::make_oscillator(1, 1e-10, temp_dir());
    CHECK(osc.kind() == SystemKind::oscillator);
    double bad = 0.0;
    CHECK_FALSE(osc.domain_ok(&bad));
    bad = -1.0;
    CHECK_FALSE(osc.domain_ok(&bad));
    double good = 1.0;
    CHECK(osc.domain_ok(&good));
    osc.omega(&good, &w);
    CHECK(w == doctest::Approx(osc.chart().frequency(1.0)).epsilon(1e-15));
    // Second construction hits the cache written by the first and must agree.
    System osc2 = System::make_oscillator(1, 1e-10, temp_dir());
    CHECK(osc2.chart().t_star() == osc.chart().t_star());

    CustomFrequencyMap map;
    map.base = {1.0, 2.0};
    map.amp = 0.4;
    map.center = 20.0;
    map.width = 5.0;
    System cust = System::make_custom(map);
    CHECK(cust.dim() == 2);
    double I2[2] = {20.0, 20.0}; // mean(I) = center: modulation vanishes
    double w2[2] = {0.0, 0.0};
    cust.omega(I2, w2);
    CHECK(w2[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w2[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(cust.custom().bound() == doctest::Approx(2.0 * 1.4).epsilon(1e-14));
}
