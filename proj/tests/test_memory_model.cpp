#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>

#include "dlcz/memory_model.hpp"

using dlcz::DegenerateDenominator;
using dlcz::DomainError;
using dlcz::ProbabilityOverflow;
using dlcz::ValidationError;
using namespace dlcz::model;

namespace {

PhysicsParams defaults() { return PhysicsParams{}; }

} // namespace

// ── storage decay ───────────────────────────────────────────────────────

TEST_CASE("retrieval starts at the zero-delay efficiency") {
    REQUIRE(retrieval_efficiency(0.0, DecayModel{0.70, 600.0}) == 0.70);
    REQUIRE(retrieval_efficiency(0.0, DecayModel{0.35, 90.0}) == 0.35);
}

TEST_CASE("at one lifetime both decay branches hit 1/e") {
    const double r = retrieval_efficiency(600.0, DecayModel{0.70, 600.0});
    const double longhand = 0.70 * 0.5 * (std::exp(-1.0) + std::exp(-1.0));
    REQUIRE(r == Catch::Approx(longhand).epsilon(1e-15));
    REQUIRE(r == Catch::Approx(0.2575156).epsilon(1e-6));
}

TEST_CASE("retrieval vanishes at very long delays") {
    REQUIRE(retrieval_efficiency(1e9, DecayModel{0.70, 600.0}) == 0.0);
}

TEST_CASE("retrieval is strictly decreasing and stays within [0, R0]") {
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> tdist(0.0, 4000.0);
    const DecayModel d{0.70, 600.0};
    for (int rep = 0; rep < 500; ++rep) {
        double t1 = tdist(gen);
        double t2 = tdist(gen);
        if (t1 > t2) std::swap(t1, t2);
        const double r1 = retrieval_efficiency(t1, d);
        const double r2 = retrieval_efficiency(t2, d);
        REQUIRE(r1 >= 0.0);
        REQUIRE(r1 <= d.r0);
        if (t1 < t2) REQUIRE(r1 > r2);
    }
}

TEST_CASE("decay rejects negative delay and non-positive lifetime") {
    REQUIRE_THROWS_AS(retrieval_efficiency(-1.0, DecayModel{0.7, 600.0}), DomainError);
    REQUIRE_THROWS_AS(retrieval_efficiency(10.0, DecayModel{0.7, 0.0}), DomainError);
    REQUIRE_THROWS_AS(retrieval_efficiency(10.0, DecayModel{0.7, -5.0}), DomainError);
}

// ── cavity noise enhancement ────────────────────────────────────────────

TEST_CASE("noise enhancement is 2F/pi") {
    REQUIRE(cavity_enhancement(16.0) == Catch::Approx(32.0 / M_PI).epsilon(1e-15));
    REQUIRE(cavity_enhancement(16.0) == Catch::Approx(10.1859164).epsilon(1e-7));
    REQUIRE(cavity_enhancement(M_PI / 2.0) == Catch::Approx(1.0).epsilon(1e-15));
    REQUIRE(cavity_enhancement(160.0) == Catch::Approx(101.859164).epsilon(1e-8));
}

TEST_CASE("finesse below one is rejected") {
    REQUIRE_THROWS_AS(cavity_enhancement(0.5), DomainError);
}

// ── detection chain ─────────────────────────────────────────────────────

TEST_CASE("readout detection chain multiplies its three stages") {
    REQUIRE(detection_efficiency_as(0.60, 0.34, 0.68) ==
            Catch::Approx(0.60 * 0.34 * 0.68).epsilon(1e-15));
    REQUIRE(detection_efficiency_as(0.60, 0.34, 0.68) ==
            Catch::Approx(0.13872).epsilon(1e-12));
    REQUIRE(detection_efficiency_as(1.0, 1.0, 1.0) == 1.0);
    REQUIRE(detection_efficiency_as(0.5, 0.5, 0.5) == Catch::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("detection stages outside [0,1] are rejected") {
    REQUIRE_THROWS_AS(detection_efficiency_as(1.2, 0.5, 0.5), DomainError);
    REQUIRE_THROWS_AS(detection_efficiency_as(0.5, -0.1, 0.5), DomainError);
}

// ── click probabilities ─────────────────────────────────────────────────

TEST_CASE("herald click probability is excitation times detection") {
    PhysicsParams p = defaults();
    REQUIRE(stokes_click_prob(p) == Catch::Approx(0.0179 * 0.14).epsilon(1e-15));
    REQUIRE(stokes_click_prob(p) == Catch::Approx(2.5e-3).epsilon(0.005));
    p.chi = 0.0;
    REQUIRE(stokes_click_prob(p) == 0.0);
    p.chi = 0.05;
    REQUIRE(stokes_click_prob(p) == Catch::Approx(7.0e-3).epsilon(1e-12));
}

TEST_CASE("readout click probability matches the longhand sum of terms") {
    const PhysicsParams p = defaults();
    const double a = 2.0 * 16.0 / M_PI;
    const double r = 0.70;
    const double pre = 0.0179 * r + 0.0179 * (1.0 - r) * 0.3 * a + 2e-3;
    const double eta = 0.60 * 0.34 * 0.68;
    REQUIRE(antistokes_click_prob(p, 0.0) == Catch::Approx(eta * pre).epsilon(1e-13));
    REQUIRE(antistokes_click_prob(p, 0.0) == Catch::Approx(4.292e-3).epsilon(5e-4));
}

TEST_CASE("readout click probability vanishes without excitation or noise") {
    PhysicsParams p = defaults();
    p.chi = 0.0;
    p.z_noise = 0.0;
    REQUIRE(antistokes_click_prob(p, 0.0) == 0.0);
}

TEST_CASE("with unit retrieval the noise term drops out") {
    PhysicsParams p = defaults();
    p.decay.r0 = 1.0;
    const double eta = detection_efficiency_as(p.eta_esp, p.eta_t, p.eta_d);
    REQUIRE(antistokes_click_prob(p, 0.0) ==
            Catch::Approx(eta * (p.chi + p.z_noise)).epsilon(1e-13));
}

TEST_CASE("readout click probability never exceeds the detection ceiling") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> chi(0.0, 0.03);
    std::uniform_real_distribution<double> xi(0.0, 1.0);
    std::uniform_real_distribution<double> t(0.0, 2000.0);
    for (int rep = 0; rep < 300; ++rep) {
        PhysicsParams p = defaults();
        p.chi = chi(gen);
        p.xi_se = xi(gen);
        const double ceiling = detection_efficiency_as(p.eta_esp, p.eta_t, p.eta_d);
        REQUIRE(antistokes_click_prob(p, t(gen)) <= ceiling);
    }
}

TEST_CASE("an event budget above one is refused") {
    PhysicsParams p = defaults();
    p.chi = 0.5;
    p.xi_se = 1.0;
    REQUIRE_THROWS_AS(antistokes_click_prob(p, 0.0), ProbabilityOverflow);
}

TEST_CASE("pair probability is the correlated term plus the singles product") {
    const PhysicsParams p = defaults();
    const double correlated = 0.0179 * 0.70 * 0.14 * (0.60 * 0.34 * 0.68);
    const double singles = stokes_click_prob(p) * antistokes_click_prob(p, 0.0);
    REQUIRE(coincidence_prob(p, 0.0) ==
            Catch::Approx(correlated + singles).epsilon(1e-13));
    REQUIRE(coincidence_prob(p, 0.0) == Catch::Approx(2.540e-4).epsilon(2e-3));
}

TEST_CASE("without retrieval the pair rate is purely accidental") {
    PhysicsParams p = defaults();
    const double t = 1e9; // storage long enough that retrieval is zero
    REQUIRE(coincidence_prob(p, t) ==
            Catch::Approx(stokes_click_prob(p) * antistokes_click_prob(p, t))
                .epsilon(1e-15));
}

// ── second-order correlation ────────────────────────────────────────────

TEST_CASE("zero-delay correlation matches the longhand ratio") {
    const PhysicsParams p = defaults();
    const double a = 2.0 * 16.0 / M_PI;
    const double denom = 0.0179 * (0.70 + 0.30 * 0.3 * a) + 2e-3;
    REQUIRE(analytic_g2(p, 0.0) == Catch::Approx(1.0 + 0.70 / denom).epsilon(1e-13));
    REQUIRE(analytic_g2(p, 0.0) == Catch::Approx(23.6).epsilon(2e-3));
}

TEST_CASE("correlation at one lifetime stays well above the classical bound") {
    const PhysicsParams p = defaults();
    const double g2 = analytic_g2(p, 600.0);
    REQUIRE(g2 == Catch::Approx(6.45).epsilon(2e-3));
    REQUIRE(g2 > 2.0);
}

TEST_CASE("correlation decays to one with the memory") {
    const PhysicsParams p = defaults();
    REQUIRE(analytic_g2(p, 1e9) == 1.0);
}

TEST_CASE("correlation is never below one") {
    std::mt19937 gen(9);
    std::uniform_real_distribution<double> chi(1e-4, 0.03);
    std::uniform_real_distribution<double> xi(0.0, 1.0);
    std::uniform_real_distribution<double> t(0.0, 3000.0);
    for (int rep = 0; rep < 300; ++rep) {
        PhysicsParams p = defaults();
        p.chi = chi(gen);
        p.xi_se = xi(gen);
        REQUIRE(analytic_g2(p, t(gen)) >= 1.0);
    }
}

TEST_CASE("noise-free correlation reduces to 1 + 1/chi") {
    std::mt19937 gen(13);
    std::uniform_real_distribution<double> chi(1e-4, 0.03);
    std::uniform_real_distribution<double> t(0.0, 1500.0);
    for (int rep = 0; rep < 100; ++rep) {
        PhysicsParams p = defaults();
        p.chi = chi(gen);
        p.xi_se = 0.0;
        p.z_noise = 0.0;
        REQUIRE(analytic_g2(p, t(gen)) ==
                Catch::Approx(1.0 + 1.0 / p.chi).epsilon(1e-12));
    }
}

TEST_CASE("a fully dark channel has no defined correlation") {
    PhysicsParams p = defaults();
    p.chi = 0.0;
    p.z_noise = 0.0;
    REQUIRE_THROWS_AS(analytic_g2(p, 0.0), DegenerateDenominator);
}

TEST_CASE("the two published correlation forms differ by exactly chi") {
    std::mt19937 gen(17);
    std::uniform_real_distribution<double> chi(1e-4, 0.03);
    std::uniform_real_distribution<double> xi(0.05, 1.0);
    std::uniform_real_distribution<double> t(0.0, 1500.0);
    for (int rep = 0; rep < 200; ++rep) {
        PhysicsParams p = defaults();
        p.chi = chi(gen);
        p.xi_se = xi(gen);
        const double ts = t(gen);
        const double derived = analytic_g2(p, ts);
        const double printed = analytic_g2_printed(p, ts);
        REQUIRE((printed - 1.0) / p.chi ==
                Catch::Approx(derived - 1.0).epsilon(1e-12));
        REQUIRE(printed <= 2.0);
    }
    // At the default working point the two forms are grossly different.
    REQUIRE(analytic_g2_printed(defaults(), 0.0) < 2.0);
    REQUIRE(analytic_g2(defaults(), 0.0) > 20.0);
}

// ── parameter validation ────────────────────────────────────────────────

TEST_CASE("validation reports every violated constraint at once") {
    PhysicsParams p = defaults();
    p.eta_d = 1.2;
    p.chi = -0.1;
    try {
        validate(p);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("eta_D") != std::string::npos);
        REQUIRE(msg.find("chi") != std::string::npos);
    }
}

TEST_CASE("defaults validate cleanly") {
    REQUIRE_NOTHROW(validate(defaults()));
}

TEST_CASE("a noise budget that can exceed unit probability is rejected") {
    PhysicsParams p = defaults();
    p.chi = 0.2;
    p.xi_se = 1.0; // chi * xi * (2F/pi) > 1 once retrieval has decayed
    REQUIRE_THROWS_AS(validate(p), ValidationError);
}
