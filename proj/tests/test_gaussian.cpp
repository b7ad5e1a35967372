#include <doctest.h>

#include <cmath>

#include "dht/errors.hpp"
#include "dht/gaussian.hpp"

using namespace dht;

TEST_CASE("effective_rho") {
    CHECK(effective_rho(0.9, 0.7) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(effective_rho(0.5, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(effective_rho(0.7 + 1e-9, 0.7) == doctest::Approx(1e-9 / 0.3).epsilon(1e-6));
    CHECK_THROWS_AS(effective_rho(0.7, 0.9), InputError);
    CHECK_THROWS_AS(effective_rho(1.0, 0.5), InputError);
}

TEST_CASE("rw_gaussian frozen value and limits") {
    CHECK(rw_gaussian({0.9, 0.7, 0.5}) ==
          doctest::Approx(0.164906955687499).epsilon(1e-12));
    // rho0 just above rho1: effectively zero
    CHECK(rw_gaussian({0.7 + 1e-9, 0.7, 0.5}) < 1e-15);
    // R -> inf limit: 0.5 ln(1/(1-rho^2))
    double rho = effective_rho(0.9, 0.7);
    CHECK(rw_gaussian({0.9, 0.7, 60.0}) ==
          doctest::Approx(0.5 * std::log(1.0 / (1.0 - rho * rho))).epsilon(1e-12));
}

TEST_CASE("sigma_hat_sq") {
    SigmaHat sh0 = sigma_hat_sq({0.9, 0.7, 0.0});
    CHECK(sh0.value == 1.0);
    SigmaHat sh = sigma_hat_sq({0.9, 0.7, 0.5});
    CHECK(sh.value == doctest::Approx(0.148641282783113).epsilon(1e-12));
    CHECK(sh.binding == SigmaHat::Binding::Z);
    // rho0 >= sqrt(rho1) makes the Z argument the max across a grid
    for (double r1 : {0.1, 0.3, 0.5, 0.7})
        for (double d : {0.02, 0.1, 0.2})
            for (double R : {0.1, 0.5, 1.0}) {
                double r0 = std::min(std::sqrt(r1) + d, 0.999);
                if (!(r1 < r0 && r0 < 1.0)) continue;
                CHECK(sigma_hat_sq({r0, r1, R}).binding == SigmaHat::Binding::Z);
            }
}

TEST_CASE("exponent_from_sigma") {
    GaussianScenario scn{0.9, 0.7, 0.5};
    CHECK(exponent_from_sigma(scn, 1.0) == doctest::Approx(0.0));
    // decreasing in sigma^2
    double prev = 1e100;
    for (double s = 0.05; s <= 1.0; s += 0.05) {
        double v = exponent_from_sigma(scn, s);
        CHECK(v < prev);
        prev = v;
    }
    // at the optimizing sigma^2 with the Z constraint binding it matches rw
    CHECK(exponent_from_sigma(scn, sigma_hat_sq(scn).value) ==
          doctest::Approx(rw_gaussian(scn)).epsilon(1e-12));
    CHECK_THROWS_AS(exponent_from_sigma(scn, 0.0), InputError);
    CHECK_THROWS_AS(exponent_from_sigma(scn, 1.5), InputError);
}

TEST_CASE("new_gaussian strict-improvement point") {
    GaussianBoundDetail d = new_gaussian({0.75, 0.7, 0.5});
    CHECK(d.rho == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(d.delta == doctest::Approx(0.459084043567456).epsilon(1e-12));
    CHECK(d.term_new == doctest::Approx(0.00756973441916175).epsilon(1e-10));
    CHECK(d.term_rw == doctest::Approx(0.00885744531795617).epsilon(1e-10));
    CHECK(d.value == d.term_new);
    CHECK(d.active_branch == GaussianBranch::New);
    CHECK(d.value == std::min(d.term_new, d.term_rw));
}

TEST_CASE("new_gaussian reduces to rw when rho0 >= sqrt(rho1)") {
    GaussianBoundDetail d = new_gaussian({0.9, 0.7, 0.5});
    CHECK(d.active_branch == GaussianBranch::Rw);
    CHECK(d.value == rw_gaussian({0.9, 0.7, 0.5})); // identical code path, bit-equal
    // vanishing improvement as rho0 drops to rho1
    CHECK(new_gaussian({0.7001, 0.7, 0.5}).value < 1e-7);
}

TEST_CASE("centralized_gaussian") {
    CHECK(centralized_gaussian(0.7, 0.7) == doctest::Approx(0.0));
    CHECK(centralized_gaussian(0.9, 0.7) ==
          doctest::Approx(0.219183522857374).epsilon(1e-12));
    CHECK(centralized_gaussian(0.7, 0.9) ==
          doctest::Approx(0.453675094273689).epsilon(1e-12));
    CHECK(centralized_gaussian(0.7, 0.9) != centralized_gaussian(0.9, 0.7));
    CHECK_THROWS_AS(centralized_gaussian(1.0, 0.5), InputError);
}

TEST_CASE("rate_mi_sigma") {
    GaussianScenario scn{0.9, 0.7, 0.5};
    RateMi at1 = rate_mi_sigma(scn, 1.0);
    CHECK(at1.i_xz == doctest::Approx(0.0));
    CHECK(at1.i_xy == doctest::Approx(0.0));
    RateMi at_hat = rate_mi_sigma(scn, sigma_hat_sq(scn).value);
    CHECK(std::max(at_hat.i_xz, at_hat.i_xy) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(at_hat.i_xz == doctest::Approx(0.5).epsilon(1e-10)); // Z constraint binds
    // both terms are 0.5 ln(a + (1-a)/s^2), decreasing in a for s^2 < 1, so
    // the Z term dominates exactly when rho1 <= rho0^2 (matching which
    // constraint pins sigma_hat^2)
    for (double r1 : {0.2, 0.5, 0.8})
        for (double r0 : {0.3, 0.6, 0.9}) {
            if (!(r1 < r0 && r0 < 1.0)) continue;
            for (double s : {0.1, 0.5, 0.9}) {
                RateMi mi = rate_mi_sigma({r0, r1, 0.4}, s);
                if (r1 <= r0 * r0)
                    CHECK(mi.i_xz >= mi.i_xy - 1e-12);
                else
                    CHECK(mi.i_xz <= mi.i_xy + 1e-12);
            }
        }
}

TEST_CASE("min structure, reduction and two-form consistency on a coarse grid") {
    for (int i = 1; i <= 12; ++i)
        for (int j = 0; j < i; ++j)
            for (double R : {0.1, 0.5, 1.5}) {
                double rho0 = i / 13.0, rho1 = j / 13.0;
                GaussianScenario scn{rho0, rho1, R};
                GaussianBoundDetail d = new_gaussian(scn);
                double rw = rw_gaussian(scn);
                CHECK(d.value <= rw + 1e-12);
                if (rho0 >= std::sqrt(rho1)) CHECK(std::abs(d.value - rw) <= 1e-12);
                // two forms of the same bound agree
                CHECK(std::abs(d.value - exponent_from_sigma(scn, sigma_hat_sq(scn).value)) <=
                      1e-10);
            }
}

TEST_CASE("below the centralized bound at the figure rates") {
    // the dominance over the uncompressed benchmark is a fixed-rate statement:
    // at large R the min-form bound approaches 0.5 ln(1/(1-rho^2)) and can
    // cross the centralized value, so only the figure rates are asserted
    for (int i = 1; i <= 12; ++i)
        for (int j = 0; j < i; ++j)
            for (double R : {0.1, 0.2, 0.5}) {
                double rho0 = i / 13.0, rho1 = j / 13.0;
                GaussianBoundDetail d = new_gaussian({rho0, rho1, R});
                CHECK(d.value <= centralized_gaussian(rho0, rho1) + 1e-12);
            }
}

TEST_CASE("monotone in R") {
    double prev = -1.0;
    for (double R = 0.05; R < 2.0; R += 0.05) {
        double v = new_gaussian({0.85, 0.4, R}).value;
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}
