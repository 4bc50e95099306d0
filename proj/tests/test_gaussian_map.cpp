#include <doctest.h>

#include <cmath>
#include <complex>
#include <tuple>
#include <utility>

#include "kerrsim/errors.hpp"
#include "kerrsim/gaussian_map.hpp"

using namespace kerrsim;
using Complex = std::complex<double>;

TEST_CASE("siegel map trivial points") {
    AncillaGaussian a = prepare_ancilla(0.0, 0.4);
    CHECK(a.u == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.v == doctest::Approx(0.0).epsilon(1e-14));

    AncillaGaussian b = prepare_ancilla(2.0, M_PI / 2.0);
    CHECK(b.u == doctest::Approx(std::exp(4.0)).epsilon(1e-12));
    CHECK(std::abs(b.v) < 1e-12);

    AncillaGaussian c = prepare_ancilla(1.5, 0.0);
    CHECK(std::abs(c.v) < 1e-12);
}

TEST_CASE("siegel map matches symplectic Mobius oracle") {
    for (auto [r, th] : {std::pair{1.0, 0.7}, {2.0, 0.3}, {0.5, 1.2}, {3.0, 1.4}}) {
        // M = R(theta) diag(e^-r, e^r) acting on the vacuum point i
        double a = std::cos(th) * std::exp(-r), b = -std::sin(th) * std::exp(r);
        double c = std::sin(th) * std::exp(-r), d = std::cos(th) * std::exp(r);
        Complex z = (a * Complex(0, 1) + b) / (c * Complex(0, 1) + d);
        AncillaGaussian anc = prepare_ancilla(r, th);
        CHECK(z.real() == doctest::Approx(anc.v).epsilon(1e-12));
        CHECK(z.imag() == doctest::Approx(anc.u).epsilon(1e-12));
        CHECK(anc.u > 0.0);
    }
}

TEST_CASE("channel params endpoints and two-route consistency") {
    AncillaGaussian a0 = prepare_ancilla(3.0, M_PI / 2.0);
    ChannelParams p0 = channel_params(a0, 1.0);
    CHECK(p0.gamma == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p0.zeta == doctest::Approx(std::exp(-6.0) / 4.0).epsilon(1e-10));

    AncillaGaussian a1 = prepare_ancilla(3.0, 0.0);
    CHECK(channel_params(a1, 1.0).zeta == doctest::Approx(std::exp(6.0) / 4.0).epsilon(1e-10));

    for (auto [r, th, g] : {std::tuple{2.0, 0.9, 0.8}, {1.0, 0.4, 1.3}, {3.5, 1.2, 0.5}}) {
        ChannelParams p = channel_params(prepare_ancilla(r, th), g);
        CHECK(p.chi == doctest::Approx(p.gamma).epsilon(1e-12));
    }
}

TEST_CASE("channel params match complex-fraction oracle") {
    for (auto [r, th, g] : {std::tuple{2.0, 0.9, 0.8}, {1.5, 0.5, 1.0}, {0.8, 1.1, 1.4}}) {
        Complex i(0.0, 1.0);
        double e2r = std::exp(2.0 * r), cot = 1.0 / std::tan(th);
        Complex bracket = -0.25 * (1.0 - i * e2r * cot) / (e2r - i * cot);
        ChannelParams p = channel_params(prepare_ancilla(r, th), g);
        CHECK(p.zeta == doctest::Approx(-g * g * bracket.real()).epsilon(1e-12));
        CHECK(p.gamma == doctest::Approx(-g * g * bracket.imag()).epsilon(1e-12));
    }
}

TEST_CASE("large-r Kerr strength limit") {
    ChannelParams p = channel_params(prepare_ancilla(20.0, M_PI / 4.0), 1.0);
    CHECK(p.gamma == doctest::Approx(-0.25).epsilon(1e-8));  // -g^2 cot(theta)/4
    CHECK(p.zeta <= std::exp(-40.0) * 10.0);
}

TEST_CASE("gamma odd about pi/2 and zeta decreasing") {
    for (double th : {0.3, 0.7, 1.1}) {
        ChannelParams a = channel_params(prepare_ancilla(1.7, th), 1.0);
        ChannelParams b = channel_params(prepare_ancilla(1.7, M_PI - th), 1.0);
        CHECK(a.gamma == doctest::Approx(-b.gamma).epsilon(1e-12));
    }
    double prev = channel_params(prepare_ancilla(2.0, 0.01), 1.0).zeta;
    for (int i = 1; i <= 100; ++i) {
        double th = 0.01 + (M_PI / 2.0 - 0.02) * i / 100.0;
        double z = channel_params(prepare_ancilla(2.0, th), 1.0).zeta;
        CHECK(z < prev);
        prev = z;
    }
}

TEST_CASE("gamma_max increases with r") {
    double prev = 0.0;
    for (double r : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        GammaMax m = gamma_max(r, 1.0);
        CHECK(m.value > prev);
        prev = m.value;
    }
}

TEST_CASE("solve_theta_for_gamma hits the target") {
    for (double target : {0.1, M_PI / 4.0, M_PI / 2.0}) {
        double th = solve_theta_for_gamma(target, 2.5, 1.0);
        double got = std::abs(channel_params(prepare_ancilla(2.5, th), 1.0).gamma);
        CHECK(got == doctest::Approx(target).epsilon(1e-10));
    }
    // gamma -> 0 end of the branch sits at theta = pi/2
    CHECK(solve_theta_for_gamma(1e-8, 2.0, 1.0) == doctest::Approx(M_PI / 2.0).epsilon(1e-3));
}

TEST_CASE("solve_theta_for_gamma reports gamma_max on failure") {
    double gmax = gamma_max(0.9, 1.0).value;
    try {
        solve_theta_for_gamma(M_PI / 2.0, 0.9, 1.0);
        FAIL("expected NoSolution");
    } catch (const NoSolution& e) {
        CHECK(e.gamma_max == doctest::Approx(gmax).epsilon(1e-10));
    }
}

static double threshold_r(double target) {
    double lo = 0.1, hi = 5.0;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        if (gamma_max(mid, 1.0).value >= target)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

TEST_CASE("squeezing thresholds for cat and compass") {
    CHECK(threshold_r(M_PI / 2.0) == doctest::Approx(1.27).epsilon(0.01));
    CHECK(threshold_r(M_PI / 4.0) == doctest::Approx(0.93).epsilon(0.011));
}
