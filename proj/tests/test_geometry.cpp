#include "doctest.h"

#include "abr/geometry.hpp"

#include <cmath>
#include <random>

using namespace abr;

TEST_CASE("angle reduction") {
    CHECK(reduce_angle(-0.5) == doctest::Approx(kTwoPi - 0.5));
    CHECK(reduce_angle(7.0) == doctest::Approx(7.0 - kTwoPi));
    CHECK(reduce_angle(kTwoPi) == 0.0);
    CHECK(wrap_to_pi(-kPi) == kPi);
    CHECK(wrap_to_pi(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
}

TEST_CASE("polar points require positive radius") {
    CHECK_THROWS_AS(PolarPoint(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PolarPoint(-1.0, 1.0), std::invalid_argument);
    const PolarPoint p(2.0, kPi / 2.0);
    CHECK(p.x() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p.y() == doctest::Approx(2.0));
}

TEST_CASE("distance agrees with Cartesian distance and is symmetric") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> r(0.01, 10.0), t(0.0, kTwoPi);
    for (int k = 0; k < 200; ++k) {
        const PolarPoint x(r(rng), t(rng)), y(r(rng), t(rng));
        const double ref = std::hypot(x.x() - y.x(), x.y() - y.y());
        CHECK(distance(x, y) == doctest::Approx(ref).epsilon(1e-12));
        CHECK(distance(x, y) == distance(y, x));
    }
    // Nearby points keep relative accuracy.
    CHECK(distance(1.0, 1.0, 1e-9) == doctest::Approx(1e-9).epsilon(1e-12));
}

TEST_CASE("diffractive distance") {
    CHECK(diffractive_distance(1.0, 2.0, 0.0) == doctest::Approx(3.0));
    const double s = 3.0;
    CHECK(diffractive_distance(0.5, 2.0, s) ==
          doctest::Approx(std::sqrt(0.25 + 4.0 + 2.0 * std::cosh(s))).epsilon(1e-14));
    // Large-s branch continues the small-s branch.
    CHECK(diffractive_distance(0.5, 2.0, 600.0 - 1e-12) ==
          doctest::Approx(diffractive_distance(0.5, 2.0, 600.0)).epsilon(1e-12));
    CHECK(std::isfinite(diffractive_distance(0.5, 2.0, 1400.0)));
    CHECK_THROWS(diffractive_distance(1.0, 1.0, -1.0));
}

TEST_CASE("constant profile") {
    const auto p = CirculationProfile::constant(0.3);
    CHECK(p.is_constant());
    CHECK(p.alpha(1.7) == 0.3);
    CHECK(p.antiderivative(2.0) == doctest::Approx(0.6));
    CHECK(p.gauge(1.0) == cplx(1.0));
    CHECK(std::arg(flux_phase(p, 0.5, 1.5)) == doctest::Approx(0.3));
}

TEST_CASE("fourier and callable profiles agree") {
    const auto f = CirculationProfile::fourier({0.4, 0.1}, {0.05});
    CHECK_FALSE(f.is_constant());
    CHECK(f.mean_flux() == 0.4);
    const auto c = CirculationProfile::callable(
        [](double t) { return 0.4 + 0.1 * std::cos(t) + 0.05 * std::sin(t); });
    CHECK(c.mean_flux() == doctest::Approx(0.4).epsilon(1e-13));
    for (double t = -7.0; t < 14.0; t += 0.37) {
        CAPTURE(t);
        CHECK(f.alpha(t) == doctest::Approx(c.alpha(t)).epsilon(1e-14));
        CHECK(f.antiderivative(t) == doctest::Approx(c.antiderivative(t)).epsilon(1e-10));
        // Periodic extension: Φ(θ + 2π) = Φ(θ) + 2πᾱ.
        CHECK(f.antiderivative(t + kTwoPi) == doctest::Approx(f.antiderivative(t) + kTwoPi * 0.4).epsilon(1e-13));
        CHECK(std::abs(f.gauge(t)) == doctest::Approx(1.0));
    }
    CHECK(CirculationProfile::fourier({0.2, 0.0}, {0.0}).is_constant());
}

TEST_CASE("callable profile with exact antiderivative") {
    const auto c = CirculationProfile::callable([](double t) { return 0.25 + 0.2 * std::cos(2 * t); },
                                                [](double t) { return 0.25 * t + 0.1 * std::sin(2 * t); });
    CHECK(c.mean_flux() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(c.antiderivative(1.0) == doctest::Approx(0.25 + 0.1 * std::sin(2.0)).epsilon(1e-14));
}
