#include "doctest.h"

#include "abr/oscillatory.hpp"

#include <cmath>
#include <limits>

using namespace abr;

namespace {

double bump(double x) {
    // Smooth, supported in (0, 1).
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp(-1.0 / (x * (1.0 - x)));
}

}  // namespace

TEST_CASE("stationary phase integral matches reference") {
    OscillatoryProblem p;
    p.phase = [](double x) { return x * x; };
    p.dphase = [](double x) { return 2 * x; };
    p.amplitude = [](double) { return cplx(1.0); };
    p.lambda = 100.0;
    p.a = 0.0;
    p.b = 1.0;
    const auto r = integrate(p, 1e-12);
    CHECK(r.converged);
    // mpmath reference.
    CHECK(std::abs(r.value - cplx(0.0601125184813444348, 0.0583670899929623342)) < 1e-11);
    const auto sp = stationary_points(p);
    REQUIRE(sp.size() == 1);
    CHECK(sp[0] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("non-stationary cubic phase with finite-difference derivatives") {
    OscillatoryProblem p;
    p.phase = [](double x) { return x + x * x * x / 3.0; };
    p.amplitude = [](double x) { return cplx(std::cos(x), 0.0); };
    p.lambda = 50.0;
    p.a = -1.0;
    p.b = 2.0;
    const auto r = integrate(p, 1e-12);
    CHECK(r.fd_derivatives);
    CHECK(std::abs(r.value - cplx(-0.00460715976976293715, -0.00315699627660036956)) < 1e-11);
    CHECK(stationary_points(p).empty());
}

TEST_CASE("semi-infinite interval with algebraic amplitude") {
    OscillatoryProblem p;
    p.phase = [](double x) { return x; };
    p.dphase = [](double) { return 1.0; };
    p.amplitude = [](double x) { return cplx(1.0 / (x * x), 0.0); };
    p.lambda = 7.0;
    p.a = 1.0;
    p.b = std::numeric_limits<double>::infinity();
    const auto r = integrate(p, 1e-10);
    CHECK(r.converged);
    CHECK(std::abs(r.value - cplx(-0.0594957334843165622, 0.120119649343497462)) < 1e-9);
}

TEST_CASE("compactly supported amplitude decays faster than any power") {
    OscillatoryProblem p;
    p.phase = [](double x) { return x + 0.2 * x * x; };
    p.dphase = [](double x) { return 1.0 + 0.4 * x; };
    p.amplitude = [](double x) { return cplx(bump(x), 0.0); };
    p.a = 0.0;
    p.b = 1.0;
    const auto fit = nonstationary_decay_check(p, 3, 1, 7);
    CHECK_FALSE(fit.stationary);
    CHECK(fit.slope < -3.0);
    CHECK(fit.pass);
}

TEST_CASE("decay check flags a stationary phase") {
    OscillatoryProblem p;
    p.phase = [](double x) { return (x - 0.5) * (x - 0.5); };
    p.amplitude = [](double x) { return cplx(bump(x), 0.0); };
    p.a = 0.0;
    p.b = 1.0;
    const auto fit = nonstationary_decay_check(p, 2, 4, 12);
    CHECK(fit.stationary);
    CHECK_FALSE(fit.pass);
    // Stationary phase gives λ^{-1/2}.
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(0.1));
}

TEST_CASE("van der Corput ratios stay bounded without drift") {
    OscillatoryProblem p;
    p.phase = [](double x) { return x * x; };
    p.dphase = [](double x) { return 2 * x; };
    p.d2phase = [](double) { return 2.0; };
    p.amplitude = [](double x) { return cplx(1.0 + x, 0.0); };
    p.a = -1.0;
    p.b = 1.0;
    const auto rep = van_der_corput_check(p, 2);
    CHECK(rep.derivative_floor == doctest::Approx(2.0));
    CHECK(rep.max_ratio < 8.0);
    CHECK(rep.drift == doctest::Approx(1.0).epsilon(0.2));

    OscillatoryProblem q = p;
    q.phase = [](double x) { return x + x * x / 4; };
    q.dphase = [](double x) { return 1 + x / 2; };
    q.a = 0.0;
    q.b = 1.0;
    const auto rep1 = van_der_corput_check(q, 1);
    CHECK(rep1.max_ratio < 3.0);
}

TEST_CASE("slope fit") {
    CHECK(fit_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
}
