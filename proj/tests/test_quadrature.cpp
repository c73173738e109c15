#include "doctest.h"

#include "abr/quadrature.hpp"

#include <cmath>

using namespace abr;

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    for (int n : {8, 16, 24, 32}) {
        const auto& r = quad::gauss_legendre(n);
        REQUIRE(static_cast<int>(r.x.size()) == n);
        for (int deg = 0; deg < 2 * n; deg += 3) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += r.w[i] * std::pow(r.x[i], deg);
            const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            CHECK(s == doctest::Approx(exact).epsilon(1e-13));
        }
    }
    CHECK_THROWS(quad::gauss_legendre(7));
}

TEST_CASE("adaptive quadrature handles a logarithmic endpoint singularity") {
    quad::AdaptiveOptions opt;
    opt.abs_tol = 1e-12;
    const auto r = quad::adaptive([](double x) { return cplx(std::log(x), x); }, 0.0, 1.0, opt);
    CHECK(r.converged);
    CHECK(r.value.real() == doctest::Approx(-1.0).epsilon(1e-11));
    CHECK(r.value.imag() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("adaptive quadrature uses breakpoints for a narrow peak") {
    const double b = 1e-4;
    quad::AdaptiveOptions opt;
    opt.abs_tol = 1e-10;
    auto f = [b](double x) { return cplx(b / (x * x + b * b), 0.0); };
    const auto r = quad::adaptive(f, 0.0, 1.0, opt, {b, 2 * b, 4 * b, 8 * b});
    CHECK(r.value.real() == doctest::Approx(std::atan(1.0 / b)).epsilon(1e-10));
}

TEST_CASE("spherical Bessel functions match reference values") {
    // mpmath at 30 digits: j_0, j_3, j_9, j_15.
    struct Ref {
        double x, v[4];
    };
    const Ref refs[] = {
        {1e-4, {0.99999999833333333, 9.5238095185185199e-15, 1.5273493082034049e-45, 5.2110804414677569e-78}},
        {0.5, {0.958851077208406, 0.0011740354438675573, 2.9653957173907765e-12, 1.5842824431259694e-22}},
        {3.0, {0.047040002686622407, 0.15205166203053329, 2.4214698972963873e-5, 6.5206605150954268e-11}},
        {17.0, {-0.056552793639973933, 0.0044411759904289912, -0.041780694457773569, 0.077794970268578338}},
        {250.0, {-0.0038821120781672216, 0.001056888835416379, -0.0016440578757230143, 0.0026506978711088747}},
    };
    const int orders[4] = {0, 3, 9, 15};
    for (const auto& ref : refs) {
        double j[16];
        quad::spherical_bessel(15, ref.x, j);
        for (int k = 0; k < 4; ++k) {
            CAPTURE(ref.x);
            CAPTURE(orders[k]);
            CHECK(j[orders[k]] == doctest::Approx(ref.v[k]).epsilon(1e-12));
        }
        double jm[16];
        quad::spherical_bessel(15, -ref.x, jm);
        CHECK(jm[3] == doctest::Approx(-j[3]));
        CHECK(jm[0] == doctest::Approx(j[0]));
    }
}

TEST_CASE("Filon panel is exact for oscillatory polynomials at any frequency") {
    auto g = [](double x) { return cplx(1.0 + x * x * x, -x); };
    for (double omega : {0.0, 0.3, 10.0, 1e4}) {
        CAPTURE(omega);
        const auto p = quad::filon_panel(g, 1.0, 3.0, omega);
        // Reference via dense Gauss rule on the full integrand.
        const auto& r = quad::gauss_legendre(32);
        cplx ref = 0.0;
        const int m = omega > 100 ? 4000 : 10;
        for (int s = 0; s < m; ++s) {
            const double a = 1.0 + 2.0 * s / m, h = 1.0 / m;
            for (int i = 0; i < 32; ++i) {
                const double x = a + h + h * r.x[i];
                ref += h * r.w[i] * g(x) * std::polar(1.0, omega * (x - 2.0));
            }
        }
        CHECK(std::abs(p.value - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
        CHECK(p.error < 1e-12);
        cplx w[quad::kFilonPoints];
        quad::filon_weights(1.0, 3.0, omega, w);
        cplx viaw = 0.0;
        const auto& r16 = quad::gauss_legendre(16);
        for (int i = 0; i < 16; ++i) viaw += w[i] * g(2.0 + r16.x[i]);
        CHECK(std::abs(viaw - p.value) < 1e-13 * std::max(1.0, std::abs(p.value)));
    }
}

TEST_CASE("Filon endpoint derivatives") {
    auto g = [](double x) { return cplx(std::exp(0.3 * x), std::sin(x)); };
    const auto p = quad::filon_panel(g, 0.0, 2.0, 5.0);
    CHECK(std::abs(p.at_right() - g(2.0)) < 1e-12);
    CHECK(std::abs(p.derivative_right(1) - cplx(0.3 * std::exp(0.6), std::cos(2.0))) < 1e-10);
    CHECK(std::abs(p.derivative_right(2) - cplx(0.09 * std::exp(0.6), -std::sin(2.0))) < 1e-8);
}
