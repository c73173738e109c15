#include "abr/verify.hpp"

#include "abr/kernel.hpp"
#include "abr/quadrature.hpp"
#include "abr/specfun.hpp"

#include <doctest.h>

#include <cmath>

using namespace abr;
using namespace abr::verify;

namespace {

quad::AdaptiveOptions tight() {
    quad::AdaptiveOptions o;
    o.abs_tol = 1e-13;
    o.rel_tol = 1e-12;
    o.max_panels = 200000;
    return o;
}

}  // namespace

TEST_CASE("window is one near the antipode and vanishes beyond twice the width") {
    CHECK(window(kPi) == 1.0);
    CHECK(window(kPi + 0.9 * kWindowEps) == 1.0);
    CHECK(window(kPi - 2.0 * kWindowEps) == 0.0);
    CHECK(window(0.0) == 0.0);
    const double mid = window(kPi + 1.5 * kWindowEps);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
}

TEST_CASE("direct dyadic kernel matches brute-force quadrature") {
    const int j = 4;
    const double r1 = 0.5, r2 = 0.5, r2p = 0.45, th2p = 0.01, eps = kWindowEps;
    const double lam = 16.0;
    const cplx v = direct_dyadic_kernel(j, r1, r2, r2p, 0.0, th2p, eps, 1e-12);
    auto f = [&](double t) -> cplx {
        const double dy = distance(r1, r2, t), dz = distance(r1, r2p, t - th2p);
        return std::polar(1.0, lam * (dy - dz)) * DyadicCutoff::beta(dy) * DyadicCutoff::beta(dz) * window(t, eps) *
               window(t - th2p, eps) / (lam * std::sqrt(dy * dz)) * amplitude_a(lam * dy) *
               std::conj(amplitude_a(lam * dz));
    };
    const auto ref = quad::adaptive(f, th2p + kPi - 2.0 * eps, kPi, tight());
    CHECK(std::abs(v - ref.value) < 1e-10);
    CHECK(std::abs(v) > 0.0);
}

TEST_CASE("direct dyadic envelope is infinite for equal radii and the sample is vacuous") {
    CHECK(std::isinf(direct_dyadic_envelope(3, 0.5, 0.6, 0.6)));
    const double e = direct_dyadic_envelope(2, 0.5, 0.6, 0.7);
    CHECK(e == doctest::Approx(1.0 / (4.0 * std::sqrt(0.4) * 0.5)).epsilon(1e-14));
}

TEST_CASE("multiplier integral matches brute-force quadrature") {
    const int j = 5;
    const double r1 = 0.6, r2 = 0.7, zeta = -2.0, lam = 32.0;
    const cplx v = multiplier_integral(j, r1, r2, zeta, kWindowEps, 1e-12);
    auto f = [&](double t) -> cplx {
        const double d = distance(r1, r2, t);
        return std::polar(1.0, lam * d + zeta * t) * DyadicCutoff::beta(d) * window(t) / std::sqrt(lam * d) *
               amplitude_a(lam * d);
    };
    const auto ref = quad::adaptive(f, kPi - 2.0 * kWindowEps, kPi, tight());
    CHECK(std::abs(v - ref.value) < 1e-10);
}

TEST_CASE("printed multiplier scaling differs by exactly 2^{j/4}") {
    for (int j : {2, 5, 8}) {
        const cplx a = multiplier_integral(j, 0.5, 0.8, -1.0, kWindowEps, 1e-12, false);
        const cplx b = multiplier_integral(j, 0.5, 0.8, -1.0, kWindowEps, 1e-12, true);
        CHECK(std::abs(b) / std::abs(a) == doctest::Approx(std::exp2(0.25 * j)).epsilon(1e-8));
    }
}

TEST_CASE("unit-frequency diffractive pieces reproduce the kernel's far bracket integral") {
    const auto sp = SpectralParameter::boundary(1.0, +1);
    KernelOptions ko;
    ko.tol = 1e-11;
    for (double alpha : {0.3, -0.7}) {
        for (double phi : {0.4, -2.0, 1e-3}) {
            const double r1 = 0.9, r2 = 1.4;
            const auto d = diffractive_bracket_integrals(alpha, r1, r2, phi, sp, ko);
            auto piece = [&](DiffractivePiece p) { return diffractive_piece_integral(p, alpha, r1, r2, phi, 1.0, 1e-11); };
            const cplx expect = std::sin(std::abs(alpha) * kPi) * piece(DiffractivePiece::exponential) +
                                std::sin(alpha * kPi) * (piece(DiffractivePiece::sinh_part) -
                                                         cplx(0.0, 1.0) * piece(DiffractivePiece::cosh_part));
            CHECK(std::abs(d.d1 - expect) < 1e-8);
        }
    }
}

TEST_CASE("model term from the rotated contour matches the real-axis oscillatory integral") {
    for (double phi : {0.5, 0.02}) {
        const int j = 4;
        const double r1 = 0.6, r2 = 0.9, t = r1 + r2, lam = 16.0, mu = lam * r1 * r2;
        const double b2 = 2.0 * std::pow(std::sin(0.5 * phi), 2);
        const cplx amp = amplitude_a(lam * t) / std::sqrt(t) * std::sin(phi);
        OscillatoryProblem p;
        p.phase = [](double s) { return s * s; };
        p.dphase = [](double s) { return 2.0 * s; };
        p.d2phase = [](double) { return 2.0; };
        p.amplitude = [&](double s) { return cplx(1.0 / (0.5 * s * s + b2)); };
        p.lambda = mu;
        p.a = 0.0;
        p.b = std::numeric_limits<double>::infinity();
        const auto ref = integrate(p, 1e-11);
        const cplx expect = DyadicCutoff::beta(t) * std::sqrt(t) / std::sqrt(lam) * amp * ref.value;
        const cplx h = morse_model_term(j, r1, r2, phi);
        CHECK(std::abs(h - expect) < 1e-7 * std::abs(expect));
    }
    CHECK(morse_model_term(3, 0.5, 0.7, 0.0) == cplx(0.0));
}

TEST_CASE("appendix derivative matches central differences") {
    for (double s : {1e-3, 0.05, 0.7}) {
        for (double b : {0.0, 1e-3, 0.3, 1.9}) {
            for (double alpha : {-1.0, -0.4, 0.8}) {
                const double h = 1e-6 * s;
                const double fd =
                    (appendix_expression(s + h, b, alpha, 0) - appendix_expression(s - h, b, alpha, 0)) / (2.0 * h);
                CHECK(appendix_expression(s, b, alpha, 1) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            }
        }
    }
}

TEST_CASE("appendix b = 0 slice follows its closed form and Taylor expansion") {
    for (double alpha : {-0.9, 0.3, 1.0}) {
        for (double s : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
            const double a3 = alpha * alpha * alpha;
            const double taylor = alpha * s + s * s * (-a3 / 3.0 - alpha / 6.0) + a3 * s * s * s / 6.0;
            CHECK(std::abs(appendix_expression_b0(s, alpha, 0) - taylor) < 1e-8 * s + 1e-15);
            CHECK(std::abs(appendix_expression(s, 0.0, alpha, 0) - taylor) < 1e-8 * s + 1e-15);
        }
        for (double s : {0.3, 0.9}) {
            CHECK(appendix_expression(s, 0.0, alpha, 0) ==
                  doctest::Approx(appendix_expression_b0(s, alpha, 0)).epsilon(1e-12));
            CHECK(appendix_expression(s, 0.0, alpha, 1) ==
                  doctest::Approx(appendix_expression_b0(s, alpha, 1)).epsilon(1e-10));
        }
    }
}

TEST_CASE("appendix expression vanishes identically at zero flux") {
    for (double s : {1e-6, 0.1, 1.0})
        for (double b : {0.0, 0.5, 2.0})
            for (int k : {0, 1}) CHECK(appendix_expression(s, b, 0.0, k) == 0.0);
}

TEST_CASE("appendix inequality one is finite and grid-stable") {
    AppendixGrid g;
    g.n_s = 40;
    g.n_b = 30;
    g.n_alpha = 21;
    const auto rep = check_appendix(1, AppendixForm::reduced, g);
    CHECK(rep.pass);
    CHECK(rep.max_ratio < 2.0);
    CHECK(rep.refinement_change() < 0.05);
}

TEST_CASE("appendix s-integrals are finite on a small grid") {
    long evals = 0;
    const double v2 = appendix_integral(2, AppendixForm::reduced, 0.3, 0.5, 4, 0.4, 0.6, 1e-8, &evals);
    const double v3 = appendix_integral(3, AppendixForm::angular, 0.3, 0.0, 4, 0.4, 0.6, 1e-8, &evals);
    CHECK(std::isfinite(v2));
    CHECK(std::isfinite(v3));
    CHECK(v2 > 0.0);
    CHECK(evals > 0);
    CHECK(appendix_integral(2, AppendixForm::reduced, 0.0, 0.5, 4, 0.4, 0.6, 1e-8) == 0.0);
}

TEST_CASE("bracket exponential integral equals its closed form") {
    CHECK(bracket_fact_integral(1, 0.5, 1.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(bracket_fact_integral(1, -0.1, 0.0) == doctest::Approx(10.0).epsilon(1e-9));
    const auto rep = check_B_facts(1, 16);
    CHECK(rep.pass);
    CHECK(rep.max_ratio == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("bracket cosh integral stays bounded as the antipodal angle is approached") {
    double prev = 0.0;
    for (double phi : {1e-2, 1e-4, 1e-6}) {
        const double v = bracket_fact_integral(3, 0.5, phi);
        CHECK(v < kPi + 0.1);
        CHECK(v > prev);
        prev = v;
    }
    const auto rep = check_B_facts(3, 32);
    CHECK(rep.pass);
}

TEST_CASE("envelope norm power matches closed forms") {
    const std::vector<double> radii{10.0, 100.0, 1000.0};
    const auto q4 = envelope_norm_power(4.0, radii);
    const auto q6 = envelope_norm_power(6.0, radii);
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double R = radii[k];
        CHECK(q4[k] == doctest::Approx(2.0 * kPi * (std::log1p(R) + 1.0 / (1.0 + R) - 1.0)).epsilon(1e-10));
        CHECK(q6[k] == doctest::Approx(kPi * (R / (1.0 + R)) * (R / (1.0 + R))).epsilon(1e-10));
    }
}

TEST_CASE("Schur envelope decay matches the predicted exponent") {
    SchurOptions o;
    o.n_r = 80;
    const auto rep = check_schur_bound(1.2, 6.0, o);
    CHECK(rep.pass);
    CHECK(rep.slope == doctest::Approx(-(0.5 + 2.0 / 6.0)).epsilon(0.15));
    const auto sup = check_schur_bound(1.0, std::numeric_limits<double>::infinity(), o);
    CHECK(sup.pass);
    CHECK_FALSE(rep.note.empty());
    CHECK_THROWS_AS(check_schur_bound(2.0, 4.0, o), std::invalid_argument);
    CHECK_THROWS_AS(check_schur_bound(1.1, 6.0, o), std::invalid_argument);
}

TEST_CASE("diffractive phase has a positive derivative floor") {
    const auto rep = check_phase_derivatives(200, 3);
    CHECK(rep.pass);
    CHECK(rep.extras.front().second > 0.5);
}

TEST_CASE("dyadic sweeps are deterministic in the seed") {
    SweepOptions o;
    o.samples = 28;
    o.seed = 11;
    const auto a = check_diffractive_dyadic(1, o);
    const auto b = check_diffractive_dyadic(1, o);
    REQUIRE(a.size() == 1);
    CHECK(a[0].max_ratio == b[0].max_ratio);
    CHECK(a[0].worst_point == b[0].worst_point);
    o.seed = 12;
    const auto c = check_diffractive_dyadic(1, o);
    CHECK(a[0].max_ratio != c[0].max_ratio);
}

TEST_CASE("dyadic sweeps report per-j maxima and counts") {
    SweepOptions o;
    o.samples = 35;
    const auto d = check_direct_dyadic(o);
    CHECK(d.sample_count + d.skipped == 35);
    CHECK(d.js.size() == 7);
    CHECK(d.max_ratio_by_j.size() == 7);
    CHECK(std::isfinite(d.max_ratio));
    CHECK(d.worst.size() <= 16);
    const auto m = check_multiplier_bound(o);
    REQUIRE(m.extras.size() == 6);
    CHECK(m.extras.back().first == "zeta0_cross_check_rel");
    CHECK(m.extras.back().second < 1e-8);
    const auto three = check_diffractive_dyadic(3, o);
    CHECK(three.size() == 3);
    CHECK_THROWS_AS(check_diffractive_dyadic(4, o), std::invalid_argument);
}

TEST_CASE("lambda integral check is finite and refinement-stable") {
    const auto rep = check_lambda_integrals(1, 6);
    CHECK(std::isfinite(rep.max_ratio));
    CHECK(rep.points == 2 * 6 * 4 * 2);
}

TEST_CASE("near-diffractive part stays within a logarithmic envelope") {
    const auto rep = check_near_diffractive_log(3, 4);
    CHECK(rep.failed == 0);
    CHECK(std::isfinite(rep.max_ratio));
    CHECK(rep.max_ratio < 1.0);
}
