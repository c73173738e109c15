#include "doctest.h"

#include "abr/kernel.hpp"
#include "abr/simd.hpp"

#include <chrono>
#include <cmath>
#include <random>

using namespace abr;

namespace {

// Angular mode sums (i/4)Σ e^{im(θ1-θ2)} J_{|m-α|}(κr<) H_{|m-α|}(κr>), mpmath, 25 digits, 801 modes.
struct ModeRef {
    double alpha;
    cplx sigma;
    double r1, t1, r2, t2;
    cplx value;
};
const ModeRef kModeRefs[] = {
    {0.3, {-1.0, 0.0}, 0.7, 0.4, 1.3, 2.9, {0.010008936058694923, -0.0040834843133018948}},
    {0.3, {-1.0, 0.0}, 0.5, 0.1, 0.55, 3.0415926535897932, {0.025265771092540747, -0.0032174704656894167}},
    {0.3, {-1.0, 0.0}, 0.5, 0.1, 0.55, 3.2415926535897932, {0.024768268566430123, 0.0}},
    {0.5, {-1.0, 0.0}, 2.0, 1.0, 0.3, 5.0, {0.0020346492003260101, 0.0044457896104655041}},
    {0.25, {-0.6, 0.8}, 1.1, 0.2, 0.9, 2.0, {0.024774557666534424, 0.012543724704557964}},
    {0.7, {0.6, 0.8}, 0.8, 3.0, 1.5, 0.5, {-0.0083325636144706436, -0.021697113373199401}},
    {0.5, {0.995, 0.0998749}, 1.2, 0.0, 0.6, 2.5, {0.039364874261393151, 0.021171331514877531}},
};

}  // namespace

TEST_CASE("kernel matches angular mode sums") {
    for (const auto& ref : kModeRefs) {
        CAPTURE(ref.alpha);
        CAPTURE(ref.sigma);
        CAPTURE(ref.t2);
        const auto prof = CirculationProfile::constant(ref.alpha);
        const auto kv = resolvent_kernel(prof, SpectralParameter::off_axis(ref.sigma), PolarPoint(ref.r1, ref.t1),
                                         PolarPoint(ref.r2, ref.t2));
        CHECK(kv.converged);
        CHECK(std::abs(kv.total - ref.value) < 1e-9 * std::abs(ref.value));
    }
}

namespace {

// Boundary values R(λ²+i0), same mode-sum oracle with κ = λ.
struct BoundaryRef {
    double alpha, lambda, r1, t1, r2, t2;
    cplx value;
};
const BoundaryRef kBoundaryRefs[] = {
    {0.3, 1.0, 0.7, 0.4, 1.3, 2.9, {-0.023065978413317218, 0.05726435378570649}},
    {0.5, 2.0, 1.5, 2.0, 0.4, 4.0, {-0.061629197194832734, 0.042325819045603822}},
    {0.15, 1.0, 3.0, 0.0, 2.0, 3.0, {0.054498182490091803, -0.042671056652972174}},
};

cplx k0_oracle(double d) { return std::cyl_bessel_k(0.0, d) / (2.0 * kPi); }

}  // namespace

TEST_CASE("kernel boundary values match mode sums on both branches") {
    for (const auto& ref : kBoundaryRefs) {
        CAPTURE(ref.alpha);
        const auto prof = CirculationProfile::constant(ref.alpha);
        const PolarPoint x(ref.r1, ref.t1), y(ref.r2, ref.t2);
        const auto plus = resolvent_kernel(prof, SpectralParameter::boundary(ref.lambda, +1), x, y);
        CHECK(std::abs(plus.total - ref.value) < 1e-9 * std::abs(ref.value));
        // Self-adjointness: R(λ²-i0)(x, y) = conj R(λ²+i0)(y, x).
        const auto minus = resolvent_kernel(prof, SpectralParameter::boundary(ref.lambda, -1), y, x);
        CHECK(std::abs(minus.total - std::conj(ref.value)) < 1e-9 * std::abs(ref.value));
    }
}

TEST_CASE("spectral parameter decomposition") {
    for (double delta : {0.5, 1e-2, -1e-4, 0.999}) {
        for (int sign : {-1, 1}) {
            const auto sp = SpectralParameter::from_delta(sign, delta);
            CHECK(std::abs(sp.sigma() - cplx(sign * std::sqrt(1 - delta * delta), delta)) < 1e-15);
            CHECK(sp.sign() == sign);
            CHECK(sp.delta() == doctest::Approx(delta).epsilon(1e-14));
            CHECK(sp.kappa().imag() >= 0.0);
            CHECK(std::abs(sp.kappa() * sp.kappa() - sp.sigma()) < 1e-14);
        }
    }
    CHECK(SpectralParameter::from_delta(-1, 0.5).regime() == 1);
    CHECK(SpectralParameter::from_delta(1, 0.5).regime() == 2);
    CHECK(SpectralParameter::from_delta(1, 0.05).regime() == 3);
    CHECK(SpectralParameter::boundary(1.0, -1).regime() == 3);
    CHECK(SpectralParameter::boundary(1.0, -1).kappa() == cplx(-1.0));
    CHECK(SpectralParameter::off_axis({-4.0, 0.0}).normalized().sigma() == cplx(-1.0));
    CHECK_THROWS_AS(SpectralParameter::off_axis(2.0), std::invalid_argument);
    CHECK_THROWS_AS(SpectralParameter::off_axis(0.0), std::invalid_argument);
    CHECK_THROWS_AS(SpectralParameter::boundary(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(SpectralParameter::boundary(-1.0, 1), std::invalid_argument);
}

TEST_CASE("free oracle") {
    const auto m1 = SpectralParameter::off_axis(-1.0);
    CHECK(std::abs(free_oracle(m1, PolarPoint(1.0, 0.0), PolarPoint(2.0, 0.0)) - k0_oracle(1.0)) < 1e-15);
    const double far = std::abs(free_oracle(m1, PolarPoint(1.0, 0.0), PolarPoint(41.0, 0.0)));
    CHECK(far == doctest::Approx(k0_oracle(40.0).real()).epsilon(1e-10));
    CHECK(far < std::exp(-40.0));
    const auto b = SpectralParameter::boundary(1.0, 1);
    CHECK(free_oracle(b, PolarPoint(1.0, 0.0), PolarPoint(2.0, 0.0)) == cplx(0, 0.25) * hankel0_plus(1.0));
    CHECK_THROWS(free_oracle(m1, PolarPoint(1.0, 0.0), PolarPoint(1.0, 0.0)));
}

TEST_CASE("angular factors") {
    const auto zero = CirculationProfile::constant(0.0);
    const auto half = CirculationProfile::constant(0.5);
    const double q = 1.0 / (4 * kPi * kPi);
    CHECK(std::abs(angular_A(zero, 0.3, 2.0) - q) < 1e-17);
    CHECK(std::abs(angular_A(half, 0.0, kPi / 2) - std::polar(q, kPi / 4)) < 1e-17);
    CHECK(std::abs(angular_A(half, 0.0, 3 * kPi / 2) - std::polar(q, 3 * kPi / 4) * std::polar(1.0, -kPi)) < 1e-17);
    // Antipodal points average both representatives.
    CHECK(std::abs(angular_A(half, 0.0, kPi) - q * std::cos(kPi / 2)) < 1e-17);
    const auto third = CirculationProfile::constant(1.0 / 3.0);
    CHECK(std::abs(angular_A(third, 1.0, 1.0 + kPi) - q * std::cos(kPi / 3)) < 1e-16);

    for (double s : {0.0, 0.1, 2.0}) CHECK(angular_B(zero, s, 0.4, 1.1) == cplx(0.0));
    // Direct evaluation of the closed form at α = 1/2, s = 1, θ1 = θ2 (mpmath).
    CHECK(std::abs(angular_B(half, 1.0, 0.7, 0.7) - cplx(-0.02246338475005622265, 0.0)) < 1e-16);
    // Finite value at the singular point and continuity towards it along φ = 0.
    const cplx at = angular_B_bracket(0.3, 0.0, 0.0);
    CHECK(std::isfinite(at.real()));
    CHECK(std::abs(angular_B_bracket(0.3, 1e-7, 0.0) - at) < 1e-6);
    for (double s : {0.2, 1.5}) {
        for (double phi : {0.5, 2.0}) {
            const cplx p = angular_B_bracket(0.4, s, phi), m = angular_B_bracket(-0.4, s, phi);
            const double first = std::sin(0.4 * kPi) * std::exp(-0.4 * s);
            // sin(απ)·sinh(αs) is even in α, sin(απ)·cosh(αs) is odd.
            CHECK(std::abs((p - first).real() - (m - first).real()) < 1e-15);
            CHECK(std::abs((p - first).imag() + (m - first).imag()) < 1e-15);
        }
    }
}

TEST_CASE("direct terms vanish on the complementary cutoff regions") {
    const auto prof = CirculationProfile::constant(0.25);
    auto [g1a, g2a] = direct_terms(prof, PolarPoint(1.0, 0.0), PolarPoint(1.3, 0.0));
    CHECK(g1a == cplx(0.0));
    CHECK(g2a != cplx(0.0));
    auto [g1b, g2b] = direct_terms(prof, PolarPoint(1.0, 0.0), PolarPoint(3.0, 0.0));
    CHECK(g2b == cplx(0.0));
    const auto zero = CirculationProfile::constant(0.0);
    auto [g1c, g2c] = direct_terms(zero, PolarPoint(1.0, 0.0), PolarPoint(2.0, 0.0));
    CHECK(std::abs(g1c + g2c - hankel0_plus(1.0) / (4 * kPi * kPi)) < 1e-16);
    CHECK_THROWS(direct_terms(prof, PolarPoint(1.0, 0.0), PolarPoint(1.0, 0.0)));
}

TEST_CASE("diffractive terms") {
    const auto zero = CirculationProfile::constant(0.0);
    const auto z = diffractive_terms(zero, PolarPoint(1.0, 0.0), PolarPoint(1.0, 1.0));
    CHECK(z.d1 == cplx(0.0));
    CHECK(z.d2 == cplx(0.0));

    const auto half = CirculationProfile::constant(0.5);
    const auto d = diffractive_terms(half, PolarPoint(1.0, kPi / 3), PolarPoint(1.0, 0.0));
    CHECK(d.converged);
    CHECK(d.d2 == cplx(0.0));
    // High-precision reference quadrature (mpmath).
    CHECK(std::abs(d.d1 - cplx(0.012461557226774718, -0.019796400038412371)) < 1e-11);

    // d2 nonzero only when r1 + r2 < 3/4, and bounded by C|log(r1 + r2)|.
    double worst = 0.0;
    for (double r : {0.3, 0.1, 0.01, 1e-3}) {
        const auto dd = diffractive_terms(half, PolarPoint(r, 0.5), PolarPoint(r * 0.7, 2.0));
        CHECK(dd.d2 != cplx(0.0));
        worst = std::max(worst, std::abs(dd.d2) / std::abs(std::log(1.7 * r)));
    }
    CHECK(worst < 1.0);
}

TEST_CASE("free-field calibration against the modified Bessel oracle") {
    const auto& cal = kernel_calibration();
    CHECK(cal.constant == doctest::Approx(4 * kPi * kPi * kPi).epsilon(1e-12));
    CHECK(cal.variance < 1e-8);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> r(0.05, 5.0), t(0.0, kTwoPi);
    const auto zero = CirculationProfile::constant(0.0);
    const auto m1 = SpectralParameter::off_axis(-1.0);
    for (int k = 0; k < 100; ++k) {
        const PolarPoint x(r(rng), t(rng)), y(r(rng), t(rng));
        const cplx v = resolvent_kernel(zero, m1, x, y).total;
        CHECK(std::abs(v - k0_oracle(distance(x, y))) < 1e-10 * std::abs(v));
    }
}

TEST_CASE("scaling identity and rotation covariance") {
    const auto prof = CirculationProfile::constant(0.35);
    const PolarPoint x(0.8, 0.3), y(1.4, 2.6);
    for (double m : {4.0, 9.0}) {
        const auto big = resolvent_kernel(prof, SpectralParameter::off_axis(-m), x, y).total;
        const double sq = std::sqrt(m);
        const auto unit =
            resolvent_kernel(prof, SpectralParameter::off_axis(-1.0), PolarPoint(sq * x.r, x.theta),
                             PolarPoint(sq * y.r, y.theta))
                .total;
        CHECK(std::abs(big - unit) < 1e-10 * std::abs(unit));
    }
    const auto sp = SpectralParameter::from_delta(1, 0.3);
    const auto a = resolvent_kernel(prof, sp, x, y).total;
    for (double rot : {0.7, 3.0, -2.2}) {
        const auto b = resolvent_kernel(prof, sp, PolarPoint(x.r, x.theta + rot), PolarPoint(y.r, y.theta + rot)).total;
        CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
    }
}

TEST_CASE("gauge covariance for a non-constant profile") {
    const auto prof = CirculationProfile::fourier({0.3, 0.15}, {0.1});
    const auto mean = CirculationProfile::constant(0.3);
    const PolarPoint x(0.9, 1.0), y(1.2, 4.0);
    const auto sp = SpectralParameter::off_axis(-1.0);
    const cplx k = resolvent_kernel(prof, sp, x, y).total;
    const cplx k0 = resolvent_kernel(mean, sp, x, y).total;
    CHECK(std::abs(k - prof.gauge(x.theta) * k0 * std::conj(prof.gauge(y.theta))) < 1e-12);
}

TEST_CASE("spectral measure kernel") {
    const auto zero = CirculationProfile::constant(0.0);
    for (double lam : {0.5, 1.0, 3.0}) {
        const PolarPoint x(0.6, 0.2), y(1.7, 2.2);
        const double d = distance(x, y);
        const cplx v = spectral_measure_kernel(zero, lam, x, y);
        CHECK(std::abs(v - lam * std::cyl_bessel_j(0.0, lam * d) / (2 * kPi)) < 1e-12);
    }
    const auto prof = CirculationProfile::constant(0.4);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> r(0.2, 3.0), t(0.0, kTwoPi);
    for (int k = 0; k < 10; ++k) {
        const PolarPoint x(r(rng), t(rng)), y(r(rng), t(rng));
        const cplx a = spectral_measure_kernel(prof, 1.3, x, y), b = spectral_measure_kernel(prof, 1.3, y, x);
        CHECK(std::abs(a - std::conj(b)) < 1e-8);
    }
}

TEST_CASE("spectral route agrees with the direct kernel off the axis") {
    const auto prof = CirculationProfile::constant(0.5);
    const PolarPoint x(0.7, 0.4), y(1.1, 2.4);
    const auto sp = SpectralParameter::from_delta(-1, 0.6);
    const cplx direct = resolvent_kernel(prof, sp, x, y).total;
    const auto route = resolvent_kernel_spectral(prof, sp, x, y, 1e-4);
    CAPTURE(route.value);
    CAPTURE(direct);
    CHECK(std::abs(route.value - direct) < 1e-4);
    CHECK(std::abs(route.value - direct) <= route.error + 1e-6);
}

TEST_CASE("batched diffractive rule matches pointwise integrals") {
    for (double alpha : {0.5, 0.13, -0.7}) {
        for (auto sp : {SpectralParameter::off_axis(-1.0), SpectralParameter::boundary(1.0, 1),
                        SpectralParameter::from_delta(1, 0.01)}) {
            for (auto [r1, r2] : {std::pair{1.0, 1.0}, {0.01, 0.3}, {5.0, 12.0}, {0.002, 0.0015}}) {
                DiffractiveRule rule(alpha, r1, r2, sp, 0.01, 1e-10);
                for (double phi : {0.0, 0.02, 1.0, kPi, 4.0}) {
                    CAPTURE(alpha);
                    CAPTURE(r1);
                    CAPTURE(r2);
                    CAPTURE(phi);
                    CAPTURE(sp.sigma());
                    KernelOptions opt;
                    opt.tol = 1e-11;
                    const auto ref = diffractive_bracket_integrals(alpha, r1, r2, phi, sp, opt);
                    const cplx v = rule(phi);
                    CHECK(std::abs(v - (ref.d1 + ref.d2)) < 1e-8 * std::max(1.0, std::abs(v)));
                }
            }
        }
    }
}

TEST_CASE("SIMD bracket sums and matrix-vector products match the scalar path") {
    if (!simd::avx2_available()) return;
    DiffractiveRule rule(0.37, 0.4, 1.9, SpectralParameter::boundary(1.0, 1), 0.02, 1e-10);
    std::vector<double> b2, sp;
    for (int a = 0; a < 37; ++a) {
        const double phi = -kPi + kTwoPi * a / 37.0, h = std::sin(0.5 * phi);
        b2.push_back(2 * h * h);
        sp.push_back(std::sin(phi));
    }
    std::vector<cplx> s(37), v(37);
    simd::set_level(simd::Level::scalar);
    rule.evaluate(b2.data(), sp.data(), 37, s.data());
    simd::set_level(simd::Level::avx2);
    rule.evaluate(b2.data(), sp.data(), 37, v.data());
    for (int a = 0; a < 37; ++a) CHECK(std::abs(s[a] - v[a]) < 1e-13 * std::max(1.0, std::abs(s[a])));

    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    for (int cols : {1, 7, 64}) {
        std::vector<cplx> A(13 * cols), x(cols), y1(13), y2(13);
        for (auto& e : A) e = {n(rng), n(rng)};
        for (auto& e : x) e = {n(rng), n(rng)};
        simd::cgemv(simd::Level::scalar, A.data(), 13, cols, x.data(), y1.data());
        simd::cgemv(simd::Level::avx2, A.data(), 13, cols, x.data(), y2.data());
        for (int i = 0; i < 13; ++i) CHECK(std::abs(y1[i] - y2[i]) < 1e-12 * std::abs(y1[i]) + 1e-14);
    }
}
