#include "doctest.h"

#include "abr/specfun.hpp"

#include <cmath>

using namespace abr;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Reference values computed with mpmath at 30 digits.
struct RealRef {
    double r, re, im;
};
constexpr RealRef kRealRefs[] = {
    {1e-06, 0.99999999999975, -8.8690314816594437},
    {0.01, 0.99997500015624957, -3.0054556370836459},
    {0.3, 0.97762624653829609, -0.80727357780451949},
    {1.0, 0.76519768655796655, 0.088256964215676958},
    {2.5, -0.048383776468197996, 0.49807035961523189},
    {7.9, 0.19436184484127824, 0.20652094814437577},
    {8.1, 0.14751745404437767, 0.23809132870223481},
    {11.9, 0.025049441699589645, -0.22983321394337506},
    {12.1, 0.069666773606807312, -0.21843838055092549},
    {20.0, 0.16702466434058315, 0.062640596809383831},
    {75.5, 0.071095060271513679, -0.058115036948677793},
    {1000.0, 0.024786686152420175, 0.0047159179776228134},
};

struct ComplexRef {
    cplx z, h;
};
const ComplexRef kComplexRefs[] = {
    {{0.0, 1.0}, {0.0, -0.26803248203398855}},
    {{0.5, 0.5}, {0.38174392034651835, -0.35203310670701479}},
    {{3.0, 2.0}, {-0.017793270303994595, 0.05281940449715538}},
    {{-3.0, 2.0}, {0.017793270303994595, 0.05281940449715538}},
    {{0.2, 6.0}, {0.00016973663769094794, -0.00077333812352750554}},
    {{5.0, 5.0}, {-0.0015664696039715766, -0.0012383292724065576}},
    {{-8.0, 7.0}, {-0.00018717246548433179, 0.00011830662329329301}},
    {{15.0, 1.0}, {-0.0027156431159523456, 0.075593001142721435}},
    {{-20.0, 3.0}, {-0.0084692010886037451, 0.0024770398702905172}},
    {{0.001, 0.001}, {0.49999755629893845, -4.2507825382322767}},
    {{0.0, 10.0}, {0.0, -1.1319139224400062e-5}},
    {{0.0, 30.0}, {0.0, -1.3575773383773233e-14}},
    {{2.0, 4.5}, {0.0031594811777328839, 0.0023013385226441045}},
};

}  // namespace

TEST_CASE("real-axis Hankel function matches reference values") {
    for (const auto& ref : kRealRefs) {
        CAPTURE(ref.r);
        const cplx h = hankel0_plus(ref.r);
        CHECK(rel(h, {ref.re, ref.im}) < 5e-12);
        CHECK(hankel0_minus(ref.r) == std::conj(h));
    }
}

TEST_CASE("complex Hankel function matches reference values in all regimes") {
    for (const auto& ref : kComplexRefs) {
        CAPTURE(ref.z);
        CHECK(rel(hankel0_complex(ref.z), ref.h) < 1e-10);
        const cplx mod = hankel0_complex_modulated(ref.z) * std::polar(1.0, ref.z.real());
        CHECK(rel(mod, ref.h) < 1e-10);
    }
}

TEST_CASE("complex Hankel rejects the lower half plane and the origin") {
    CHECK_THROWS_AS(hankel0_complex({1.0, -0.1}), std::domain_error);
    CHECK_THROWS_AS(hankel0_complex({0.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(hankel0_plus(0.0), std::domain_error);
}

TEST_CASE("series and asymptotic branches agree at the crossover") {
    for (double r : {11.5, 12.0, 12.5}) {
        CAPTURE(r);
        CHECK(rel(detail::hankel0_series({r, 0.0}), detail::hankel0_asymptotic({r, 0.0})) < 3e-11);
    }
}

TEST_CASE("cutoff is one near zero, zero beyond 3/4 and monotone between") {
    for (auto shape : {Cutoff::Shape::bump, Cutoff::Shape::quintic}) {
        Cutoff chi(shape);
        CHECK(chi(0.1) == 1.0);
        CHECK(chi(0.5) == 1.0);
        CHECK(chi(0.75) == 0.0);
        CHECK(chi(3.0) == 0.0);
        double prev = 1.0;
        for (int k = 0; k <= 100; ++k) {
            const double v = chi(0.5 + 0.25 * k / 100.0);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("split reconstructs the Hankel function") {
    for (double r = 0.01; r < 200.0; r *= 1.37) {
        CAPTURE(r);
        const auto s = split_ab(r);
        const cplx rebuilt = std::polar(1.0 / std::sqrt(r), r) * s.a_part + s.b_part;
        CHECK(rel(rebuilt, s.full) < 1e-12);
        if (r >= 0.75) CHECK(s.b_part == cplx(0.0));
    }
}

TEST_CASE("dyadic cutoffs form a partition of unity") {
    for (double r = 0.01; r < 1e4; r *= 1.11) {
        CAPTURE(r);
        double sum = DyadicCutoff(0)(r);
        for (int j = 1; j < 20; ++j) sum += DyadicCutoff(j)(r);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
        // β_j is supported on [3/4·2^j, 8/3·2^j].
        for (int j = 1; j < 12; ++j) {
            const double v = DyadicCutoff(j)(r);
            if (r < 0.75 * std::ldexp(1.0, j) || r > 8.0 / 3.0 * std::ldexp(1.0, j)) CHECK(v == 0.0);
            CHECK(v >= 0.0);
        }
    }
    CHECK(DyadicCutoff(0)(0.5) == 1.0);
    CHECK_THROWS(DyadicCutoff(-1));
}

TEST_CASE("finite-difference bounds recover derivative sizes of a power") {
    // f(r) = r^{-1/2}: |f^{(k)}| = c_k r^{-1/2-k} with c = 1, 1/2, 3/4, 15/8.
    auto f = [](double r) { return cplx(1.0 / std::sqrt(r), 0.0); };
    auto env = [](double r, int k) { return std::pow(r, -0.5 - k); };
    const auto rep = finite_difference_bounds(f, {0, 1, 2, 3}, env, LogGrid{0.1, 10.0, 400});
    CHECK(rep.max_ratio[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.max_ratio[1] == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(rep.max_ratio[2] == doctest::Approx(0.75).epsilon(1e-3));
    CHECK(rep.max_ratio[3] == doctest::Approx(1.875).epsilon(2e-3));
    CHECK_THROWS_AS(finite_difference_bounds(f, {1}, env, LogGrid{0.1, 10.0, 20}), std::invalid_argument);
    CHECK_THROWS_AS(finite_difference_bounds(f, {4}, env, LogGrid{0.1, 10.0, 400}), std::invalid_argument);
}

TEST_CASE("amplitude derivative matches central differences") {
    for (auto shape : {Cutoff::Shape::bump, Cutoff::Shape::quintic}) {
        const Cutoff chi(shape);
        for (double r : {0.55, 0.6, 0.7, 0.74, 1.0, 3.0, 11.9, 12.1, 40.0, 700.0}) {
            CAPTURE(r);
            const double h = 1e-5 * r;
            const cplx fd = (split_ab(r + h, chi).a_part - split_ab(r - h, chi).a_part) / (2.0 * h);
            const cplx an = split_a_derivative(r, chi);
            CHECK(std::abs(an - fd) < 1e-7 * (1.0 + std::abs(an)));
            const double cfd = (chi(r + h) - chi(r - h)) / (2.0 * h);
            CHECK(std::abs(chi.derivative(r) - cfd) < 1e-6);
        }
        CHECK(split_a_derivative(0.3, chi) == cplx(0.0));
    }
}
