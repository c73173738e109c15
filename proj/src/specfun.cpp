#include "abr/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace abr {

namespace detail {

cplx hankel0_series(cplx z) {
    const cplx q = -0.25 * z * z;
    cplx term = 1.0, j0 = 1.0, s = 0.0;
    double harmonic = 0.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / double(k * k);
        harmonic += 1.0 / k;
        j0 += term;
        s += term * harmonic;
        if (std::abs(term) * (1.0 + harmonic) < 1e-18 * std::abs(j0)) break;
    }
    const cplx y0 = (2.0 / kPi) * ((std::log(0.5 * z) + kEulerGamma) * j0 - s);
    return j0 + cplx(0, 1) * y0;
}

cplx hankel0_asymptotic(cplx z) {
    return std::sqrt(2.0 / (kPi * z)) * std::exp(cplx(0, 1) * (z - 0.25 * kPi)) * hankel0_asymptotic_sum(z);
}

cplx hankel0_integral(cplx z) {
    // H₀⁽¹⁾(z) = (2/iπ)∫_0^∞ exp(iz cosh t) dt; trapezoid converges geometrically in the strip
    // of analyticity whose width is min(arg z, π - arg z).
    const double arg = std::arg(z);
    const double strip = std::min(arg, kPi - arg);
    const double h = std::min(0.25, kTwoPi * strip / 40.0);
    cplx sum = 0.5 * std::exp(cplx(0, 1) * z);
    for (int k = 1; k < 100000; ++k) {
        const cplx v = std::exp(cplx(0, 1) * z * std::cosh(k * h));
        sum += v;
        if (std::abs(v) < 1e-18 * std::abs(sum)) break;
    }
    return (2.0 / (cplx(0, 1) * kPi)) * h * sum;
}

}  // namespace detail

cplx hankel0_asymptotic_sum(cplx z) {
    // a_k = (-1)^k [1·9·25···(2k-1)²] / (k! 8^k); truncated at the smallest term.
    const cplx inv = 1.0 / z;
    cplx sum = 1.0, term = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double c = -double((2 * k - 1) * (2 * k - 1)) / (8.0 * k);
        const cplx next = term * c * cplx(0, 1) * inv;
        const double mag = std::abs(next);
        if (mag > prev) break;
        term = next;
        sum += term;
        prev = mag;
        if (mag < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

cplx hankel0_complex(cplx z) {
    if (z.imag() < 0.0) throw std::domain_error("hankel0_complex: requires Im z >= 0");
    if (z == cplx(0.0)) throw std::domain_error("hankel0_complex: logarithmic singularity at 0");
    const double m = std::abs(z);
    if (m >= kHankelCrossover) return detail::hankel0_asymptotic(z);
    if (z.imag() > 4.0) return detail::hankel0_integral(z);
    return detail::hankel0_series(z);
}

cplx hankel0_complex_modulated(cplx z) {
    if (std::abs(z) >= kHankelCrossover) {
        return std::sqrt(2.0 / (kPi * z)) * std::exp(-z.imag()) * std::polar(1.0, -0.25 * kPi) *
               hankel0_asymptotic_sum(z);
    }
    return hankel0_complex(z) * std::polar(1.0, -z.real());
}

cplx hankel0_plus(double r) {
    if (!(r > 0.0)) throw std::domain_error("hankel0_plus: requires r > 0");
    if (r >= kHankelCrossover) return detail::hankel0_asymptotic(cplx(r, 0.0));
    return detail::hankel0_series(cplx(r, 0.0));
}

cplx hankel0_minus(double r) { return std::conj(hankel0_plus(r)); }

double Cutoff::operator()(double r) const {
    if (r <= 0.5) return 1.0;
    if (r >= 0.75) return 0.0;
    const double t = (r - 0.5) / 0.25;
    if (shape_ == Shape::quintic) return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    const double f0 = std::exp(-1.0 / t);
    const double f1 = std::exp(-1.0 / (1.0 - t));
    return f1 / (f0 + f1);
}

double Cutoff::derivative(double r) const {
    if (r <= 0.5 || r >= 0.75) return 0.0;
    const double t = (r - 0.5) / 0.25;
    if (shape_ == Shape::quintic) return -4.0 * 30.0 * t * t * (1.0 - t) * (1.0 - t);
    const double f0 = std::exp(-1.0 / t);
    const double f1 = std::exp(-1.0 / (1.0 - t));
    const double d0 = f0 / (t * t), d1 = -f1 / ((1.0 - t) * (1.0 - t));
    const double s = f0 + f1;
    return 4.0 * (d1 * f0 - f1 * d0) / (s * s);
}

cplx split_a_derivative(double r, const Cutoff& chi) {
    const double c = chi(r);
    if (c == 1.0) return 0.0;
    const cplx h0 = hankel0_plus(r);
    const cplx h1(std::cyl_bessel_j(1.0, r), std::cyl_neumann(1.0, r));
    const cplx m = std::polar(std::sqrt(r), -r);
    // a = (1-χ)·√r e^{-ir} H₀⁺
    const cplx inner = h0 * (0.5 / r - cplx(0.0, 1.0)) - h1;
    return -chi.derivative(r) * m * h0 + (1.0 - c) * m * inner;
}

HankelSplit split_ab(double r, const Cutoff& chi) {
    HankelSplit out;
    out.full = hankel0_plus(r);
    const double c = chi(r);
    out.b_part = c * out.full;
    if (c == 1.0) {
        out.a_part = 0.0;
    } else if (r >= kHankelCrossover) {
        out.a_part = (1.0 - c) * std::sqrt(2.0 / kPi) * std::polar(1.0, -0.25 * kPi) *
                     hankel0_asymptotic_sum(cplx(r, 0.0));
    } else {
        out.a_part = (1.0 - c) * out.full * std::polar(std::sqrt(r), -r);
    }
    return out;
}

DyadicCutoff::DyadicCutoff(int j) : j_(j) {
    if (j < 0) throw std::invalid_argument("DyadicCutoff: j must be nonnegative");
}

double DyadicCutoff::psi(double r) {
    constexpr double lo = 0.75, hi = 8.0 / 3.0;
    if (r <= lo || r >= hi) return 0.0;
    const double u = (2.0 * r - (lo + hi)) / (hi - lo);
    return std::exp(-1.0 / (1.0 - u * u));
}

double DyadicCutoff::beta(double r) {
    const double p = psi(r);
    if (p == 0.0) return 0.0;
    // Support ratio (8/3)/(3/4) < 4, so only j ∈ {-1, 0, 1} can contribute.
    const double total = psi(0.5 * r) + p + psi(2.0 * r);
    return p / total;
}

double DyadicCutoff::beta0(double r) {
    double s = 0.0;
    double scaled = 0.5 * r;
    while (scaled > 0.75) {
        s += beta(scaled);
        scaled *= 0.5;
    }
    return 1.0 - s;
}

double DyadicCutoff::operator()(double r) const {
    if (j_ == 0) return beta0(r);
    return beta(std::ldexp(r, -j_));
}

std::vector<double> LogGrid::nodes() const {
    std::vector<double> out(n);
    const double lr = std::log(r_min), h = step();
    for (int i = 0; i < n; ++i) out[i] = std::exp(lr + i * h);
    return out;
}

double LogGrid::step() const { return (std::log(r_max) - std::log(r_min)) / (n - 1); }

DerivativeBoundReport finite_difference_bounds(const std::function<cplx(double)>& f, const std::vector<int>& orders,
                                               const std::function<double(double, int)>& envelope,
                                               const LogGrid& grid) {
    constexpr double kMaxLogStep = 0.05;
    if (grid.n < 5 || !(grid.r_min > 0) || !(grid.r_max > grid.r_min))
        throw std::invalid_argument("finite_difference_bounds: grid needs at least 5 log-spaced points");
    const double h = grid.step();
    if (h > kMaxLogStep)
        throw std::invalid_argument("finite_difference_bounds: grid too coarse (log step " + std::to_string(h) +
                                    " > " + std::to_string(kMaxLogStep) + ")");
    for (int k : orders)
        if (k < 0 || k > 3) throw std::invalid_argument("finite_difference_bounds: supported orders are 0..3");

    const auto r = grid.nodes();
    std::vector<cplx> v(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) v[i] = f(r[i]);

    DerivativeBoundReport rep;
    rep.orders = orders;
    for (int k : orders) {
        double worst = 0.0, worst_r = r.front();
        for (std::size_t i = 2; i + 2 < r.size(); ++i) {
            // u-derivatives (u = log r), converted with Stirling numbers of the first kind.
            const cplx d1 = (v[i + 1] - v[i - 1]) / (2 * h);
            const cplx d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
            const cplx d3 = (v[i + 2] - 2.0 * v[i + 1] + 2.0 * v[i - 1] - v[i - 2]) / (2 * h * h * h);
            cplx dk;
            switch (k) {
                case 0: dk = v[i]; break;
                case 1: dk = d1 / r[i]; break;
                case 2: dk = (d2 - d1) / (r[i] * r[i]); break;
                default: dk = (d3 - 3.0 * d2 + 2.0 * d1) / (r[i] * r[i] * r[i]); break;
            }
            const double env = envelope(r[i], k);
            if (!(env > 0)) continue;
            const double ratio = std::abs(dk) / env;
            if (ratio > worst) {
                worst = ratio;
                worst_r = r[i];
            }
        }
        rep.max_ratio.push_back(worst);
        rep.worst_r.push_back(worst_r);
    }
    return rep;
}

}  // namespace abr
