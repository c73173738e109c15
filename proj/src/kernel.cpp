#include "abr/kernel.hpp"

#include "abr/far_tail.hpp"
#include "abr/quadrature.hpp"
#include "abr/simd.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace abr {

namespace {

constexpr double kFourPiSq = 4.0 * kPi * kPi;
// |θ1 - θ2| within this of π counts as the antipodal case.
constexpr double kAntipodalTol = 1e-12;

struct BracketCoeffs {
    double alpha, c_exp, c_frac, b2, sinphi;
};

BracketCoeffs bracket_coeffs(double alpha, double phi) {
    const double w = wrap_to_pi(phi);
    const double h = std::sin(0.5 * w);
    return {alpha, std::sin(std::abs(alpha) * kPi), std::sin(alpha * kPi), 2.0 * h * h, std::sin(w)};
}

cplx bracket_eval(const BracketCoeffs& c, double s) {
    const double aa = std::abs(c.alpha);
    const double e = std::exp(-aa * s);
    if (s > 600.0) {
        // cosh s dominates the denominator; ratio reduces to e^{(|α|-1)s}.
        const double g = std::exp((aa - 1.0) * s);
        const double sg = c.alpha > 0 ? 1.0 : (c.alpha < 0 ? -1.0 : 0.0);
        return c.c_exp * e + c.c_frac * cplx(-(1.0 - c.b2) * sg * g, -c.sinphi * g);
    }
    const double sh2 = std::sinh(0.5 * s);
    const double den = 2.0 * sh2 * sh2 + c.b2;
    if (den == 0.0) return c.c_exp - 2.0 * c.alpha * c.c_frac;
    const double re = (std::expm1(-s) + c.b2) * std::sinh(c.alpha * s);
    const double im = -c.sinphi * std::cosh(c.alpha * s);
    return c.c_exp * e + c.c_frac * cplx(re, im) / den;
}

// s with |n(s)| = u, or -1 when u < r1 + r2.
double s_at_distance(double r1, double r2, double u) {
    const double c = (u * u - r1 * r1 - r2 * r2) / (2.0 * r1 * r2);
    if (c < 1.0) return -1.0;
    return std::acosh(c);
}

struct FarGeometry {
    double s, dsdu;
};

FarGeometry far_geometry(double r1, double r2, double u) {
    const double c = (u * u - r1 * r1 - r2 * r2) / (2.0 * r1 * r2);
    const double sh = std::sqrt((c - 1.0) * (c + 1.0));
    return {std::acosh(c), u / (r1 * r2 * sh)};
}

// Switch from s to u = |n| once |κ||n| ≥ 1 (and at least s = 1).
double switch_point(double r1, double r2, double kmod) {
    const double s1 = s_at_distance(r1, r2, 1.0 / kmod);
    return std::max(1.0, s1);
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// SpectralParameter

SpectralParameter SpectralParameter::off_axis(cplx sigma) {
    if (!(std::isfinite(sigma.real()) && std::isfinite(sigma.imag())))
        throw std::invalid_argument("SpectralParameter: sigma must be finite");
    if (sigma.imag() == 0.0 && sigma.real() >= 0.0)
        throw std::invalid_argument("SpectralParameter: sigma must not lie on [0, inf); use boundary(lambda, branch)");
    SpectralParameter p;
    p.sigma_ = sigma;
    return p;
}

SpectralParameter SpectralParameter::boundary(double lambda, int branch) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("SpectralParameter: boundary value needs lambda > 0");
    if (branch != 1 && branch != -1) throw std::invalid_argument("SpectralParameter: branch must be +1 or -1");
    SpectralParameter p;
    p.boundary_ = true;
    p.lambda_ = lambda;
    p.branch_ = branch;
    p.sigma_ = lambda * lambda;
    return p;
}

SpectralParameter SpectralParameter::from_delta(int sign, double delta) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("SpectralParameter: sign must be +1 or -1");
    if (!(std::abs(delta) <= 1.0)) throw std::invalid_argument("SpectralParameter: delta must lie in [-1, 1]");
    if (delta == 0.0 && sign > 0) return boundary(1.0, +1);
    return off_axis(cplx(sign * std::sqrt((1.0 - delta) * (1.0 + delta)), delta));
}

cplx SpectralParameter::kappa() const {
    if (boundary_) return branch_ * lambda_;
    cplx k = std::sqrt(sigma_);
    if (k.imag() < 0.0) k = -k;
    return k;
}

SpectralParameter SpectralParameter::normalized() const {
    if (boundary_) return boundary(1.0, branch_);
    return off_axis(sigma_ / std::abs(sigma_));
}

int SpectralParameter::sign() const {
    if (boundary_) return 1;
    return sigma_.real() >= 0.0 ? 1 : -1;
}

double SpectralParameter::delta() const {
    if (boundary_) return 0.0;
    return sigma_.imag() / std::abs(sigma_);
}

int SpectralParameter::regime(double eps) const {
    if (sign() < 0) return 1;
    if (!boundary_ && std::abs(delta()) >= eps) return 2;
    return 3;
}

// ---------------------------------------------------------------------------------------------
// Free functions

cplx free_hankel(const SpectralParameter& sp, double rho) {
    if (sp.is_boundary()) {
        const cplx h = hankel0_plus(sp.lambda() * rho);
        return sp.branch() > 0 ? h : -std::conj(h);
    }
    return hankel0_complex(sp.kappa() * rho);
}

cplx free_hankel_modulated(const SpectralParameter& sp, double rho) {
    if (sp.is_boundary()) {
        const cplx h = hankel0_complex_modulated(cplx(sp.lambda() * rho, 0.0));
        return sp.branch() > 0 ? h : -std::conj(h);
    }
    return hankel0_complex_modulated(sp.kappa() * rho);
}

cplx free_oracle(const SpectralParameter& sp, const PolarPoint& x, const PolarPoint& y) {
    const double d = distance(x, y);
    if (!(d > 0.0)) throw std::domain_error("free_oracle: coincident points");
    return cplx(0, 0.25) * free_hankel(sp, d);
}

cplx angular_A(const CirculationProfile& profile, double theta1, double theta2) {
    // Representative of θ2 nearest θ1, using the periodic extension of the antiderivative.
    const double t1 = reduce_angle(theta1);
    const double t2 = reduce_angle(theta2);
    const double d = t2 - t1;  // in (-2π, 2π)
    const double base = profile.antiderivative(t1);
    if (std::abs(std::abs(d) - kPi) <= kAntipodalTol) {
        const cplx e1 = std::polar(1.0, profile.antiderivative(t2) - base);
        const double shift = d > 0 ? -kTwoPi : kTwoPi;
        const cplx e2 = std::polar(1.0, profile.antiderivative(t2 + shift) - base);
        return 0.5 * (e1 + e2) / kFourPiSq;
    }
    double t2r = t2;
    if (d > kPi) t2r -= kTwoPi;
    if (d < -kPi) t2r += kTwoPi;
    return std::polar(1.0, profile.antiderivative(t2r) - base) / kFourPiSq;
}

cplx angular_B_bracket(double alpha, double s, double phi) {
    if (!(s >= 0.0)) throw std::domain_error("angular_B: s must be nonnegative");
    return bracket_eval(bracket_coeffs(alpha, phi), s);
}

cplx angular_B(const CirculationProfile& profile, double s, double theta1, double theta2) {
    const cplx gauge = profile.gauge(theta1) * std::conj(profile.gauge(theta2));
    return -gauge * angular_B_bracket(profile.mean_flux(), s, theta1 - theta2 + kPi) / kFourPiSq;
}

std::pair<cplx, cplx> direct_terms(const CirculationProfile& profile, const PolarPoint& x, const PolarPoint& y,
                                   const SpectralParameter& sp, const Cutoff& cutoff) {
    const double d = distance(x, y);
    if (!(d > 0.0)) throw std::domain_error("direct_terms: coincident points");
    const cplx h = free_hankel(sp, d) * angular_A(profile, y.theta, x.theta);
    const double chi = cutoff(std::abs(sp.kappa()) * d);
    return {(1.0 - chi) * h, chi * h};
}

DiffractiveResult diffractive_bracket_integrals(double alpha, double r1, double r2, double phi,
                                                const SpectralParameter& sp, const KernelOptions& opt) {
    DiffractiveResult out;
    const BracketCoeffs bc = bracket_coeffs(alpha, phi);
    if (bc.c_exp == 0.0 && bc.c_frac == 0.0) return out;

    const cplx kappa = sp.kappa();
    const double km = std::abs(kappa);
    const double s_sw = switch_point(r1, r2, km);

    // Near region: the bracket is a Lorentzian of width ~ b in s; grade breakpoints geometrically from b.
    std::vector<double> cuts;
    const double b = std::sqrt(bc.b2);
    if (b > 1e-300)
        for (double t = b; t < s_sw; t *= 2.0) cuts.push_back(t);
    for (double level : {0.5, 0.75}) {
        const double s = s_at_distance(r1, r2, level / km);
        if (s > 0.0 && s < s_sw) cuts.push_back(s);
    }
    quad::AdaptiveOptions aopt;
    aopt.abs_tol = 0.25 * opt.tol;
    aopt.max_panels = 20000;
    const Cutoff& chi = opt.cutoff;
    auto full = [&](double s) {
        return free_hankel(sp, diffractive_distance(r1, r2, s)) * bracket_eval(bc, s);
    };
    const auto near = quad::adaptive(full, 0.0, s_sw, aopt, cuts);
    out.evaluations += near.evaluations;

    cplx d2 = 0.0;
    double err2 = 0.0;
    const double s_chi = s_at_distance(r1, r2, 0.75 / km);
    if (km * (r1 + r2) < 0.75) {
        auto part = [&](double s) {
            const double n = diffractive_distance(r1, r2, s);
            return chi(km * n) * free_hankel(sp, n) * bracket_eval(bc, s);
        };
        const double top = std::min(s_chi, s_sw);
        std::vector<double> c2;
        for (double c : cuts)
            if (c < top) c2.push_back(c);
        const auto r = quad::adaptive(part, 0.0, top, aopt, c2);
        d2 = r.value;
        err2 = r.error;
        out.evaluations += r.evaluations;
        out.converged = out.converged && r.converged;
    }

    // Far region in u = |n|, where e^{iRe κ u} carries the oscillation.
    const double u0 = diffractive_distance(r1, r2, s_sw);
    auto amp = [&](double u) {
        const auto fg = far_geometry(r1, r2, u);
        return free_hankel_modulated(sp, u) * bracket_eval(bc, fg.s) * fg.dsdu;
    };
    const auto far = detail::far_integral(amp, u0, kappa, 0.5 * opt.tol);
    out.evaluations += far.evaluations;

    const cplx total = near.value + far.value;
    out.d2 = d2;
    out.d1 = total - d2;
    out.err2 = err2;
    out.err1 = near.error + far.error + err2;
    out.converged = out.converged && near.converged && far.converged;
    return out;
}

DiffractiveResult diffractive_terms(const CirculationProfile& profile, const PolarPoint& x, const PolarPoint& y,
                                    const SpectralParameter& sp, const KernelOptions& opt) {
    auto r = diffractive_bracket_integrals(profile.mean_flux(), x.r, y.r, x.theta - y.theta + kPi, sp, opt);
    const cplx f = -profile.gauge(x.theta) * std::conj(profile.gauge(y.theta)) / kFourPiSq;
    r.d1 *= f;
    r.d2 *= f;
    r.err1 *= std::abs(f);
    r.err2 *= std::abs(f);
    return r;
}

// ---------------------------------------------------------------------------------------------
// Normalization

Calibration calibrate_normalization(int pairs, unsigned seed) {
    if (pairs < 1) throw std::invalid_argument("calibrate_normalization: need at least one pair");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logr(std::log(0.05), std::log(5.0)), ang(0.0, kTwoPi);
    const auto free = CirculationProfile::constant(0.0);
    const auto sp = SpectralParameter::off_axis(-1.0);
    std::vector<cplx> u, v;
    for (int k = 0; k < pairs; ++k) {
        const PolarPoint x(std::exp(logr(rng)), ang(rng)), y(std::exp(logr(rng)), ang(rng));
        const auto [g1, g2] = direct_terms(free, x, y, sp);
        u.push_back(cplx(0, 1) / (4.0 * kPi) * (g1 + g2));
        v.push_back(free_oracle(sp, x, y));
    }
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        num += std::conj(u[k]) * v[k];
        den += std::norm(u[k]);
    }
    Calibration c;
    c.constant = (num / den).real();
    c.pairs = pairs;
    double var = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) var += std::norm(v[k] / u[k] / c.constant - 1.0);
    c.variance = var / pairs;
    return c;
}

const Calibration& kernel_calibration() {
    static const Calibration c = [] {
        auto fit = calibrate_normalization(100, 20240611u);
        if (!(fit.variance < 1e-8)) throw std::runtime_error("kernel_calibration: unstable normalization fit");
        return fit;
    }();
    return c;
}

KernelValue resolvent_kernel(const CirculationProfile& profile, const SpectralParameter& sp, const PolarPoint& x,
                             const PolarPoint& y, const KernelOptions& opt) {
    KernelValue kv;
    std::tie(kv.g1, kv.g2) = direct_terms(profile, x, y, sp, opt.cutoff);
    const auto d = diffractive_terms(profile, x, y, sp, opt);
    kv.d1 = d.d1;
    kv.d2 = d.d2;
    kv.err_d1 = d.err1;
    kv.err_d2 = d.err2;
    kv.converged = d.converged;
    const double c = kernel_calibration().constant;
    kv.total = c * cplx(0, 1) / (4.0 * kPi) * (kv.g1 + kv.g2 + (kv.d1 + kv.d2) / kPi);
    return kv;
}

cplx spectral_measure_kernel(const CirculationProfile& profile, double lambda, const PolarPoint& x,
                             const PolarPoint& y, const KernelOptions& opt) {
    const auto plus = resolvent_kernel(profile, SpectralParameter::boundary(lambda, +1), x, y, opt);
    const auto minus = resolvent_kernel(profile, SpectralParameter::boundary(lambda, -1), x, y, opt);
    return lambda / (cplx(0, 1) * kPi) * (plus.total - minus.total);
}

SpectralRouteResult resolvent_kernel_spectral(const CirculationProfile& profile, const SpectralParameter& sp,
                                              const PolarPoint& x, const PolarPoint& y, double tol) {
    if (sp.is_boundary()) throw std::invalid_argument("resolvent_kernel_spectral: needs an off-axis sigma");
    const double d = distance(x, y);
    const double scale = std::max(d, x.r + y.r);
    // Measure decays like λ^{1/2}·oscillation; the truncated tail is O(Λ^{-3/2}/d).
    const double lam_max = std::max(50.0, std::pow(tol * std::sqrt(d), -2.0 / 3.0));
    KernelOptions kopt;
    kopt.tol = 1e-3 * tol;
    const cplx sigma = sp.sigma();
    auto f = [&](double lam) {
        if (lam <= 0.0) return cplx(0.0);
        return spectral_measure_kernel(profile, lam, x, y, kopt) / (lam * lam - sigma);
    };
    SpectralRouteResult out;
    out.cutoff_lambda = lam_max;
    const double chunk = kTwoPi / scale;
    quad::AdaptiveOptions aopt;
    aopt.abs_tol = 0.5 * tol * chunk / lam_max;
    std::vector<double> cuts{std::sqrt(std::abs(sigma))};
    for (double a = 0.0; a < lam_max; a += chunk) {
        const double b = std::min(lam_max, a + chunk);
        const auto r = quad::adaptive(f, a, b, aopt, cuts);
        out.value += r.value;
        out.error += r.error;
    }
    out.error += std::pow(lam_max, -1.5) / std::sqrt(d);
    return out;
}

// ---------------------------------------------------------------------------------------------
// DiffractiveRule

void DiffractiveRule::add_node(double s, cplx weight) {
    wf_re_.push_back(weight.real());
    wf_im_.push_back(weight.imag());
    e1_.push_back(std::exp(-std::abs(alpha_) * s));
    em1_.push_back(std::expm1(-s));
    const double clamp = std::min(s, 600.0);
    sh_.push_back(std::sinh(alpha_ * clamp));
    ch_.push_back(std::cosh(alpha_ * clamp));
    const double h = std::sinh(0.5 * clamp);
    dd_.push_back(2.0 * h * h);
}

DiffractiveRule::DiffractiveRule(double alpha, double r1, double r2, const SpectralParameter& sp, double b_min,
                                 double tol)
    : c_exp_(std::sin(std::abs(alpha) * kPi)), c_frac_(std::sin(alpha * kPi)), alpha_(alpha) {
    if (c_exp_ == 0.0 && c_frac_ == 0.0) return;
    const cplx kappa = sp.kappa();
    const double km = std::abs(kappa);
    const double s_sw = switch_point(r1, r2, km);
    const auto& gl = quad::gauss_legendre(16);

    // Near panels: graded from b_min, each at most 0.25 long and at most one oscillation of H.
    std::vector<double> edges{0.0};
    const double bm = std::clamp(b_min, 1e-8, 0.25);
    for (double t = bm; t < s_sw; t *= 2.0) edges.push_back(t);
    edges.push_back(s_sw);
    std::vector<double> fine{0.0};
    for (std::size_t i = 1; i < edges.size(); ++i) {
        const double a = edges[i - 1], b = edges[i];
        // Limit phase change of e^{iκ|n|} across a panel: d|n|/ds ≤ r1r2 sinh s/|n| ≤ (r1 + r2) sinh(s)/2.
        const double slope = std::max(1.0, km * 0.5 * (r1 + r2) * std::sinh(b));
        const int m = std::max(1, static_cast<int>(std::ceil((b - a) / std::min(0.25, 2.0 / slope))));
        for (int k = 1; k <= m; ++k) fine.push_back(a + (b - a) * k / m);
    }
    for (std::size_t i = 1; i < fine.size(); ++i) {
        const double a = fine[i - 1], b = fine[i], c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int q = 0; q < 16; ++q) {
            const double s = c + h * gl.x[q];
            add_node(s, h * gl.w[q] * free_hankel(sp, diffractive_distance(r1, r2, s)));
        }
    }

    // Far panels with Filon weights; panel layout adapted to a reference φ, the bracket being smooth there.
    const BracketCoeffs ref = bracket_coeffs(alpha, 0.5 * kPi);
    auto amp = [&](double u) {
        const auto fg = far_geometry(r1, r2, u);
        return free_hankel_modulated(sp, u) * bracket_eval(ref, fg.s) * fg.dsdu;
    };
    const double omega = kappa.real(), decay = kappa.imag();
    double U = diffractive_distance(r1, r2, s_sw);
    std::vector<std::pair<double, double>> panels;
    const double ptol = tol / 64.0;
    std::function<void(double, double, int)> split = [&](double a, double b, int depth) {
        const auto p = quad::filon_panel(amp, a, b, omega);
        if (p.error > ptol && depth < 20) {
            split(a, 0.5 * (a + b), depth + 1);
            split(0.5 * (a + b), b, depth + 1);
            return;
        }
        if (p.error > ptol) converged_ = false;
        panels.emplace_back(a, b);
    };
    bool closed = false;
    for (int panel = 0; panel < 400 && !closed; ++panel) {
        double len = std::max(U, 1.0);
        if (decay > 0.0) len = std::min(len, 4.0 / decay);
        split(U, U + len, 0);
        U += len;
        const cplx g0 = amp(U);
        const double env = std::abs(g0) / km;
        closed = km * U >= 8.0 && env * (1.0 + decay) / (km * U) < tol / 16.0;
    }
    if (!closed) converged_ = false;
    cplx w[quad::kFilonPoints];
    for (auto [a, b] : panels) {
        quad::filon_weights(a, b, omega, w);
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        const cplx shift = std::polar(1.0, omega * c);
        for (int q = 0; q < quad::kFilonPoints; ++q) {
            const double u = c + h * gl.x[q];
            const auto fg = far_geometry(r1, r2, u);
            add_node(fg.s, shift * w[q] * free_hankel_modulated(sp, u) * fg.dsdu);
        }
    }
    // Leading integration-by-parts tail: e^{iκU}·i h(U)/κ.
    const auto fg = far_geometry(r1, r2, U);
    add_node(fg.s, std::polar(1.0, omega * U) * cplx(0, 1) / kappa * free_hankel_modulated(sp, U) * fg.dsdu);
}

cplx DiffractiveRule::operator()(double phi) const {
    const double w = wrap_to_pi(phi);
    const double h = std::sin(0.5 * w);
    const double b2 = 2.0 * h * h, sp = std::sin(w);
    cplx out;
    evaluate(&b2, &sp, 1, &out);
    return out;
}

void DiffractiveRule::evaluate(const double* b2, const double* sinphi, int count, cplx* out) const {
    if (wf_re_.empty()) {
        std::fill(out, out + count, cplx(0.0));
        return;
    }
    const simd::BracketBatch batch{wf_re_.data(), wf_im_.data(), e1_.data(), em1_.data(), sh_.data(),
                                   ch_.data(),    dd_.data(),    wf_re_.size(), c_exp_, c_frac_};
    simd::bracket_sums(batch, b2, sinphi, count, out);
}

}  // namespace abr
