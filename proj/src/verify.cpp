#include "abr/verify.hpp"

#include "abr/analysis.hpp"
#include "abr/far_tail.hpp"
#include "abr/kernel.hpp"
#include "abr/parallel.hpp"
#include "abr/quadrature.hpp"
#include "abr/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace abr::verify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kWorstKept = 16;

double beta(double r) { return DyadicCutoff::beta(r); }

struct Sample {
    int j = 0;
    double ratio = 0.0;
    int status = 0;  // 0 evaluated, 1 vacuous, 2 quadrature failure
    std::vector<std::pair<std::string, double>> params;
};

class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) : gen_(seed * 0x9E3779B97F4A7C15ULL + stream) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen_); }
    double sign() { return uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0; }

private:
    std::mt19937_64 gen_;
};

// Radii with r₁ + r₂ = t and the smaller one a log-uniform fraction in [2^{-depth-1}, 1/2].
std::pair<double, double> split_radii(Rng& rng, double t, double depth) {
    const double x = 0.5 * std::exp2(-rng.uniform(0.0, depth));
    const double r1 = rng.uniform(0.0, 1.0) < 0.5 ? t * x : t * (1.0 - x);
    return {r1, t - r1};
}

double flux_sample(Rng& rng) { return rng.sign() * rng.uniform(0.05, 0.95); }

// Half the samples spread over the circle, half clustered at the antipodal direction φ → 0.
double angle_sample(Rng& rng) {
    if (rng.uniform(0.0, 1.0) < 0.5) return rng.uniform(-kPi, kPi);
    return rng.sign() * kPi * std::pow(10.0, -rng.uniform(0.0, 6.0));
}

std::vector<int> j_range(const SweepOptions& opt) {
    if (opt.j_min < 1 || opt.j_max < opt.j_min) throw std::invalid_argument("SweepOptions: need 1 <= j_min <= j_max");
    if (opt.samples < 1) throw std::invalid_argument("SweepOptions: samples must be positive");
    std::vector<int> js;
    for (int j = opt.j_min; j <= opt.j_max; ++j) js.push_back(j);
    return js;
}

void keep_worst(BoundCheckReport& rep, const std::vector<Sample>& samples) {
    std::vector<const Sample*> ok;
    for (const auto& s : samples)
        if (s.status == 0) ok.push_back(&s);
    std::stable_sort(ok.begin(), ok.end(), [](const Sample* a, const Sample* b) { return a->ratio > b->ratio; });
    rep.worst.clear();
    for (std::size_t k = 0; k < ok.size() && k < kWorstKept; ++k)
        rep.worst.push_back({ok[k]->j, ok[k]->ratio, ok[k]->params});
    if (!ok.empty()) {
        rep.max_ratio = ok.front()->ratio;
        rep.worst_point = ok.front()->params;
        rep.worst_point.insert(rep.worst_point.begin(), {"j", double(ok.front()->j)});
    }
}

// Tallies a j-sweep; flatness means |slope of log₂ max ratio vs j| within the tolerance.
BoundCheckReport finalize_sweep(const std::string& id, const std::vector<Sample>& samples, const std::vector<int>& js,
                                double flat_tolerance) {
    BoundCheckReport rep;
    rep.claim_id = id;
    rep.js = js;
    rep.max_ratio_by_j.assign(js.size(), 0.0);
    for (const auto& s : samples) {
        if (s.status != 0) {
            ++rep.skipped;
            if (s.status == 2) ++rep.failed;
            continue;
        }
        ++rep.sample_count;
        auto& m = rep.max_ratio_by_j[s.j - js.front()];
        m = std::max(m, s.ratio);
    }
    keep_worst(rep, samples);
    std::vector<double> x, y;
    for (std::size_t k = 0; k < js.size(); ++k) {
        if (rep.max_ratio_by_j[k] > 0.0) {
            x.push_back(js[k]);
            y.push_back(std::log2(rep.max_ratio_by_j[k]));
        }
    }
    rep.slope = x.size() >= 2 ? fit_slope(x, y) : kNaN;
    rep.slope_target = 0.0;
    rep.slope_tolerance = flat_tolerance;
    const bool finite = std::isfinite(rep.max_ratio) && rep.sample_count > 0;
    const bool few_failures = rep.failed * 100 <= rep.sample_count + rep.skipped;
    rep.pass = finite && few_failures && std::isfinite(rep.slope) && std::abs(rep.slope) <= flat_tolerance;
    return rep;
}

void finalize_grid(BoundCheckReport& rep, double refined) {
    rep.refined_max_ratio = refined;
    rep.pass = std::isfinite(rep.max_ratio) && std::isfinite(refined) && rep.refinement_change() < 0.25;
}

// Breakpoints b·2^k inside (lo, hi).
std::vector<double> geometric_cuts(double b, double lo, double hi) {
    std::vector<double> cuts;
    if (!(b > 0.0)) return cuts;
    for (int k = -40; k <= 40; ++k) {
        const double c = std::ldexp(b, k);
        if (c > lo && c < hi) cuts.push_back(c);
    }
    return cuts;
}

// |n|² = r₁² + r₂² + 2r₁r₂ cosh s written without cancellation.
double diffractive_norm(double r1, double r2, double s) {
    const double t = r1 + r2, h = std::sinh(0.5 * s);
    return std::sqrt(t * t + 4.0 * r1 * r2 * h * h);
}

struct AngleData {
    double b2, sphi;  // 2 sin²(φ/2), sin φ
};

AngleData angle_data(double phi) {
    const double w = wrap_to_pi(phi);
    const double h = std::sin(0.5 * w);
    return {2.0 * h * h, std::sin(w)};
}

// Diffractive weights in the stable forms cosh s - cos φ = 2sinh²(s/2) + b², e^{-s} - cos φ = expm1(-s) + b².
double piece_weight(DiffractivePiece piece, double alpha, const AngleData& ad, double s) {
    switch (piece) {
        case DiffractivePiece::exponential:
            return std::exp(-std::abs(alpha) * s);
        case DiffractivePiece::sinh_part: {
            if (s > 600.0) {
                const double sg = alpha > 0 ? 1.0 : (alpha < 0 ? -1.0 : 0.0);
                return -(1.0 - ad.b2) * sg * std::exp((std::abs(alpha) - 1.0) * s);
            }
            const double h = std::sinh(0.5 * s);
            const double den = 2.0 * h * h + ad.b2;
            if (den == 0.0) return -2.0 * alpha;
            return (std::expm1(-s) + ad.b2) * std::sinh(alpha * s) / den;
        }
        case DiffractivePiece::cosh_part: {
            if (s > 600.0) return ad.sphi * std::exp((std::abs(alpha) - 1.0) * s);
            const double h = std::sinh(0.5 * s);
            const double den = 2.0 * h * h + ad.b2;
            if (den == 0.0) return 0.0;
            return ad.sphi * std::cosh(alpha * s) / den;
        }
        case DiffractivePiece::cosh_model: {
            const double den = 0.5 * s * s + ad.b2;
            if (den == 0.0) return 0.0;
            return ad.sphi / den;
        }
    }
    return 0.0;
}

}  // namespace

double BoundCheckReport::refinement_change() const {
    if (!std::isfinite(refined_max_ratio) || !(max_ratio > 0.0)) return kNaN;
    return std::abs(refined_max_ratio / max_ratio - 1.0);
}

// ---------------------------------------------------------------------------------------------
// Building blocks

cplx amplitude_a(double r) { return split_ab(r).a_part; }

double window(double theta, double eps) {
    static const Cutoff chi;
    return chi(0.5 + 0.25 * (std::abs(theta - kPi) - eps) / eps);
}

cplx direct_dyadic_kernel(int j, double r1, double r2, double r2p, double theta2, double theta2p, double eps,
                          double tol, bool* converged) {
    if (!(r1 > 0 && r2 > 0 && r2p > 0)) throw std::invalid_argument("direct_dyadic_kernel: radii must be positive");
    const double lam = std::ldexp(1.0, j);
    const double lo = std::max(theta2, theta2p) + kPi - 2.0 * eps;
    const double hi = std::min(theta2, theta2p) + kPi;
    if (converged) *converged = true;
    if (!(hi > lo)) return 0.0;

    struct D {
        double d, d1, d2;
    };
    auto geom = [](double ra, double rb, double t) {
        const double d = distance(ra, rb, t);
        const double d1 = ra * rb * std::sin(t) / d;
        return D{d, d1, (ra * rb * std::cos(t) - d1 * d1) / d};
    };
    OscillatoryProblem p;
    p.phase = [&](double t) { return distance(r1, r2, t - theta2) - distance(r1, r2p, t - theta2p); };
    p.dphase = [&](double t) { return geom(r1, r2, t - theta2).d1 - geom(r1, r2p, t - theta2p).d1; };
    p.d2phase = [&](double t) { return geom(r1, r2, t - theta2).d2 - geom(r1, r2p, t - theta2p).d2; };
    p.amplitude = [&](double t) -> cplx {
        const double dy = distance(r1, r2, t - theta2), dz = distance(r1, r2p, t - theta2p);
        const double by = beta(dy), bz = beta(dz);
        const double e = window(t - theta2, eps) * window(t - theta2p, eps);
        if (by == 0.0 || bz == 0.0 || e == 0.0) return 0.0;
        return by * bz * e / (lam * std::sqrt(dy * dz)) * amplitude_a(lam * dy) * std::conj(amplitude_a(lam * dz));
    };
    p.lambda = lam;
    p.a = lo;
    p.b = hi;
    const auto r = integrate(p, tol / lam);
    if (converged) *converged = r.converged;
    return r.value;
}

double direct_dyadic_envelope(int j, double r1, double r2, double r2p) {
    const double lam = std::ldexp(1.0, j);
    const double dr = std::abs(r2 - r2p);
    if (dr == 0.0) return kInf;
    return 1.0 / (lam * std::sqrt(lam * dr) * r1);
}

cplx multiplier_integral(int j, double r1, double r2, double zeta, double eps, double tol, bool printed_scaling,
                         bool* converged) {
    if (!(r1 > 0 && r2 > 0)) throw std::invalid_argument("multiplier_integral: radii must be positive");
    const double lam = std::ldexp(1.0, j);
    const double amp_scale = printed_scaling ? std::sqrt(lam) : lam;
    OscillatoryProblem p;
    p.phase = [&](double t) { return distance(r1, r2, t) + zeta * t / lam; };
    p.dphase = [&](double t) { return r1 * r2 * std::sin(t) / distance(r1, r2, t) + zeta / lam; };
    p.d2phase = [&](double t) {
        const double d = distance(r1, r2, t), d1 = r1 * r2 * std::sin(t) / d;
        return (r1 * r2 * std::cos(t) - d1 * d1) / d;
    };
    p.amplitude = [&](double t) -> cplx {
        const double d = distance(r1, r2, t);
        const double b = beta(d), e = window(t, eps);
        if (b == 0.0 || e == 0.0) return 0.0;
        return b * e / std::sqrt(amp_scale * d) * amplitude_a(lam * d);
    };
    p.lambda = lam;
    p.a = kPi - 2.0 * eps;
    p.b = kPi;
    const auto r = integrate(p, tol / std::sqrt(lam));
    if (converged) *converged = r.converged;
    return r.value;
}

double multiplier_envelope(int j, double r1, double r2) {
    const double lam = std::ldexp(1.0, j);
    return 1.0 / (std::sqrt(lam) * std::sqrt(lam * r1 * r2));
}

cplx diffractive_piece_integral(DiffractivePiece piece, double alpha, double r1, double r2, double phi, double lambda,
                                double tol, bool* converged) {
    if (!(r1 > 0 && r2 > 0)) throw std::invalid_argument("diffractive_piece_integral: radii must be positive");
    if (!(lambda > 0)) throw std::invalid_argument("diffractive_piece_integral: lambda must be positive");
    const AngleData ad = angle_data(phi);
    const double t = r1 + r2;
    const bool model = piece == DiffractivePiece::cosh_model;
    const cplx model_amp = model ? amplitude_a(lambda * t) / std::sqrt(t) : cplx(0.0);
    auto radial = [&](double u) { return model ? model_amp : amplitude_a(lambda * u) / std::sqrt(u); };

    // Hand over to the u = |n| tail once λ(|n| - t) has accumulated a few oscillations.
    const double du_target = (t + 50.0 / lambda) * (t + 50.0 / lambda) - t * t;
    const double s_switch = std::max(1.0, 2.0 * std::asinh(std::sqrt(du_target / (4.0 * r1 * r2))));
    quad::AdaptiveOptions qo;
    qo.abs_tol = 0.5 * tol;
    qo.rel_tol = 0.0;
    qo.max_panels = 4000;
    auto cuts = geometric_cuts(std::sqrt(ad.b2), 0.0, s_switch);
    if (ad.b2 < 1.0 && ad.b2 > 0.0) {
        const double s0 = -std::log1p(-ad.b2);  // sign change of e^{-s} - cos φ
        if (s0 < s_switch) cuts.push_back(s0);
    }
    for (double c = 1.0; c < s_switch; c *= 2.0) cuts.push_back(c);
    const auto near = quad::adaptive(
        [&](double s) {
            const double u = diffractive_norm(r1, r2, s);
            return std::polar(1.0, lambda * u) * radial(u) * piece_weight(piece, alpha, ad, s);
        },
        0.0, s_switch, qo, cuts);

    const double u0 = diffractive_norm(r1, r2, s_switch);
    auto g = [&](double u) -> cplx {
        const double c = ((u - t) * (u + t)) / (2.0 * r1 * r2) + 1.0;  // cosh s
        const double s = std::acosh(c);
        const double sh = std::sqrt((c - 1.0) * (c + 1.0));
        return radial(u) * piece_weight(piece, alpha, ad, s) * (u / (r1 * r2 * sh));
    };
    const auto far = detail::far_integral(g, u0, cplx(lambda, 0.0), 0.5 * tol);
    if (converged) *converged = near.converged && far.converged;
    return near.value + far.value;
}

cplx morse_model_term(int j, double r1, double r2, double phi, double tol) {
    if (!(r1 > 0 && r2 > 0)) throw std::invalid_argument("morse_model_term: radii must be positive");
    const AngleData ad = angle_data(phi);
    if (ad.sphi == 0.0) return 0.0;
    const double lam = std::ldexp(1.0, j), t = r1 + r2, mu = lam * r1 * r2;
    // s = e^{iπ/4}x: e^{iμs²} = e^{-μx²} and s²/2 + b² = ix²/2 + b², which has no zero on the sector swept.
    const double X = std::sqrt(46.0 / mu);
    auto cuts = geometric_cuts(std::sqrt(ad.b2), 0.0, X);
    for (double c : geometric_cuts(1.0 / std::sqrt(mu), 0.0, X)) cuts.push_back(c);
    quad::AdaptiveOptions qo;
    qo.abs_tol = 0.0;
    qo.rel_tol = tol;
    qo.max_panels = 4000;
    const auto r = quad::adaptive(
        [&](double x) { return std::exp(-mu * x * x) / cplx(ad.b2, 0.5 * x * x); }, 0.0, X, qo, cuts);
    const cplx integral = std::polar(1.0, 0.25 * kPi) * r.value;
    const cplx psi_amp = amplitude_a(lam * t) / std::sqrt(t) * ad.sphi;
    return beta(t) * std::sqrt(t) / std::sqrt(lam) * psi_amp * integral;
}

double diffractive_envelope(int j, double r1, double r2) {
    const double lam = std::ldexp(1.0, j);
    return 1.0 / (std::sqrt(lam) * std::sqrt(1.0 + lam * r1 * r2));
}

// ---------------------------------------------------------------------------------------------
// Dyadic sweeps

BoundCheckReport check_direct_dyadic(const SweepOptions& opt) {
    const auto js = j_range(opt);
    const long n = opt.samples;
    std::vector<Sample> samples(n);
    Rng rng(opt.seed, 1);
    struct In {
        int j;
        double r1, r2, r2p, th2p;
    };
    std::vector<In> in(n);
    for (long k = 0; k < n; ++k) {
        const int j = js[k % js.size()];
        In s{j, 0, 0, 0, 0};
        for (int tries = 0; tries < 1000; ++tries) {
            const double t = rng.uniform(0.8, 2.6);
            std::tie(s.r1, s.r2) = split_radii(rng, t, 6.0);
            const double dr = rng.sign() * std::ldexp(rng.uniform(1.0, 2.0), -j) * std::exp2(rng.uniform(-3.0, j + 1.0));
            s.r2p = s.r2 + dr;
            if (s.r2p > 0.0 && s.r1 + s.r2p > 0.76 && s.r1 + s.r2p < 2.65) break;
        }
        s.th2p = rng.uniform(0.0, 1.0) < 0.125 ? 0.0 : rng.sign() * opt.eps * std::exp2(-rng.uniform(0.0, 10.0));
        in[k] = s;
    }
    parallel_for(static_cast<int>(n), opt.threads, [&](int b, int e) {
        for (int k = b; k < e; ++k) {
            const auto& s = in[k];
            Sample out;
            out.j = s.j;
            // Proof-case label: angular separation against radial separation.
            const bool angular = s.r1 * s.r2p * std::abs(s.th2p) >= s.r1 * s.r1 * std::abs(s.r2 - s.r2p) / opt.eps;
            out.params = {{"r1", s.r1}, {"r2", s.r2}, {"r2p", s.r2p}, {"theta2", 0.0}, {"theta2p", s.th2p},
                          {"case", angular ? 2.0 : 1.0}};
            const double env = direct_dyadic_envelope(s.j, s.r1, s.r2, s.r2p);
            if (!std::isfinite(env)) {
                out.status = 1;
            } else {
                bool ok = true;
                const cplx v = direct_dyadic_kernel(s.j, s.r1, s.r2, s.r2p, 0.0, s.th2p, opt.eps, opt.tol, &ok);
                out.status = ok ? 0 : 2;
                out.ratio = std::abs(v) / env;
            }
            samples[k] = std::move(out);
        }
    });
    auto rep = finalize_sweep("direct_dyadic_kernel", samples, js, opt.flat_tolerance);
    // The worst sample continued past the sweep: the ratio levels off once the window holds the stationary point.
    if (!rep.worst.empty()) {
        const auto& w = rep.worst.front().params;
        const double r1 = w[0].second, r2 = w[1].second, r2p = w[2].second, th2p = w[4].second;
        for (int dj : {2, 4, 6}) {
            const int j = opt.j_max + dj;
            const double v = std::abs(direct_dyadic_kernel(j, r1, r2, r2p, 0.0, th2p, opt.eps, opt.tol));
            rep.extras.push_back({"worst_sample_ratio_j" + std::to_string(j), v / direct_dyadic_envelope(j, r1, r2, r2p)});
        }
    }
    return rep;
}

BoundCheckReport check_multiplier_bound(const SweepOptions& opt, bool printed_scaling) {
    const auto js = j_range(opt);
    const long n = opt.samples;
    Rng rng(opt.seed, 2);
    struct In {
        int j;
        double r1, r2, zeta;
    };
    std::vector<In> in(n);
    for (long k = 0; k < n; ++k) {
        const int j = js[k % js.size()];
        const double lam = std::ldexp(1.0, j);
        In s{j, 0, 0, 0};
        std::tie(s.r1, s.r2) = split_radii(rng, rng.uniform(0.8, 2.6), j + 3.0);
        // Most frequencies near the stationary band ζ ≈ -2^j ∂_θ d, the rest across |ζ| ≤ 2^j.
        const int band = static_cast<int>(std::ceil(0.12 * lam)) + 2;
        s.zeta = rng.uniform(0.0, 1.0) < 0.75 ? rng.integer(-band, 2) : rng.integer(-int(lam), int(lam));
        in[k] = s;
    }
    std::vector<Sample> samples(n);
    parallel_for(static_cast<int>(n), opt.threads, [&](int b, int e) {
        for (int k = b; k < e; ++k) {
            const auto& s = in[k];
            Sample out;
            out.j = s.j;
            out.params = {{"r1", s.r1}, {"r2", s.r2}, {"zeta", s.zeta}};
            bool ok = true;
            const cplx v = multiplier_integral(s.j, s.r1, s.r2, s.zeta, opt.eps, opt.tol, printed_scaling, &ok);
            out.status = ok ? 0 : 2;
            out.ratio = std::abs(v) / multiplier_envelope(s.j, s.r1, s.r2);
            samples[k] = std::move(out);
        }
    });
    auto rep = finalize_sweep(printed_scaling ? "angular_multiplier_printed_scaling" : "angular_multiplier", samples,
                              js, opt.flat_tolerance);

    if (!rep.worst.empty()) {
        const auto& w = rep.worst.front();
        const double r1 = w.params[0].second, r2 = w.params[1].second, zeta = w.params[2].second;
        for (int dj : {2, 4, 6}) {
            const int j = opt.j_max + dj;
            const double z = std::round(std::ldexp(zeta, j - w.j));
            const double v = std::abs(multiplier_integral(j, r1, r2, z, opt.eps, opt.tol, printed_scaling));
            rep.extras.push_back({"worst_sample_ratio_j" + std::to_string(j), v / multiplier_envelope(j, r1, r2)});
        }
    }

    // ζ = 0 slice: the same integral through van_der_corput_check with the amplitude frozen at j = 5.
    const int j0 = 5;
    const double r1 = 0.5, r2 = 0.7, lam0 = std::ldexp(1.0, j0);
    OscillatoryProblem p;
    p.phase = [&](double t) { return distance(r1, r2, t); };
    p.amplitude = [&](double t) -> cplx {
        const double d = distance(r1, r2, t);
        const double amp_scale = printed_scaling ? std::sqrt(lam0) : lam0;
        return beta(d) * window(t, opt.eps) / std::sqrt(amp_scale * d) * amplitude_a(lam0 * d);
    };
    p.a = kPi - 2.0 * opt.eps;
    p.b = kPi;
    const auto vdc = van_der_corput_check(p, 2, 3, 12, 1e-13);
    double slice_value = 0.0;
    for (std::size_t k = 0; k < vdc.lambdas.size(); ++k)
        if (vdc.lambdas[k] == lam0)
            slice_value = vdc.ratios[k] * std::pow(lam0 * vdc.derivative_floor, -0.5) * vdc.amplitude_variation;
    const double direct = std::abs(multiplier_integral(j0, r1, r2, 0.0, opt.eps, 1e-13, printed_scaling));
    rep.extras.push_back({"zeta0_vdc_max_ratio", vdc.max_ratio});
    rep.extras.push_back({"zeta0_vdc_drift", vdc.drift});
    rep.extras.push_back({"zeta0_cross_check_rel", std::abs(slice_value - direct) / direct});
    return rep;
}

std::vector<BoundCheckReport> check_diffractive_dyadic(int ell, const SweepOptions& opt) {
    if (ell < 1 || ell > 3) throw std::invalid_argument("check_diffractive_dyadic: ell must be 1, 2 or 3");
    const auto js = j_range(opt);
    const long n = opt.samples;
    Rng rng(opt.seed, 3);
    struct In {
        int j;
        double r1, r2, alpha, phi;
    };
    std::vector<In> in(n);
    for (long k = 0; k < n; ++k) {
        In s{js[k % js.size()], 0, 0, 0, 0};
        std::tie(s.r1, s.r2) = split_radii(rng, rng.uniform(0.8, 2.6), s.j + 4.0);
        s.alpha = flux_sample(rng);
        s.phi = angle_sample(rng);
        in[k] = s;
    }
    const int parts = ell == 1 ? 1 : (ell == 2 ? 2 : 3);
    std::vector<std::vector<Sample>> out(parts, std::vector<Sample>(n));
    parallel_for(static_cast<int>(n), opt.threads, [&](int b, int e) {
        for (int k = b; k < e; ++k) {
            const auto& s = in[k];
            const double lam = std::ldexp(1.0, s.j), t = s.r1 + s.r2;
            const double pref = beta(t) / std::sqrt(lam);
            const double env = diffractive_envelope(s.j, s.r1, s.r2);
            const std::vector<std::pair<std::string, double>> params{
                {"r1", s.r1}, {"r2", s.r2}, {"alpha", s.alpha}, {"phi", s.phi}};
            auto piece = [&](DiffractivePiece pc, bool& ok) {
                bool c = true;
                const cplx v = diffractive_piece_integral(pc, s.alpha, s.r1, s.r2, s.phi, lam, opt.tol, &c);
                ok = ok && c;
                return pref * v;
            };
            bool ok = true;
            std::vector<double> ratios;
            if (ell == 1) {
                ratios.push_back(std::abs(piece(DiffractivePiece::exponential, ok)) / env);
            } else if (ell == 2) {
                const double k1 = std::abs(piece(DiffractivePiece::exponential, ok));
                const double k2 = std::abs(piece(DiffractivePiece::sinh_part, ok));
                ratios.push_back(k2 / env);
                ratios.push_back((k1 + k2) / env);
            } else {
                const cplx k3 = piece(DiffractivePiece::cosh_part, ok);
                const cplx km = piece(DiffractivePiece::cosh_model, ok);
                const cplx h = morse_model_term(s.j, s.r1, s.r2, s.phi);
                ratios.push_back(std::abs(k3 - km) / env);
                ratios.push_back(std::abs(std::polar(1.0, -lam * t) * km - h) / env);
                ratios.push_back(std::abs(h) / env);
            }
            for (int p = 0; p < parts; ++p) {
                Sample smp;
                smp.j = s.j;
                smp.params = params;
                smp.status = ok ? 0 : 2;
                smp.ratio = ratios[p];
                out[p][k] = std::move(smp);
            }
        }
    });
    std::vector<std::string> ids;
    if (ell == 1) ids = {"diffractive_exponential_piece"};
    if (ell == 2) ids = {"diffractive_sinh_piece", "diffractive_exponential_plus_sinh"};
    if (ell == 3) ids = {"diffractive_cosh_error_part", "diffractive_cosh_model_comparison", "diffractive_cosh_model_term"};
    std::vector<BoundCheckReport> reps;
    for (int p = 0; p < parts; ++p) reps.push_back(finalize_sweep(ids[p], out[p], js, opt.flat_tolerance));
    return reps;
}

BoundCheckReport check_phase_derivatives(long samples, std::uint64_t seed) {
    Rng rng(seed, 4);
    BoundCheckReport rep;
    rep.claim_id = "diffractive_phase_derivative_floor";
    double cmin = kInf;
    for (long k = 0; k < samples; ++k) {
        const auto [r1, r2] = split_radii(rng, rng.uniform(0.8, 2.6), 12.0);
        const double t = r1 + r2, q = r1 * r2 / t;
        double local = kInf, worst_s = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const bool inner = i <= 100;
            const double s = inner ? i / 100.0 : 1.0 + (i - 100) * 0.19;
            const double ph = diffractive_norm(r1, r2, s);
            const double d1 = r1 * r2 * std::sinh(s) / ph;
            const double d2 = r1 * r2 * std::cosh(s) / ph - d1 * d1 / ph;
            const double v = (inner ? std::abs(d2) : d1) / q;
            if (v < local) {
                local = v;
                worst_s = s;
            }
            ++rep.points;
        }
        ++rep.sample_count;
        if (local < cmin) {
            cmin = local;
            rep.worst_point = {{"r1", r1}, {"r2", r2}, {"s", worst_s}};
        }
    }
    rep.max_ratio = 1.0 / cmin;
    rep.extras.push_back({"c", cmin});
    rep.pass = cmin > 0.0 && std::isfinite(cmin);
    return rep;
}

// ---------------------------------------------------------------------------------------------
// Schur-type scaling

std::vector<double> envelope_norm_power(double q, const std::vector<double>& radii) {
    std::vector<double> out;
    quad::AdaptiveOptions qo;
    qo.rel_tol = 1e-12;
    qo.abs_tol = 0.0;
    for (double R : radii) {
        if (!(R > 0)) throw std::invalid_argument("envelope_norm_power: radii must be positive");
        // In x = log(1 + r) the integrand 2π r (1+r)^{-q/2} dr is smooth and bounded.
        auto f = [q](double x) {
            const double r = std::expm1(x);
            return cplx(2.0 * kPi * r * std::exp(x * (1.0 - 0.5 * q)), 0.0);
        };
        std::vector<double> cuts;
        for (double c = 1.0; c < std::log1p(R); c += 1.0) cuts.push_back(c);
        out.push_back(quad::adaptive(f, 0.0, std::log1p(R), qo, cuts).value.real());
    }
    return out;
}

BoundCheckReport check_schur_bound(double p, double q, const SchurOptions& opt) {
    const bool sup_case = p == 1.0 && std::isinf(q);
    const double pp = p > 1.0 ? p / (p - 1.0) : kInf;
    if (!sup_case && !(q > 4.0 && q >= pp * (1.0 - 1e-12)))
        throw std::invalid_argument("check_schur_bound: need q > 4 and q >= p' (or p = 1, q = inf)");
    GridSpec g;
    g.r_min = opt.r_min;
    g.r_max = opt.r_max;
    g.n_r = opt.n_r;
    g.n_theta = opt.n_theta;
    g.validate();
    const auto r = g.radii();
    const auto w = g.radial_weights();
    const auto probes = default_probes(g);
    const int nt = g.n_theta;

    BoundCheckReport rep;
    rep.claim_id = sup_case ? "schur_envelope_sup" : "schur_envelope_scaling";
    if (!sup_case && std::abs(q - pp) <= 1e-12 * q)
        rep.note = "q = p': the small-radius factor diverges logarithmically as r_min -> 0; the j-slope is unaffected";
    double sup_violation = 0.0;
    for (int j = opt.j_min; j <= opt.j_max; ++j) {
        const double lam = std::ldexp(1.0, j);
        double best = 0.0;
        std::string best_id;
        for (const auto& pr : probes) {
            std::vector<cplx> col(g.n_r, 0.0);
            for (int i = 0; i < g.n_r; ++i) {
                cplx s = 0.0;
                for (int a = 0; a < nt; ++a) s += pr.values[i * nt + a];
                col[i] = w[i] * s;
            }
            std::vector<cplx> tf(g.size(), 0.0);
            for (int k = 0; k < g.n_r; ++k) {
                cplx acc = 0.0;
                for (int i = 0; i < g.n_r; ++i)
                    acc += std::pow(1.0 + lam * r[k] * r[i], -0.5) * beta(r[k] + r[i]) * col[i];
                acc /= std::sqrt(lam);
                for (int a = 0; a < nt; ++a) tf[k * nt + a] = acc;
            }
            const double num = discrete_norm(g, tf, q), den = discrete_norm(g, pr.values, p);
            if (!(den > 0.0)) continue;
            const double ratio = num / den;
            rep.points += static_cast<long>(g.n_r) * g.n_r;
            if (ratio > best) {
                best = ratio;
                best_id = pr.id;
            }
        }
        rep.js.push_back(j);
        rep.max_ratio_by_j.push_back(best);
        if (sup_case) sup_violation = std::max(sup_violation, best * std::sqrt(lam));
        ++rep.sample_count;
        if (best > rep.max_ratio) {
            rep.max_ratio = best;
            rep.worst_point = {{"j", double(j)}};
        }
        rep.extras.push_back({"best_probe_j" + std::to_string(j) + "_" + best_id, best});
    }
    std::vector<double> x(rep.js.begin(), rep.js.end()), y;
    for (double m : rep.max_ratio_by_j) y.push_back(std::log2(m));
    rep.slope = fit_slope(x, y);
    rep.slope_target = -(0.5 + (sup_case ? 0.0 : 2.0 / q));
    rep.slope_tolerance = opt.slope_rel_tolerance * std::abs(rep.slope_target);
    rep.pass = std::abs(rep.slope - rep.slope_target) <= rep.slope_tolerance;
    if (sup_case) {
        // ‖Tf‖_∞ ≤ sup|K|·‖f‖_1 with sup|K| ≤ 2^{-j/2}.
        rep.extras.push_back({"sup_bound_ratio", sup_violation});
        rep.pass = rep.pass && sup_violation <= 1.0 + 1e-12;
    }
    return rep;
}

// ---------------------------------------------------------------------------------------------
// Appendix inequalities

double appendix_expression(double s, double b, double alpha, int k) {
    if (!(s > 0.0)) throw std::invalid_argument("appendix_expression: s must be positive");
    if (k != 0 && k != 1) throw std::invalid_argument("appendix_expression: k must be 0 or 1");
    const double b2 = b * b;
    const double h = std::sinh(0.5 * s);
    const double N = std::expm1(-s) + b2, D = 2.0 * h * h + b2, Q = 0.5 * s * s + b2;
    const double sh = std::sinh(alpha * s), ch = std::cosh(alpha * s);
    const double M = (b2 - s) * alpha * s;
    if (k == 0) return N * sh / D - M / Q;
    // N' = -e^{-s}, D' = sinh s, Q' = s, M' = α(b² - 2s).
    const double first = (-std::exp(-s) * sh + N * alpha * ch) / D - N * sh * std::sinh(s) / (D * D);
    const double second = alpha * (b2 - 2.0 * s) / Q - M * s / (Q * Q);
    return first - second;
}

double appendix_expression_b0(double s, double alpha, int k) {
    if (!(s > 0.0)) throw std::invalid_argument("appendix_expression_b0: s must be positive");
    const double h = std::sinh(0.5 * s);
    const double c1 = 2.0 * h * h;  // cosh s - 1
    const double e1 = std::expm1(-s);
    if (k == 0) return e1 * std::sinh(alpha * s) / c1 + 2.0 * alpha;
    const double num =
        (-std::exp(-s) * std::sinh(alpha * s) + e1 * alpha * std::cosh(alpha * s)) * c1 - e1 * std::sinh(alpha * s) * std::sinh(s);
    return num / (c1 * c1);
}

double appendix_integral(int inequality, AppendixForm form, double b_or_phi, double alpha, int j, double r1,
                         double r2, double tol, long* evaluations) {
    if (inequality != 2 && inequality != 3) throw std::invalid_argument("appendix_integral: inequality must be 2 or 3");
    if (!(r1 > 0 && r2 > 0)) throw std::invalid_argument("appendix_integral: radii must be positive");
    double b2, c;
    if (form == AppendixForm::reduced) {
        b2 = b_or_phi * b_or_phi;
        c = b_or_phi;
    } else {
        const auto ad = angle_data(b_or_phi);
        b2 = ad.b2;
        c = ad.sphi;
    }
    if (c == 0.0) return 0.0;
    const double lam = std::ldexp(1.0, j), t = r1 + r2, rr = r1 * r2;
    const double nfac = form == AppendixForm::reduced ? 2.0 : 4.0;  // |n|² = t² + nfac·r₁r₂ sinh²(s/2)
    const cplx a0 = amplitude_a(lam * t) / std::sqrt(t);
    long evals = 0;
    auto f = [&](double s) -> cplx {
        ++evals;
        const double h = std::sinh(0.5 * s);
        const double u = std::sqrt(t * t + nfac * rr * h * h);
        const double du = 0.25 * nfac * rr * std::sinh(s) / u;
        const cplx av = amplitude_a(lam * u), ad = split_a_derivative(lam * u);
        const cplx A = av / std::sqrt(u);
        const cplx dA = du * (-0.5 * av / (u * std::sqrt(u)) + lam * ad / std::sqrt(u));
        const double D = 2.0 * h * h + b2, Q = 0.5 * s * s + b2;
        if (inequality == 2) {
            const double ch = std::cosh(alpha * s);
            const double W = c * (ch / D - 1.0 / Q);
            const double dW = c * (alpha * std::sinh(alpha * s) / D - ch * std::sinh(s) / (D * D) + s / (Q * Q));
            return std::abs(dA * W + A * dW);
        }
        const double W = c / Q, dW = -c * s / (Q * Q);
        return std::abs(dA * W + (A - a0) * dW);
    };
    quad::AdaptiveOptions qo;
    qo.rel_tol = tol;
    qo.abs_tol = 1e-12;
    qo.max_panels = 4000;
    const auto r = quad::adaptive(f, 0.0, 1.0, qo, geometric_cuts(std::sqrt(b2), 0.0, 1.0));
    if (evaluations) *evaluations += evals;
    return r.value.real();
}

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? hi : lo * std::pow(hi / lo, double(i) / (n - 1));
    return v;
}

std::vector<double> lin_grid(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
    return v;
}

struct GridMax {
    double value = 0.0;
    long points = 0;
    std::vector<std::pair<std::string, double>> where;
    std::vector<std::pair<std::string, double>> extras;
};

GridMax appendix_one(AppendixForm form, int n_s, int n_b, int n_alpha) {
    const auto ss = log_grid(1e-6, 1.0, n_s);
    std::vector<double> bs{0.0};
    // Angular form: b = √2 sin(φ/2) over φ ∈ (0, π], clustered at φ → 0.
    for (double v : log_grid(1e-6, form == AppendixForm::reduced ? 2.0 : kPi, n_b - 1))
        bs.push_back(form == AppendixForm::reduced ? v : std::sqrt(2.0) * std::sin(0.5 * v));
    const auto as = lin_grid(-1.0, 1.0, n_alpha);
    GridMax out;
    double m0 = 0.0, m1 = 0.0;
    for (double b : bs)
        for (double al : as)
            for (double s : ss) {
                const double e0 = std::abs(appendix_expression(s, b, al, 0));
                const double e1 = std::abs(appendix_expression(s, b, al, 1));
                out.points += 2;
                if (e0 > m0) m0 = e0;
                if (e1 > m1) {
                    m1 = e1;
                    out.where = {{"s", s}, {"b", b}, {"alpha", al}, {"k", 1.0}};
                }
            }
    out.value = std::max(m0, m1);
    out.extras = {{"max_k0", m0}, {"max_k1", m1}};
    return out;
}

GridMax appendix_integrals(int inequality, AppendixForm form, int n_b, int n_alpha, int n_split, double tol,
                           int threads) {
    const bool reduced = form == AppendixForm::reduced;
    const auto bs = log_grid(1e-4, reduced ? 2.0 : kPi, n_b);
    const auto as = inequality == 2 ? lin_grid(-1.0, 1.0, n_alpha) : std::vector<double>{0.0};
    const auto xs = log_grid(1e-3, 0.5, n_split);
    const double ts[] = {0.8, 1.3, 2.2};
    struct P {
        double b, al, t, x;
        int j;
    };
    std::vector<P> pts;
    for (double b : bs)
        for (double al : as)
            for (int j = 1; j <= 8; ++j)
                for (double t : ts)
                    for (double x : xs) pts.push_back({b, al, t, x, j});
    std::vector<double> vals(pts.size());
    std::vector<long> evals(pts.size(), 0);
    parallel_for(static_cast<int>(pts.size()), threads, [&](int lo, int hi) {
        for (int k = lo; k < hi; ++k) {
            const auto& p = pts[k];
            vals[k] = appendix_integral(inequality, form, p.b, p.al, p.j, p.t * p.x, p.t * (1.0 - p.x), tol, &evals[k]);
        }
    });
    GridMax out;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        out.points += evals[k];
        if (vals[k] > out.value) {
            out.value = vals[k];
            const auto& p = pts[k];
            out.where = {{reduced ? "b" : "phi", p.b}, {"alpha", p.al}, {"j", double(p.j)},
                         {"r1", p.t * p.x},       {"r2", p.t * (1.0 - p.x)}};
        }
    }
    return out;
}

}  // namespace

BoundCheckReport check_appendix(int inequality, AppendixForm form, const AppendixGrid& grid) {
    if (inequality < 1 || inequality > 3) throw std::invalid_argument("check_appendix: inequality must be 1, 2 or 3");
    BoundCheckReport rep;
    rep.claim_id = std::string(form == AppendixForm::reduced ? "appendix_reduced_" : "appendix_angular_") +
                   std::to_string(inequality);
    GridMax base, fine;
    if (inequality == 1) {
        base = appendix_one(form, grid.n_s, grid.n_b, grid.n_alpha);
        fine = appendix_one(form, 2 * grid.n_s - 1, 2 * grid.n_b - 1, 2 * grid.n_alpha - 1);
    } else {
        base = appendix_integrals(inequality, form, grid.n_b_int, grid.n_alpha_int, grid.n_split, grid.tol, grid.threads);
        fine = appendix_integrals(inequality, form, 2 * grid.n_b_int - 1, 2 * grid.n_alpha_int - 1, 2 * grid.n_split - 1,
                                  grid.tol, grid.threads);
    }
    rep.max_ratio = base.value;
    rep.worst_point = base.where;
    rep.points = base.points;
    rep.sample_count = base.points;
    rep.extras = base.extras;
    rep.extras.push_back({"refined_points", double(fine.points)});
    finalize_grid(rep, fine.value);
    return rep;
}

// ---------------------------------------------------------------------------------------------
// Integrability facts

double bracket_fact_integral(int fact, double alpha, double phi, double tol) {
    if (fact < 1 || fact > 3) throw std::invalid_argument("bracket_fact_integral: fact must be 1, 2 or 3");
    if (alpha == 0.0 || !(std::abs(alpha) < 1.0))
        throw std::invalid_argument("bracket_fact_integral: alpha must lie in (-1, 1) without 0");
    const AngleData ad = angle_data(phi);
    const auto piece = fact == 1 ? DiffractivePiece::exponential
                                 : (fact == 2 ? DiffractivePiece::sinh_part : DiffractivePiece::cosh_part);
    const double rate = fact == 1 ? std::abs(alpha) : 1.0 - std::abs(alpha);
    const double S = std::min(600.0, 40.0 / rate);
    auto cuts = geometric_cuts(std::sqrt(ad.b2), 0.0, 1.0);
    for (double c = 1.0; c < S; c *= 2.0) cuts.push_back(c);
    if (ad.b2 > 0.0 && ad.b2 < 1.0) cuts.push_back(-std::log1p(-ad.b2));
    quad::AdaptiveOptions qo;
    qo.rel_tol = tol;
    qo.abs_tol = 1e-14;
    qo.max_panels = 4000;
    const auto r = quad::adaptive([&](double s) { return cplx(std::abs(piece_weight(piece, alpha, ad, s))); }, 0.0, S,
                                  qo, cuts);
    // Tail beyond S: the weight is below e^{-40} relative to its scale.
    return r.value.real();
}

namespace {

const double kFactAlphas[] = {-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9};

GridMax facts_grid(int fact, int n_theta) {
    GridMax out;
    double closed_err = 0.0;
    for (double al : kFactAlphas)
        for (int k = 0; k < n_theta; ++k) {
            const double theta = 2.0 * kPi * k / n_theta;
            const double v = bracket_fact_integral(fact, al, theta + kPi);
            ++out.points;
            if (fact == 1) closed_err = std::max(closed_err, std::abs(v - 1.0 / std::abs(al)) * std::abs(al));
            if (v > out.value) {
                out.value = v;
                out.where = {{"alpha", al}, {"theta_diff", theta}};
            }
        }
    if (fact == 1) out.extras.push_back({"closed_form_rel_error", closed_err});
    return out;
}

}  // namespace

BoundCheckReport check_B_facts(int fact, int n_theta) {
    if (n_theta < 4) throw std::invalid_argument("check_B_facts: n_theta must be at least 4");
    BoundCheckReport rep;
    const char* names[] = {"", "bracket_exponential_integral", "bracket_sinh_integral", "bracket_cosh_integral"};
    if (fact < 1 || fact > 3) throw std::invalid_argument("check_B_facts: fact must be 1, 2 or 3");
    rep.claim_id = names[fact];
    const auto base = facts_grid(fact, n_theta);
    const auto fine = facts_grid(fact, 2 * n_theta);
    rep.max_ratio = base.value;
    rep.worst_point = base.where;
    rep.sample_count = rep.points = base.points;
    rep.extras = base.extras;
    finalize_grid(rep, fine.value);
    return rep;
}

BoundCheckReport check_B_integrability(int n_theta) {
    if (n_theta < 4) throw std::invalid_argument("check_B_integrability: n_theta must be at least 4");
    auto run = [](int n, GridMax& out) {
        for (double al : {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9}) {
            const auto prof = CirculationProfile::constant(al);
            for (int k = 0; k < n; ++k) {
                const double theta = 2.0 * kPi * k / n;
                const AngleData ad = angle_data(theta + kPi);
                auto cuts = geometric_cuts(std::sqrt(ad.b2), 0.0, 1.0);
                for (double c = 1.0; c < 600.0; c *= 2.0) cuts.push_back(c);
                quad::AdaptiveOptions qo;
                qo.rel_tol = 1e-10;
                qo.abs_tol = 1e-16;
                qo.max_panels = 4000;
                const double S = std::min(600.0, 40.0 / std::min(std::abs(al), 1.0 - std::abs(al)));
                const double intB =
                    quad::adaptive([&](double s) { return cplx(std::abs(angular_B(prof, s, theta, 0.0))); }, 0.0, S,
                                   qo, cuts)
                        .value.real();
                const double v = std::abs(angular_A(prof, theta, 0.0)) + intB;
                ++out.points;
                if (v > out.value) {
                    out.value = v;
                    out.where = {{"alpha", al}, {"theta_diff", theta}};
                }
            }
        }
    };
    GridMax base, fine;
    run(n_theta, base);
    run(2 * n_theta, fine);
    BoundCheckReport rep;
    rep.claim_id = "angular_factor_integrability";
    rep.max_ratio = base.value;
    rep.worst_point = base.where;
    rep.sample_count = rep.points = base.points;
    finalize_grid(rep, fine.value);
    return rep;
}

BoundCheckReport check_near_diffractive_log(int n_t, int n_phi) {
    if (n_t < 2 || n_phi < 2) throw std::invalid_argument("check_near_diffractive_log: grids need at least 2 points");
    auto run = [](int nt, int nphi, GridMax& out, long& failed) {
        const double alphas[] = {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9};
        const double splits[] = {0.1, 0.3, 0.5};
        // Angles θ₁ - θ₂ uniform on the circle plus a cluster approaching the antipode.
        std::vector<double> diffs;
        for (int k = 0; k < nphi; ++k) diffs.push_back(2.0 * kPi * (k + 0.5) / nphi);
        for (double e : log_grid(1e-6, 1e-1, nphi / 2)) diffs.push_back(kPi + e);
        KernelOptions ko;
        ko.tol = 1e-10;
        for (double t : log_grid(1e-4, 0.74, nt))
            for (double x : splits)
                for (double al : alphas)
                    for (double th : diffs) {
                        const PolarPoint px{t * x, th}, py{t * (1.0 - x), 0.0};
                        const auto d = diffractive_terms(CirculationProfile::constant(al), px, py,
                                                         SpectralParameter::boundary(1.0, +1), ko);
                        if (!d.converged) ++failed;
                        const double v = std::abs(d.d2) / kPi / std::abs(std::log(t));
                        ++out.points;
                        if (v > out.value) {
                            out.value = v;
                            out.where = {{"r1", px.r}, {"r2", py.r}, {"theta_diff", th}, {"alpha", al}};
                        }
                    }
    };
    GridMax base, fine;
    long failed = 0, failed_fine = 0;
    run(n_t, n_phi, base, failed);
    run(2 * n_t, 2 * n_phi, fine, failed_fine);
    BoundCheckReport rep;
    rep.claim_id = "near_diffractive_log_envelope";
    rep.max_ratio = base.value;
    rep.worst_point = base.where;
    rep.sample_count = rep.points = base.points;
    rep.failed = failed + failed_fine;
    finalize_grid(rep, fine.value);
    rep.pass = rep.pass && rep.failed == 0;
    return rep;
}

BoundCheckReport check_lambda_integrals(int envelope_case, int n_r, int threads) {
    if (envelope_case != 1 && envelope_case != 2) throw std::invalid_argument("check_lambda_integrals: case must be 1 or 2");
    if (n_r < 2) throw std::invalid_argument("check_lambda_integrals: n_r must be at least 2");
    const double deltas[] = {-0.6, -0.2, 0.2, 0.6};
    auto run = [&](int n, GridMax& out) {
        struct P {
            double r, delta;
            int sign;
        };
        std::vector<P> pts;
        for (double r : log_grid(1e-4, 0.74, n))
            for (double d : deltas)
                for (int sg : {1, -1}) pts.push_back({r, d, sg});
        for (double r : log_grid(0.75, 50.0, n))
            for (double d : deltas)
                for (int sg : {1, -1}) pts.push_back({r, d, sg});
        std::vector<double> ratio(pts.size());
        parallel_for(static_cast<int>(pts.size()), threads, [&](int lo, int hi) {
            for (int k = lo; k < hi; ++k) {
                const auto& p = pts[k];
                const double re = (envelope_case == 1 ? -1.0 : 1.0) * std::sqrt(1.0 - p.delta * p.delta);
                const cplx v = amplitude_lambda_integral(cplx(re, p.delta), p.r, p.sign);
                ratio[k] = std::abs(v) / (p.r < 0.75 ? -std::log(p.r) : 1.0 / p.r);
            }
        });
        double small = 0.0, large = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            ++out.points;
            (pts[k].r < 0.75 ? small : large) = std::max(pts[k].r < 0.75 ? small : large, ratio[k]);
            if (ratio[k] > out.value) {
                out.value = ratio[k];
                out.where = {{"r", pts[k].r}, {"delta", pts[k].delta}, {"sign", double(pts[k].sign)}};
            }
        }
        out.extras = {{"max_ratio_log_range", small}, {"max_ratio_inverse_range", large}};
    };
    GridMax base, fine;
    run(n_r, base);
    run(2 * n_r, fine);
    BoundCheckReport rep;
    rep.claim_id = envelope_case == 1 ? "lambda_integral_negative_half_plane" : "lambda_integral_positive_half_plane";
    rep.max_ratio = base.value;
    rep.worst_point = base.where;
    rep.sample_count = rep.points = base.points;
    rep.extras = base.extras;
    finalize_grid(rep, fine.value);
    return rep;
}

}  // namespace abr::verify
