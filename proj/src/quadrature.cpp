#include "abr/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace abr::quad {

namespace {

template <int N>
Rule expand_boost_gauss() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& xa = G::abscissa();
    const auto& wa = G::weights();
    Rule r;
    for (std::size_t i = 0; i < xa.size(); ++i) {
        if (xa[i] == 0.0) {
            r.x.push_back(0.0);
            r.w.push_back(wa[i]);
        } else {
            r.x.push_back(xa[i]);
            r.w.push_back(wa[i]);
            r.x.push_back(-xa[i]);
            r.w.push_back(wa[i]);
        }
    }
    std::vector<std::size_t> idx(r.x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t p, std::size_t q) { return r.x[p] < r.x[q]; });
    Rule s;
    for (auto i : idx) {
        s.x.push_back(r.x[i]);
        s.w.push_back(r.w[i]);
    }
    return s;
}

struct Kronrod {
    std::vector<double> x, wk, wg;  // full symmetric 15-point layout, wg = 0 off the Gauss subset
};

const Kronrod& kronrod15() {
    static const Kronrod k = [] {
        using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
        using G7 = boost::math::quadrature::gauss<double, 7>;
        const auto& xa = GK::abscissa();
        const auto& wa = GK::weights();
        const auto& gx = G7::abscissa();
        const auto& gw = G7::weights();
        auto gauss_weight = [&](double x) {
            for (std::size_t i = 0; i < gx.size(); ++i)
                if (std::abs(gx[i] - x) < 1e-14) return gw[i];
            return 0.0;
        };
        Kronrod out;
        for (std::size_t i = 0; i < xa.size(); ++i) {
            out.x.push_back(xa[i]);
            out.wk.push_back(wa[i]);
            out.wg.push_back(gauss_weight(xa[i]));
            if (xa[i] != 0.0) {
                out.x.push_back(-xa[i]);
                out.wk.push_back(wa[i]);
                out.wg.push_back(gauss_weight(xa[i]));
            }
        }
        return out;
    }();
    return k;
}

struct Panel {
    double a, b;
    cplx value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk_panel(const std::function<cplx(double)>& f, double a, double b) {
    const auto& k = kronrod15();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx sk = 0.0, sg = 0.0;
    for (std::size_t i = 0; i < k.x.size(); ++i) {
        const cplx v = f(c + h * k.x[i]);
        sk += k.wk[i] * v;
        sg += k.wg[i] * v;
    }
    sk *= h;
    sg *= h;
    return {a, b, sk, std::abs(sk - sg)};
}

// P_k(t) for k < n at one point.
void legendre_all(int n, double t, double* p) {
    p[0] = 1.0;
    if (n > 1) p[1] = t;
    for (int k = 2; k < n; ++k) p[k] = ((2 * k - 1) * t * p[k - 1] - (k - 1) * p[k - 2]) / k;
}

}  // namespace

const Rule& gauss_legendre(int n) {
    static const Rule r8 = expand_boost_gauss<8>();
    static const Rule r16 = expand_boost_gauss<16>();
    static const Rule r24 = expand_boost_gauss<24>();
    static const Rule r32 = expand_boost_gauss<32>();
    switch (n) {
        case 8: return r8;
        case 16: return r16;
        case 24: return r24;
        case 32: return r32;
        default: throw std::invalid_argument("gauss_legendre: unsupported order");
    }
}

Result adaptive(const std::function<cplx(double)>& f, double a, double b, const AdaptiveOptions& opt,
                const std::vector<double>& breakpoints) {
    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Panel> heap;
    cplx total = 0.0;
    double err = 0.0;
    int evals = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Panel p = gk_panel(f, cuts[i], cuts[i + 1]);
        evals += 15;
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    int panels = static_cast<int>(heap.size());
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (panels >= opt.max_panels) {
            return {total, err, evals, false};
        }
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            return {total, err, evals, false};
        }
        Panel left = gk_panel(f, worst.a, mid);
        Panel right = gk_panel(f, mid, worst.b);
        evals += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    // Recompute the sum in a fixed order to avoid drift from incremental updates.
    cplx sum = 0.0;
    double esum = 0.0;
    std::vector<Panel> all;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& p, const Panel& q) { return p.a < q.a; });
    for (const auto& p : all) {
        sum += p.value;
        esum += p.error;
    }
    return {sum, esum, evals, true};
}

void spherical_bessel(int kmax, double x, double* out) {
    const double ax = std::abs(x);
    const double sign = x < 0 ? -1.0 : 1.0;
    if (ax < 1e-3) {
        // Series: j_k(x) = x^k/(2k+1)!! · (1 - x²/(2(2k+3)) + x⁴/(8(2k+3)(2k+5)) - ...)
        double lead = 1.0;
        for (int k = 0; k <= kmax; ++k) {
            if (k > 0) lead *= ax / (2 * k + 1);
            const double x2 = ax * ax;
            const double corr = 1.0 - x2 / (2.0 * (2 * k + 3)) + x2 * x2 / (8.0 * (2 * k + 3) * (2 * k + 5));
            out[k] = lead * corr;
        }
    } else if (ax > kmax + 1) {
        const double s = std::sin(ax), c = std::cos(ax);
        out[0] = s / ax;
        if (kmax >= 1) out[1] = s / (ax * ax) - c / ax;
        for (int k = 2; k <= kmax; ++k) out[k] = (2 * k - 1) / ax * out[k - 1] - out[k - 2];
    } else {
        // Miller backward recurrence, normalised against the closed form of j0 or j1.
        const int start = kmax + 30 + static_cast<int>(ax);
        std::vector<double> f(start + 2, 0.0);
        f[start + 1] = 0.0;
        f[start] = 1e-30;
        for (int k = start; k >= 1; --k) {
            f[k - 1] = (2 * k + 1) / ax * f[k] - f[k + 1];
            if (std::abs(f[k - 1]) > 1e200) {
                for (int m = k - 1; m <= start + 1; ++m) f[m] *= 1e-200;
            }
        }
        const double j0 = std::sin(ax) / ax;
        const double j1 = std::sin(ax) / (ax * ax) - std::cos(ax) / ax;
        const double scale = std::abs(j0) > std::abs(j1) ? j0 / f[0] : j1 / f[1];
        for (int k = 0; k <= kmax; ++k) out[k] = f[k] * scale;
    }
    if (sign < 0)
        for (int k = 1; k <= kmax; k += 2) out[k] = -out[k];
}

cplx FilonPanel::at_right() const {
    cplx s = 0.0;
    for (const auto& c : coeffs) s += c;  // P_k(1) = 1
    return s;
}

cplx FilonPanel::derivative_right(int order) const {
    const double h = 0.5 * (b - a);
    cplx s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const double kk = static_cast<double>(k);
        const double d = order == 1 ? kk * (kk + 1) / 2.0 : (kk - 1) * kk * (kk + 1) * (kk + 2) / 8.0;
        s += coeffs[k] * d;
    }
    return order == 1 ? s / h : s / (h * h);
}

FilonPanel filon_panel_samples(const cplx* samples, double a, double b, double omega) {
    constexpr int n = kFilonPoints;
    const Rule& rule = gauss_legendre(n);
    FilonPanel p;
    p.a = a;
    p.b = b;
    p.coeffs.assign(n, 0.0);
    double P[n];
    for (int i = 0; i < n; ++i) {
        legendre_all(n, rule.x[i], P);
        for (int k = 0; k < n; ++k) p.coeffs[k] += rule.w[i] * P[k] * samples[i];
    }
    for (int k = 0; k < n; ++k) p.coeffs[k] *= (2 * k + 1) / 2.0;

    const double h = 0.5 * (b - a);
    const double Om = omega * h;
    double j[n];
    spherical_bessel(n - 1, Om, j);
    // ∫_{-1}^{1} e^{iΩt} P_k(t) dt = 2 i^k j_k(Ω)
    static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    cplx s = 0.0;
    for (int k = 0; k < n; ++k) s += p.coeffs[k] * ipow[k % 4] * (2.0 * j[k]);
    p.value = h * s;
    p.error = 2.0 * h * (std::abs(p.coeffs[n - 1]) + std::abs(p.coeffs[n - 2]) + std::abs(p.coeffs[n - 3]));
    return p;
}

void filon_weights(double a, double b, double omega, cplx* weights) {
    constexpr int n = kFilonPoints;
    const Rule& rule = gauss_legendre(n);
    const double h = 0.5 * (b - a);
    double j[n];
    spherical_bessel(n - 1, omega * h, j);
    static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    cplx m[n];
    for (int k = 0; k < n; ++k) m[k] = ipow[k % 4] * (2.0 * j[k]) * ((2 * k + 1) / 2.0);
    double P[n];
    for (int i = 0; i < n; ++i) {
        legendre_all(n, rule.x[i], P);
        cplx s = 0.0;
        for (int k = 0; k < n; ++k) s += m[k] * P[k];
        weights[i] = h * rule.w[i] * s;
    }
}

FilonPanel filon_panel(const std::function<cplx(double)>& g, double a, double b, double omega) {
    constexpr int n = kFilonPoints;
    const Rule& rule = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx samples[n];
    for (int i = 0; i < n; ++i) samples[i] = g(c + h * rule.x[i]);
    return filon_panel_samples(samples, a, b, omega);
}

}  // namespace abr::quad
