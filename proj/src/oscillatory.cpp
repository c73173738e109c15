#include "abr/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace abr {

namespace {

struct PhaseEval {
    const OscillatoryProblem& p;
    bool fd = false;

    double d1(double x) const {
        if (p.dphase) return p.dphase(x);
        const double h = 1e-6 * std::max(1.0, std::abs(x));
        return (p.phase(x + h) - p.phase(x - h)) / (2 * h);
    }
    double d2(double x) const {
        if (p.d2phase) return p.d2phase(x);
        const double h = 1e-4 * std::max(1.0, std::abs(x));
        return (d1(x + h) - d1(x - h)) / (2 * h);
    }
};

struct Piece {
    double a, b;
    cplx value;
    double error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

// Filon panel against the phase linearised at the midpoint; the residual phase is folded into
// the amplitude so the rule stays exact for linear phases.
Piece panel(const OscillatoryProblem& p, const PhaseEval& ph, double a, double b, bool plain) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double phc = p.phase(c);
    const double slope = plain ? 0.0 : ph.d1(c);
    const auto& rule = quad::gauss_legendre(quad::kFilonPoints);
    cplx samples[quad::kFilonPoints];
    for (int i = 0; i < quad::kFilonPoints; ++i) {
        const double x = c + h * rule.x[i];
        const double resid = p.phase(x) - phc - slope * (x - c);
        samples[i] = p.amplitude(x) * std::polar(1.0, p.lambda * resid);
    }
    auto fp = quad::filon_panel_samples(samples, a, b, p.lambda * slope);
    return {a, b, std::polar(1.0, p.lambda * phc) * fp.value, fp.error};
}

OscillatoryResult integrate_finite(const OscillatoryProblem& p, double tol, const OscillatoryOptions& opt,
                                   const PhaseEval& ph) {
    std::vector<double> cuts{p.a, p.b};
    const double zone = 1.0 / std::sqrt(std::max(p.lambda, 1e-300));
    std::vector<std::pair<double, double>> slow;
    for (double x0 : stationary_points(p)) {
        const double lo = std::max(p.a, x0 - zone), hi = std::min(p.b, x0 + zone);
        cuts.push_back(lo);
        cuts.push_back(hi);
        slow.emplace_back(lo, hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto in_slow = [&](double a, double b) {
        for (auto [lo, hi] : slow)
            if (a >= lo && b <= hi) return true;
        return false;
    };

    std::priority_queue<Piece> heap;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        Piece pc = panel(p, ph, cuts[i], cuts[i + 1], in_slow(cuts[i], cuts[i + 1]));
        err += pc.error;
        heap.push(pc);
    }
    int panels = static_cast<int>(heap.size());
    bool ok = true;
    while (err > tol) {
        if (panels >= opt.max_panels) {
            ok = false;
            break;
        }
        Piece w = heap.top();
        heap.pop();
        const double mid = 0.5 * (w.a + w.b);
        if (!(mid > w.a && mid < w.b)) {
            heap.push(w);
            ok = false;
            break;
        }
        Piece l = panel(p, ph, w.a, mid, in_slow(w.a, mid));
        Piece r = panel(p, ph, mid, w.b, in_slow(mid, w.b));
        err += l.error + r.error - w.error;
        heap.push(l);
        heap.push(r);
        ++panels;
    }
    std::vector<Piece> all;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    OscillatoryResult res;
    for (const auto& pc : all) {
        res.value += pc.value;
        res.error += pc.error;
    }
    res.panels = panels;
    res.converged = ok;
    res.fd_derivatives = ph.fd;
    return res;
}

}  // namespace

std::vector<double> stationary_points(const OscillatoryProblem& p) {
    std::vector<double> out;
    if (!std::isfinite(p.b)) return out;
    PhaseEval ph{p, !p.dphase};
    constexpr int n = 256;
    const double h = (p.b - p.a) / n;
    const double scale = [&] {
        double m = 0.0;
        for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(ph.d1(p.a + i * h)));
        return m;
    }();
    const double zero_tol = 1e-12 * std::max(scale, 1.0);
    double prev = ph.d1(p.a);
    if (std::abs(prev) <= zero_tol) out.push_back(p.a);
    for (int i = 1; i <= n; ++i) {
        const double x = p.a + i * h;
        const double cur = ph.d1(x);
        if (std::abs(cur) <= zero_tol) {
            if (out.empty() || std::abs(out.back() - x) > h / 2) out.push_back(x);
        } else if (prev * cur < 0 && std::abs(prev) > zero_tol) {
            double lo = x - h, hi = x, flo = prev;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(x)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = ph.d1(mid);
                if (fm * flo <= 0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.push_back(0.5 * (lo + hi));
        }
        prev = cur;
    }
    return out;
}

OscillatoryResult integrate(const OscillatoryProblem& p, double tol, const OscillatoryOptions& opt) {
    if (!(tol > 0)) throw std::invalid_argument("integrate: tol must be positive");
    if (!p.phase || !p.amplitude) throw std::invalid_argument("integrate: phase and amplitude are required");
    PhaseEval ph{p, !p.dphase};
    if (std::isfinite(p.b)) return integrate_finite(p, tol, opt, ph);

    // Semi-infinite: panels of geometrically growing length; the remainder beyond X is
    // approximated by one integration by parts, i e^{iλφ(X)} ψ(X) / (λ φ'(X)).
    OscillatoryResult res;
    res.fd_derivatives = ph.fd;
    double x = p.a;
    double len = std::max(1.0, std::abs(p.a));
    double budget = 0.5 * tol;
    for (int k = 0; k < 200; ++k) {
        OscillatoryProblem sub = p;
        sub.a = x;
        sub.b = x + len;
        budget *= 0.5;
        auto r = integrate_finite(sub, std::max(budget, 1e-300), opt, ph);
        res.value += r.value;
        res.error += r.error;
        res.panels += r.panels;
        res.converged = res.converged && r.converged;
        x = sub.b;
        len *= 2.0;
        const double dphi = ph.d1(x);
        const cplx amp = p.amplitude(x);
        if (std::abs(dphi) * p.lambda > 0) {
            const double tail = std::abs(amp) / (p.lambda * std::abs(dphi));
            if (tail < 0.25 * tol && std::abs(r.value) < tol) {
                res.value += cplx(0, 1) * std::polar(1.0, p.lambda * p.phase(x)) * amp / (p.lambda * dphi);
                res.error += tail * 0.1;
                return res;
            }
        }
    }
    res.converged = false;
    return res;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

DecayFit nonstationary_decay_check(const OscillatoryProblem& p, int K, int k_min, int k_max, double tol) {
    DecayFit fit;
    fit.stationary = !stationary_points(p).empty();
    std::vector<double> lx, ly;
    for (int k = k_min; k <= k_max; ++k) {
        OscillatoryProblem q = p;
        q.lambda = std::ldexp(1.0, k);
        const auto r = integrate(q, tol);
        const double mag = std::max(std::abs(r.value), 1e-300);
        fit.lambdas.push_back(q.lambda);
        fit.magnitudes.push_back(mag);
        if (k >= k_min + 2) {
            lx.push_back(std::log(q.lambda));
            ly.push_back(std::log(mag));
        }
    }
    fit.slope = lx.size() >= 2 ? fit_slope(lx, ly) : 0.0;
    fit.pass = !fit.stationary && fit.slope <= -static_cast<double>(K);
    return fit;
}

VanDerCorputReport van_der_corput_check(const OscillatoryProblem& p, int k, int k_min, int k_max, double tol) {
    if (k < 1 || k > 2) throw std::invalid_argument("van_der_corput_check: derivative order must be 1 or 2");
    if (!std::isfinite(p.b)) throw std::invalid_argument("van_der_corput_check: finite interval required");
    PhaseEval ph{p, !p.dphase};
    VanDerCorputReport rep;
    rep.order = k;

    constexpr int n = 2000;
    const double h = (p.b - p.a) / n;
    double floor_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const double x = p.a + i * h;
        floor_val = std::min(floor_val, std::abs(k == 1 ? ph.d1(x) : ph.d2(x)));
    }
    rep.derivative_floor = floor_val;

    // |ψ(b)| + ∫|ψ'| via the total variation on a fine grid.
    double tv = 0.0;
    cplx prev = p.amplitude(p.a);
    for (int i = 1; i <= n; ++i) {
        const cplx cur = p.amplitude(p.a + i * h);
        tv += std::abs(cur - prev);
        prev = cur;
    }
    rep.amplitude_variation = std::abs(p.amplitude(p.b)) + tv;

    std::vector<double> ratios;
    for (int e = k_min; e <= k_max; ++e) {
        OscillatoryProblem q = p;
        q.lambda = std::ldexp(1.0, e);
        const auto r = integrate(q, tol);
        const double eff = q.lambda * floor_val;
        const double bound = std::pow(eff, -1.0 / k) * rep.amplitude_variation;
        const double ratio = std::abs(r.value) / bound;
        rep.lambdas.push_back(q.lambda);
        rep.ratios.push_back(ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
    const std::size_t half = rep.ratios.size() / 2;
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < rep.ratios.size(); ++i) (i < half ? lo : hi) = std::max(i < half ? lo : hi, rep.ratios[i]);
    rep.drift = lo > 0 ? hi / lo : 0.0;
    return rep;
}

}  // namespace abr
