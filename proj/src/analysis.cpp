#include "abr/analysis.hpp"

#include "abr/oscillatory.hpp"
#include "abr/parallel.hpp"
#include "abr/quadrature.hpp"
#include "abr/simd.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace abr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// DFT matrix F[m][a] = e^{-2πi m a / n}, row-major.
std::vector<cplx> dft_matrix(int n) {
    std::vector<cplx> f(static_cast<std::size_t>(n) * n);
    for (int m = 0; m < n; ++m)
        for (int a = 0; a < n; ++a) {
            const long long ma = static_cast<long long>(m) * a % n;
            f[static_cast<std::size_t>(m) * n + a] = std::polar(1.0, -kTwoPi * static_cast<double>(ma) / n);
        }
    return f;
}

// Disc moment of the free function F_σ: ∫_0^ρ F_σ(t) t dt.
cplx free_disc_moment(const SpectralParameter& sp, double rho) {
    if (sp.is_boundary()) {
        const cplx m = hankel_disc_moment(sp.lambda(), rho);
        return sp.branch() > 0 ? m : -std::conj(m);
    }
    return hankel_disc_moment(sp.kappa(), rho);
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Grid

void GridSpec::validate() const {
    if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max))
        throw std::invalid_argument("GridSpec: need 0 < r_min < r_max < inf");
    if (n_r < 2) throw std::invalid_argument("GridSpec: n_r must be at least 2");
    if (n_theta < 4) throw std::invalid_argument("GridSpec: n_theta must be at least 4");
}

std::vector<double> GridSpec::edges() const {
    std::vector<double> e(n_r + 1);
    const double l = std::log(r_max / r_min);
    for (int k = 0; k <= n_r; ++k) e[k] = r_min * std::exp(l * k / n_r);
    e[n_r] = r_max;
    return e;
}

std::vector<double> GridSpec::radii() const {
    const auto e = edges();
    std::vector<double> r(n_r);
    for (int i = 0; i < n_r; ++i) r[i] = 0.5 * (e[i] + e[i + 1]);
    return r;
}

std::vector<double> GridSpec::radial_weights() const {
    const auto e = edges();
    std::vector<double> w(n_r);
    for (int i = 0; i < n_r; ++i) w[i] = 0.5 * (e[i] + e[i + 1]) * (e[i + 1] - e[i]) * dtheta();
    return w;
}

double GridSpec::dtheta() const { return kTwoPi / n_theta; }

cplx hankel_disc_moment(cplx kappa, double rho) {
    if (!(rho > 0.0)) return 0.0;
    // H₀(κt) = Σ a_k t^{2k} [1 + (2i/π)(ln(κt/2) + γ - H_k)], a_k = (-κ²/4)^k/(k!)², integrated term by term.
    const cplx lg = std::log(0.5 * kappa * rho) + kEulerGamma;
    const cplx q = -0.25 * kappa * kappa * rho * rho;
    cplx a = rho * rho, sum = 0.0;
    double harmonic = 0.0;
    for (int k = 0; k < 300; ++k) {
        if (k > 0) {
            a *= q / double(k * k);
            harmonic += 1.0 / k;
        }
        const double m = 2.0 * k + 2.0;
        const cplx term = a / m * (1.0 + cplx(0, 2.0 / kPi) * (lg - harmonic - 1.0 / m));
        sum += term;
        if (k > 2 && std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// ---------------------------------------------------------------------------------------------
// Assembly

GridOperator assemble(const CirculationProfile& profile, const SpectralParameter& sigma, const GridSpec& grid,
                      const AssemblyOptions& opt) {
    grid.validate();
    GridOperator op;
    op.grid_ = grid;
    op.sigma_ = sigma;
    op.weights_ = grid.radial_weights();
    const int nr = grid.n_r, n = grid.n_theta;
    const auto r = grid.radii();
    op.gauge_.resize(n);
    for (int a = 0; a < n; ++a) op.gauge_[a] = profile.gauge(grid.angle(a));

    const double alpha = profile.mean_flux();
    const auto mean = CirculationProfile::constant(alpha);
    const cplx pref = kernel_calibration().constant * cplx(0, 1) / (4.0 * kPi);
    const double dpref = 1.0 / (kPi * 4.0 * kPi * kPi);

    std::vector<cplx> amp(n);
    std::vector<double> b2(n), sphi(n);
    double b_min = 1.0;
    for (int c = 0; c < n; ++c) {
        const double th = grid.angle(c);
        amp[c] = angular_A(mean, 0.0, th);
        const double w = wrap_to_pi(th + kPi);
        const double h = std::sin(0.5 * w);
        b2[c] = 2.0 * h * h;
        sphi[c] = std::sin(w);
        const double b = std::sqrt(b2[c]);
        if (b > 1e-12) b_min = std::min(b_min, b);
    }

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < nr; ++i)
        for (int j = i; j < nr; ++j) pairs.emplace_back(i, j);

    const auto F = dft_matrix(n);
    op.samples_.assign(static_cast<std::size_t>(nr) * nr * n, 0.0);
    op.khat_.assign(static_cast<std::size_t>(nr) * nr * n, 0.0);
    std::vector<std::string> fail(pairs.size());

    parallel_for(static_cast<int>(pairs.size()), opt.threads, [&](int begin, int end) {
        std::vector<cplx> d(n), k(n), kh(n);
        for (int p = begin; p < end; ++p) {
            const auto [i, j] = pairs[p];
            DiffractiveRule rule(alpha, r[i], r[j], sigma, b_min, opt.tol);
            rule.evaluate(b2.data(), sphi.data(), n, d.data());
            if (!rule.converged())
                fail[p] = "diffractive rule not converged at radial pair (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")";
            for (int c = 0; c < n; ++c) {
                cplx g;
                if (i == j && c == 0) {
                    // Cell average of the direct part over a disc of the cell's area.
                    const double w = op.weights_[i];
                    g = kTwoPi * free_disc_moment(sigma, std::sqrt(w / kPi)) / w * amp[0];
                } else {
                    g = free_hankel(sigma, distance(r[i], r[j], grid.angle(c))) * amp[c];
                }
                k[c] = pref * (g - dpref * d[c]);
            }
            simd::cgemv(F.data(), n, n, k.data(), kh.data());
            for (int c = 0; c < n; ++c) {
                op.samples_[(static_cast<std::size_t>(i) * nr + j) * n + c] = k[c];
                op.samples_[(static_cast<std::size_t>(j) * nr + i) * n + c] = k[c];
                op.khat_[static_cast<std::size_t>(c) * nr * nr + i * nr + j] = kh[c];
                op.khat_[static_cast<std::size_t>(c) * nr * nr + j * nr + i] = kh[c];
            }
        }
    });
    for (auto& f : fail)
        if (!f.empty()) op.failures_.push_back(std::move(f));
    return op;
}

cplx GridOperator::sample(int i, int j, int c) const {
    const int n = grid_.n_theta;
    c = ((c % n) + n) % n;
    return samples_[(static_cast<std::size_t>(i) * grid_.n_r + j) * n + c];
}

cplx GridOperator::entry(int row, int col) const {
    const int n = grid_.n_theta;
    const int i = row / n, a = row % n, j = col / n, b = col % n;
    return gauge_[a] * sample(i, j, a - b) * std::conj(gauge_[b]) * weights_[j];
}

Eigen::MatrixXcd GridOperator::dense() const {
    const int N = size();
    if (N > 8192) throw std::invalid_argument("GridOperator::dense: grid too large for a dense matrix");
    Eigen::MatrixXcd m(N, N);
    for (int c = 0; c < N; ++c)
        for (int r = 0; r < N; ++r) m(r, c) = entry(r, c);
    return m;
}

Eigen::MatrixXcd GridOperator::mode_matrix(int m) const {
    const int nr = grid_.n_r, n = grid_.n_theta;
    m = ((m % n) + n) % n;
    Eigen::MatrixXcd out(nr, nr);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nr; ++j) out(i, j) = khat_[static_cast<std::size_t>(m) * nr * nr + i * nr + j] * weights_[j];
    return out;
}

std::vector<cplx> GridOperator::apply(const std::vector<cplx>& f) const { return apply_impl(f, false); }
std::vector<cplx> GridOperator::apply_adjoint(const std::vector<cplx>& f) const { return apply_impl(f, true); }

std::vector<cplx> GridOperator::apply_impl(const std::vector<cplx>& f, bool adjoint) const {
    const int nr = grid_.n_r, n = grid_.n_theta;
    if (static_cast<int>(f.size()) != size()) throw std::invalid_argument("GridOperator::apply: size mismatch");
    thread_local std::vector<cplx> F;
    thread_local int Fn = 0;
    if (Fn != n) {
        F = dft_matrix(n);
        Fn = n;
    }
    // h_j = w_j conj(g) f_j, transformed over angles.
    std::vector<cplx> h(static_cast<std::size_t>(nr) * n), hh(static_cast<std::size_t>(nr) * n);
    for (int j = 0; j < nr; ++j)
        for (int b = 0; b < n; ++b) h[j * n + b] = weights_[j] * std::conj(gauge_[b]) * f[j * n + b];
    for (int j = 0; j < nr; ++j) simd::cgemv(F.data(), n, n, h.data() + j * n, hh.data() + j * n);

    std::vector<cplx> col(nr), res(nr), yh(static_cast<std::size_t>(nr) * n);
    for (int m = 0; m < n; ++m) {
        for (int j = 0; j < nr; ++j) col[j] = adjoint ? std::conj(hh[j * n + m]) : hh[j * n + m];
        simd::cgemv(khat_.data() + static_cast<std::size_t>(m) * nr * nr, nr, nr, col.data(), res.data());
        for (int i = 0; i < nr; ++i) yh[i * n + m] = adjoint ? std::conj(res[i]) : res[i];
    }
    // Inverse transform: conj(F conj(ŷ)) / n.
    std::vector<cplx> out(static_cast<std::size_t>(nr) * n), tmp(n), back(n);
    for (int i = 0; i < nr; ++i) {
        for (int m = 0; m < n; ++m) tmp[m] = std::conj(yh[i * n + m]);
        simd::cgemv(F.data(), n, n, tmp.data(), back.data());
        for (int a = 0; a < n; ++a) out[i * n + a] = gauge_[a] * std::conj(back[a]) / double(n);
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Probes and norms

std::vector<Probe> default_probes(const GridSpec& grid) {
    const auto r = grid.radii();
    const int n = grid.n_theta;
    std::vector<Probe> out;
    auto make = [&](const std::string& id, auto&& fn) {
        Probe p{id, std::vector<cplx>(static_cast<std::size_t>(grid.size()))};
        bool nonzero = false;
        for (int i = 0; i < grid.n_r; ++i)
            for (int a = 0; a < n; ++a) {
                p.values[i * n + a] = fn(r[i], grid.angle(a));
                nonzero = nonzero || std::abs(p.values[i * n + a]) > 0.0;
            }
        if (nonzero) out.push_back(std::move(p));
    };
    const double scales[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    const double centres[8][2] = {{0.0, 0.0},        {0.5, 0.0},        {1.0, kPi / 2},     {2.0, kPi},
                                  {3.0, 1.5 * kPi}, {4.0, 0.25 * kPi}, {6.0, 0.75 * kPi}, {8.0, 1.25 * kPi}};
    for (double s : scales) {
        for (const auto& c : centres) {
            const double cx = c[0] * std::cos(c[1]), cy = c[0] * std::sin(c[1]);
            char id[64];
            std::snprintf(id, sizeof id, "gauss_s%g_c%g_%g", s, c[0], c[1]);
            make(id, [&](double rr, double th) {
                const double dx = rr * std::cos(th) - cx, dy = rr * std::sin(th) - cy;
                return cplx(std::exp(-(dx * dx + dy * dy) / (2.0 * s * s)), 0.0);
            });
        }
    }
    const double annuli[5][2] = {{0.0, 0.5}, {0.5, 1.0}, {1.0, 2.0}, {2.0, 4.0}, {4.0, 8.0}};
    for (const auto& an : annuli) {
        char id[64];
        std::snprintf(id, sizeof id, "annulus_%g_%g", an[0], an[1]);
        make(id, [&](double rr, double) { return cplx(rr >= an[0] && rr < an[1] ? 1.0 : 0.0, 0.0); });
    }
    for (int w : {0, 1, -1, 3, -3}) {
        make("angular_w" + std::to_string(w),
             [&](double rr, double th) { return std::polar(std::exp(-(rr - 2.0) * (rr - 2.0)), w * th); });
    }
    return out;
}

double discrete_norm(const GridSpec& grid, const std::vector<cplx>& f, double p) {
    if (static_cast<int>(f.size()) != grid.size()) throw std::invalid_argument("discrete_norm: size mismatch");
    if (!(p >= 1.0)) throw std::invalid_argument("discrete_norm: p must be at least 1");
    const int n = grid.n_theta;
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : f) m = std::max(m, std::abs(v));
        return m;
    }
    const auto w = grid.radial_weights();
    double s = 0.0;
    for (int i = 0; i < grid.n_r; ++i)
        for (int a = 0; a < n; ++a) s += w[i] * std::pow(std::abs(f[i * n + a]), p);
    return std::pow(s, 1.0 / p);
}

void validate_exponents(double p, double q) {
    if (!(p >= 1.0 && p < 4.0 / 3.0)) throw std::invalid_argument("p must lie in [1, 4/3)");
    if (!(q > 4.0)) throw std::invalid_argument("q must lie in (4, inf]");
    const double gap = 1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q);
    if (!(gap >= 2.0 / 3.0 - 1e-12 && gap < 1.0)) throw std::invalid_argument("1/p - 1/q must lie in [2/3, 1)");
}

ProbeNormResult probe_norm(const GridOperator& op, double p, double q, const std::vector<Probe>& probes, bool adjoint,
                           bool check_window) {
    if (probes.empty()) throw std::invalid_argument("probe_norm: empty probe family");
    if (check_window) validate_exponents(p, q);
    ProbeNormResult res;
    res.ratios.assign(probes.size(), 0.0);
    parallel_for(static_cast<int>(probes.size()), 0, [&](int b, int e) {
        for (int k = b; k < e; ++k) {
            const double fp = discrete_norm(op.grid(), probes[k].values, p);
            if (!(fp > 0.0)) throw std::invalid_argument("probe_norm: zero probe " + probes[k].id);
            const auto tf = adjoint ? op.apply_adjoint(probes[k].values) : op.apply(probes[k].values);
            res.ratios[k] = discrete_norm(op.grid(), tf, q) / fp;
        }
    });
    for (std::size_t k = 0; k < probes.size(); ++k) {
        if (res.ratios[k] > res.ratio) {
            res.ratio = res.ratios[k];
            res.best_probe = probes[k].id;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------------------------
// σ-sweeps

Regime parse_regime(const std::string& s) {
    if (s == "i") return Regime::i;
    if (s == "ii") return Regime::ii;
    if (s == "iii") return Regime::iii;
    throw std::invalid_argument("regime must be one of i, ii, iii");
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::i: return "i";
        case Regime::ii: return "ii";
        default: return "iii";
    }
}

SpectralParameter regime_sigma(Regime regime, double delta, double eps) {
    if (!(std::abs(delta) <= 1.0)) throw std::invalid_argument("delta must lie in [-1, 1]");
    switch (regime) {
        case Regime::i:
            return SpectralParameter::from_delta(-1, delta);
        case Regime::ii:
            if (std::abs(delta) < eps) throw std::invalid_argument("regime ii needs |delta| >= eps");
            return SpectralParameter::from_delta(1, delta);
        default:
            if (std::abs(delta) > eps) throw std::invalid_argument("regime iii needs |delta| <= eps");
            return SpectralParameter::from_delta(1, delta);
    }
}

double kernel_envelope_constant(const GridOperator& op) {
    const auto& g = op.grid();
    const auto r = g.radii();
    double worst = 0.0;
    for (int i = 0; i < g.n_r; ++i)
        for (int j = 0; j < g.n_r; ++j)
            for (int c = 0; c < g.n_theta; ++c) {
                if (i == j && c == 0) continue;
                const double d = distance(r[i], r[j], g.angle(c));
                const double env = d <= 0.75 ? std::abs(std::log(d)) : 1.0 / d;
                worst = std::max(worst, std::abs(op.sample(i, j, c)) / env);
            }
    return worst;
}

SigmaScan sigma_scan(const CirculationProfile& profile, double p, double q, Regime regime,
                     const std::vector<double>& deltas, const GridSpec& grid, const AssemblyOptions& opt,
                     bool check_window) {
    if (check_window) validate_exponents(p, q);
    if (deltas.empty()) throw std::invalid_argument("sigma_scan: no deltas");
    const auto probes = default_probes(grid);
    SigmaScan scan;
    scan.deltas = deltas;
    for (double delta : deltas) {
        const auto sp = regime_sigma(regime, delta);
        const auto op = assemble(profile, sp, grid, opt);
        const auto pn = probe_norm(op, p, q, probes, false, check_window);
        for (std::size_t k = 0; k < probes.size(); ++k) scan.rows.push_back({delta, regime, probes[k].id, pn.ratios[k]});
        scan.best.push_back(pn.ratio);
        scan.envelope.push_back(kernel_envelope_constant(op));
    }
    const auto [lo, hi] = std::minmax_element(scan.best.begin(), scan.best.end());
    scan.spread = *hi / *lo;
    scan.uniform = scan.spread < 2.0;
    return scan;
}

double resolvent_identity_residual(const GridOperator& a1, const GridOperator& a2) {
    const auto& g = a1.grid();
    if (g.n_r != a2.grid().n_r || g.n_theta != a2.grid().n_theta || g.r_min != a2.grid().r_min ||
        g.r_max != a2.grid().r_max)
        throw std::invalid_argument("resolvent_identity_residual: grids differ");
    const cplx ds = a1.sigma().sigma() - a2.sigma().sigma();
    double num = 0.0, den = 0.0;
    for (int m = 0; m < g.n_theta; ++m) {
        const auto m1 = a1.mode_matrix(m), m2 = a2.mode_matrix(m);
        const Eigen::MatrixXcd diff = m1 - m2;
        num += (diff - ds * m1 * m2).squaredNorm();
        den += diff.squaredNorm();
    }
    return std::sqrt(num / den);
}

cplx amplitude_lambda_integral(cplx sigma, double r, int sign, double tol) {
    if (!(r > 0.0)) throw std::invalid_argument("amplitude_lambda_integral: r must be positive");
    if (sign != 1 && sign != -1) throw std::invalid_argument("amplitude_lambda_integral: sign must be +1 or -1");
    // With μ = λr the integral is ∫ μ/(μ² - σr²) a_±(μ) e^{±iμ} dμ, where the amplitudes split
    // J₀ = a₊e^{iμ} + a₋e^{-iμ}: a_±(μ)e^{±iμ} = (χJ₀ + (1 - χ)H₀^±)(μ)/2.
    const Cutoff chi;
    const cplx sr2 = sigma * r * r;
    auto weight = [sr2](double m) { return m / (m * m - sr2); };
    auto near = [&](double m) {
        const double c = chi(m);
        const cplx h = c < 1.0 ? hankel0_plus(m) : cplx(0.0);
        return 0.5 * weight(m) * (c * std::cyl_bessel_j(0.0, m) + (1.0 - c) * (sign > 0 ? h : std::conj(h)));
    };
    quad::AdaptiveOptions aopt;
    aopt.abs_tol = 0.5 * tol;
    std::vector<double> cuts{0.5};
    const double pole = (std::sqrt(sr2)).real();
    if (pole > 0.0 && pole < 0.75) cuts.push_back(pole);
    const cplx head = quad::adaptive(near, 0.0, 0.75, aopt, cuts).value;

    OscillatoryProblem prob;
    prob.phase = [sign](double m) { return sign * m; };
    prob.dphase = [sign](double) { return double(sign); };
    prob.d2phase = [](double) { return 0.0; };
    prob.amplitude = [&, sign](double m) {
        const cplx h = hankel0_complex_modulated(cplx(m, 0.0));
        return 0.5 * weight(m) * (sign > 0 ? h : std::conj(h));
    };
    prob.lambda = 1.0;
    prob.a = 0.75;
    prob.b = kInf;
    return head + integrate(prob, 0.5 * tol).value;
}

// ---------------------------------------------------------------------------------------------
// Eigenvalues

std::vector<cplx> radial_samples(const GridSpec& grid, const DiscPotential& v) {
    if (!(v.radius > 0.0)) throw std::invalid_argument("DiscPotential: radius must be positive");
    const auto e = grid.edges();
    std::vector<cplx> out(grid.n_r);
    for (int i = 0; i < grid.n_r; ++i) {
        const double top = std::min(v.radius, e[i + 1]);
        const double frac = top <= e[i] ? 0.0 : (top * top - e[i] * e[i]) / (e[i + 1] * e[i + 1] - e[i] * e[i]);
        out[i] = frac * v.value;
    }
    return out;
}

namespace {

struct Rect {
    double x0, x1, y0, y1;
};

bool in_region(cplx z, const EigenOptions& opt) {
    if (std::abs(z) > opt.lambda_max) return false;
    const double dist = z.real() >= 0.0 ? std::abs(z.imag()) : std::abs(z);
    return dist >= opt.axis_gap;
}

std::vector<Rect> search_tiles(const EigenOptions& opt) {
    const double L = opt.lambda_max, g = opt.axis_gap;
    const int half = std::max(1, opt.tiles / 2);
    std::vector<Rect> t;
    // Left block straddles the negative axis with an odd number of rows.
    const int rows = 2 * half + 1;
    for (int cx = 0; cx < half; ++cx)
        for (int cy = 0; cy < rows; ++cy)
            t.push_back({-L + (L - g) * cx / half, -L + (L - g) * (cx + 1) / half, -L + 2 * L * cy / rows,
                         -L + 2 * L * (cy + 1) / rows});
    // Right block above and below the positive axis.
    for (int cx = 0; cx < half; ++cx)
        for (int cy = 0; cy < half; ++cy) {
            const double x0 = -g + (L + g) * cx / half, x1 = -g + (L + g) * (cx + 1) / half;
            const double y0 = g + (L - g) * cy / half, y1 = g + (L - g) * (cy + 1) / half;
            t.push_back({x0, x1, y0, y1});
            t.push_back({x0, x1, -y1, -y0});
        }
    return t;
}

// Birman–Schwinger family for one angular mode restricted to supp V.
class ModeFamily {
public:
    ModeFamily(Eigen::MatrixXcd m, const std::vector<int>& support, const std::vector<cplx>& v, double sigma0)
        : m_(std::move(m)), support_(support), sigma0_(sigma0) {
        const int ns = static_cast<int>(support.size());
        abs_half_.resize(ns);
        sgn_half_.resize(ns);
        for (int k = 0; k < ns; ++k) {
            const cplx vk = v[support[k]];
            const double a = std::sqrt(std::abs(vk));
            abs_half_[k] = a;
            sgn_half_[k] = vk / a;
        }
        rhs_.resize(m_.rows(), ns);
        for (int k = 0; k < ns; ++k) rhs_.col(k) = m_.col(support[k]);
        // M = P diag(d) P^{-1} once per mode, so contour nodes avoid an n_r × n_r factorization.
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m_);
        d_ = es.eigenvalues();
        const Eigen::MatrixXcd pinv = es.eigenvectors().partialPivLu().inverse();
        const int nr = static_cast<int>(m_.rows());
        left_.resize(ns, nr);
        right_.resize(nr, ns);
        for (int k = 0; k < ns; ++k) {
            left_.row(k) = abs_half_[k] * es.eigenvectors().row(support[k]);
            right_.col(k) = pinv.col(support[k]) * sgn_half_[k];
        }
    }

    int size() const { return static_cast<int>(support_.size()); }

    //! I + |V|^{1/2} R(z) V^{1/2} on supp V.
    Eigen::MatrixXcd operator()(cplx z) const {
        const int nr = static_cast<int>(m_.rows()), ns = size();
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(nr, nr) - (z - sigma0_) * m_;
        const Eigen::MatrixXcd x = a.partialPivLu().solve(rhs_);
        Eigen::MatrixXcd t(ns, ns);
        for (int p = 0; p < ns; ++p)
            for (int q = 0; q < ns; ++q) t(p, q) = (p == q ? 1.0 : 0.0) + abs_half_[p] * x(support_[p], q) * sgn_half_[q];
        return t;
    }

    struct Eval {
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu;  //!< of T(z)
        cplx dlog;                                 //!< tr(T^{-1} T') = (log det T)'
    };

    //! T(z) factored, with T' = |V|^{1/2} R(z)² V^{1/2}. With g = d/(1 - (z - σ0)d) in the eigenbasis of M,
    //! T = I + L diag(g) R and T' = L diag(g²) R.
    Eval eval(cplx z) const {
        const int ns = size();
        const Eigen::VectorXcd g = d_.array() / (1.0 - (z - sigma0_) * d_.array());
        const Eigen::MatrixXcd lg = left_ * g.asDiagonal();
        const Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(ns, ns) + lg * right_;
        const Eigen::MatrixXcd dt = lg * g.asDiagonal() * right_;
        Eval ev{t.partialPivLu(), 0.0};
        ev.dlog = ev.lu.solve(dt).trace();
        return ev;
    }

    cplx log_det_derivative(cplx z) const { return eval(z).dlog; }

    //! Eigenvalue of T(z) closest to 0, i.e. of the BS operator closest to -1, shifted.
    cplx closest(cplx z) const {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es((*this)(z), false);
        cplx best = es.eigenvalues()(0);
        for (int k = 1; k < es.eigenvalues().size(); ++k)
            if (std::abs(es.eigenvalues()(k)) < std::abs(best)) best = es.eigenvalues()(k);
        return best;
    }

private:
    Eigen::MatrixXcd m_;
    std::vector<int> support_;
    double sigma0_;
    std::vector<double> abs_half_;
    std::vector<cplx> sgn_half_;
    Eigen::MatrixXcd rhs_;
    Eigen::VectorXcd d_;
    Eigen::MatrixXcd left_, right_;
};

// Distance to [0, ∞), where the discrete free resolvent has its poles.
double axis_distance(cplx z) { return z.real() >= 0.0 ? std::abs(z.imag()) : std::abs(z); }

// Splits a contour edge until every panel is no longer than its distance to [0, ∞).
std::vector<std::pair<cplx, cplx>> edge_panels(cplx za, cplx zb) {
    std::vector<std::pair<cplx, cplx>> out, todo{{za, zb}};
    while (!todo.empty()) {
        const auto [a, b] = todo.back();
        todo.pop_back();
        const cplx m = 0.5 * (a + b);
        const double d = std::min({axis_distance(a), axis_distance(b), axis_distance(m)});
        if (std::abs(b - a) <= d || std::abs(b - a) < 1e-6) {
            out.push_back({a, b});
        } else {
            todo.push_back({m, b});
            todo.push_back({a, m});
        }
    }
    return out;
}

constexpr int kMoments = 8;

// One leaf rectangle of the contour search.
struct TileResult {
    Rect rect;
    int count = 0;           //!< zeros of det T inside, by the argument principle
    cplx centre;
    double scale = 1.0;
    std::array<cplx, kMoments + 1> moments{};  //!< ∮ w^k (log det T)' dz / 2πi, w = (z - centre)/scale
    std::vector<cplx> raw;   //!< Beyn estimates
};

bool inside(const Rect& r, cplx z) { return z.real() > r.x0 && z.real() < r.x1 && z.imag() > r.y0 && z.imag() < r.y1; }

// Beyn's contour method on one rectangle, subdividing while the probe block is saturated. The same nodes
// give the zero count and power-sum moments used when Beyn misses a zero with a small residue.
void beyn(const ModeFamily& fam, const Rect& rect, const EigenOptions& opt, const Eigen::MatrixXcd& probe, int depth,
          std::vector<TileResult>& out) {
    const auto& gl = quad::gauss_legendre(opt.edge_points <= 8 ? 8 : opt.edge_points <= 16 ? 16 : opt.edge_points <= 24 ? 24 : 32);
    const cplx corners[5] = {{rect.x0, rect.y0}, {rect.x1, rect.y0}, {rect.x1, rect.y1}, {rect.x0, rect.y1}, {rect.x0, rect.y0}};
    const int ns = fam.size(), l = static_cast<int>(probe.cols());
    TileResult tile;
    tile.rect = rect;
    tile.centre = cplx(0.5 * (rect.x0 + rect.x1), 0.5 * (rect.y0 + rect.y1));
    tile.scale = 0.5 * std::max(rect.x1 - rect.x0, rect.y1 - rect.y0);
    Eigen::MatrixXcd a0 = Eigen::MatrixXcd::Zero(ns, l), a1 = Eigen::MatrixXcd::Zero(ns, l);
    for (int e = 0; e < 4; ++e) {
        const auto panels = edge_panels(corners[e], corners[e + 1]);
        const auto& rule = panels.size() == 1 ? gl : quad::gauss_legendre(8);
        for (const auto& [za, zb] : panels) {
            const cplx mid = 0.5 * (za + zb), half = 0.5 * (zb - za);
            for (std::size_t k = 0; k < rule.x.size(); ++k) {
                const cplx z = mid + half * rule.x[k];
                const auto ev = fam.eval(z);
                const Eigen::MatrixXcd sol = ev.lu.solve(probe);
                const cplx w = rule.w[k] * half / cplx(0, kTwoPi);
                a0 += w * sol;
                a1 += (w * z) * sol;
                const cplx u = (z - tile.centre) / tile.scale;
                cplx up = w * ev.dlog;
                for (int p = 0; p <= kMoments; ++p, up *= u) tile.moments[p] += up;
            }
        }
    }
    tile.count = static_cast<int>(std::lround(tile.moments[0].real()));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    // Without enclosed eigenvalues A0 is pure quadrature noise, small against the probe.
    const double floor = 1e-8 * probe.norm();
    int rank = 0;
    while (rank < s.size() && s(rank) > std::max(floor, 1e-9 * s(0))) ++rank;
    if ((rank == l || tile.count > kMoments) && depth < 4) {
        const double xm = 0.5 * (rect.x0 + rect.x1), ym = 0.5 * (rect.y0 + rect.y1);
        for (const Rect& sub : {Rect{rect.x0, xm, rect.y0, ym}, Rect{xm, rect.x1, rect.y0, ym},
                                Rect{rect.x0, xm, ym, rect.y1}, Rect{xm, rect.x1, ym, rect.y1}})
            beyn(fam, sub, opt, probe, depth + 1, out);
        return;
    }
    if (rank > 0) {
        const Eigen::MatrixXcd u = svd.matrixU().leftCols(rank);
        const Eigen::MatrixXcd v = svd.matrixV().leftCols(rank);
        Eigen::MatrixXcd b = u.adjoint() * a1 * v;
        for (int k = 0; k < rank; ++k) b.col(k) /= s(k);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(b, false);
        for (int k = 0; k < rank; ++k) {
            const cplx z = es.eigenvalues()(k);
            // Keep estimates in or near the rectangle; refinement decides.
            const double mx = 0.1 * (rect.x1 - rect.x0), my = 0.1 * (rect.y1 - rect.y0);
            if (z.real() >= rect.x0 - mx && z.real() <= rect.x1 + mx && z.imag() >= rect.y0 - my &&
                z.imag() <= rect.y1 + my)
                tile.raw.push_back(z);
        }
    }
    if (tile.count > 0 || !tile.raw.empty()) out.push_back(std::move(tile));
}

// Zeros in a tile not yet found: power sums of the missing zeros from the deflated moments, Newton's
// identities for the elementary symmetric functions, and the companion-matrix roots.
std::vector<cplx> missing_zero_estimates(const TileResult& tile, const std::vector<cplx>& known) {
    std::vector<cplx> have;
    for (cplx z : known)
        if (inside(tile.rect, z)) have.push_back((z - tile.centre) / tile.scale);
    const int miss = tile.count - static_cast<int>(have.size());
    if (miss <= 0 || miss > kMoments) return {};
    std::vector<cplx> p(miss + 1), e(miss + 1);
    for (int k = 1; k <= miss; ++k) {
        p[k] = tile.moments[k];
        for (cplx w : have) p[k] -= std::pow(w, k);
    }
    e[0] = 1.0;
    for (int k = 1; k <= miss; ++k) {
        cplx acc = 0.0;
        for (int i = 1; i <= k; ++i) acc += (i % 2 ? 1.0 : -1.0) * e[k - i] * p[i];
        e[k] = acc / static_cast<double>(k);
    }
    // w^miss - e1 w^{miss-1} + e2 w^{miss-2} - ...
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(miss, miss);
    for (int k = 0; k < miss; ++k) comp(0, k) = (k % 2 ? -1.0 : 1.0) * e[k + 1];
    for (int k = 1; k < miss; ++k) comp(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<cplx> out;
    for (int k = 0; k < miss; ++k) out.push_back(tile.centre + tile.scale * es.eigenvalues()(k));
    return out;
}

// Newton iteration on log det T. Zeros of det T attract; the poles at free box modes repel.
// Zeros already found in the mode are deflated so that a second estimate cannot fall back onto them.
bool refine(const ModeFamily& fam, cplx& z, double radius, const std::vector<cplx>& known) {
    for (int it = 0; it < 80; ++it) {
        cplx d = fam.log_det_derivative(z);
        for (cplx k : known) d -= 1.0 / (z - k);
        if (!std::isfinite(d.real()) || !std::isfinite(d.imag()) || d == cplx(0.0)) return false;
        cplx step = 1.0 / d;
        // Damp steps that would jump across the search region.
        const double cap = 0.25 * std::max(1.0, std::abs(z));
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        z -= step;
        if (!(std::abs(z) < radius)) return false;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) break;
    }
    return std::abs(fam.closest(z)) < 1e-8;
}

std::vector<int> support_of(const std::vector<cplx>& v) {
    std::vector<int> s;
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
        if (v[i] != cplx(0.0)) s.push_back(i);
    return s;
}

void check_reference(const GridOperator& t0, const std::vector<cplx>& v, const EigenOptions& opt) {
    if (t0.sigma().is_boundary() || t0.sigma().sigma().imag() != 0.0 ||
        std::abs(t0.sigma().sigma().real() - opt.sigma0) > 1e-14)
        throw std::invalid_argument("birman_schwinger_eigen: operator must be assembled at sigma0");
    if (static_cast<int>(v.size()) != t0.grid().n_r)
        throw std::invalid_argument("birman_schwinger_eigen: potential needs one value per radial node");
    for (const auto& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
            throw std::invalid_argument("birman_schwinger_eigen: potential must be finite");
}

}  // namespace

EigenReport birman_schwinger_eigen(const GridOperator& t0, const std::vector<cplx>& v, double gamma,
                                   const EigenOptions& opt) {
    if (!(gamma > 0.0 && gamma <= 0.5)) throw std::invalid_argument("gamma must lie in (0, 1/2]");
    check_reference(t0, v, opt);
    EigenReport rep;
    rep.gamma = gamma;
    const auto& g = t0.grid();
    const auto w = g.radial_weights();
    for (int i = 0; i < g.n_r; ++i) rep.potential_norm += g.n_theta * w[i] * std::pow(std::abs(v[i]), gamma + 1.0);
    const auto support = support_of(v);
    if (support.empty()) return rep;

    const auto tiles = search_tiles(opt);
    const int n = g.n_theta;
    {
        // Spurious spectrum below 0 appears when the discrete free resolvent exceeds 1/(0 - σ0).
        Eigen::VectorXd sw(g.n_r);
        for (int i = 0; i < g.n_r; ++i) sw(i) = std::sqrt(w[i]);
        double top = 0.0;
        for (int m = 0; m < n; ++m) {
            const Eigen::MatrixXcd s = sw.asDiagonal() * t0.mode_matrix(m) * sw.cwiseInverse().asDiagonal();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (s + s.adjoint()), Eigen::EigenvaluesOnly);
            top = std::max(top, es.eigenvalues().maxCoeff());
        }
        rep.free_resolvent_norm = top;
        if (top * (-opt.sigma0) > 1.0)
            rep.warnings.push_back("discrete free operator has spectrum below 0 (resolvent norm " + std::to_string(top) +
                                   "); refine the radial grid");
    }
    std::vector<std::vector<cplx>> found(n);
    std::vector<std::vector<std::string>> warn(n);
    parallel_for(n, opt.threads, [&](int b, int e) {
        for (int m = b; m < e; ++m) {
            ModeFamily fam(t0.mode_matrix(m), support, v, opt.sigma0);
            const int l = std::min(fam.size(), opt.probe_columns);
            std::mt19937_64 rng(1234 + m);
            std::normal_distribution<double> nd;
            Eigen::MatrixXcd probe(fam.size(), l);
            for (int i = 0; i < probe.rows(); ++i)
                for (int j = 0; j < l; ++j) probe(i, j) = cplx(nd(rng), nd(rng));
            std::vector<TileResult> leaves;
            for (const auto& t : tiles) beyn(fam, t, opt, probe, 0, leaves);
            auto accept = [&](cplx z) {
                if (!refine(fam, z, 2.0 * opt.lambda_max, found[m]) || !in_region(z, opt)) return;
                bool dup = false;
                for (cplx y : found[m]) dup = dup || std::abs(y - z) < 1e-7 * std::max(1.0, std::abs(z));
                if (!dup) found[m].push_back(z);
            };
            for (const auto& leaf : leaves)
                for (cplx z : leaf.raw) accept(z);
            for (const auto& leaf : leaves) {
                for (cplx z : missing_zero_estimates(leaf, found[m])) accept(z);
                int have = 0;
                for (cplx z : found[m]) have += inside(leaf.rect, z);
                if (have != leaf.count) {
                    char msg[160];
                    std::snprintf(msg, sizeof msg, "mode %d: %d zeros counted in [%g, %g]x[%g, %g], %d located", m,
                                  leaf.count, leaf.rect.x0, leaf.rect.x1, leaf.rect.y0, leaf.rect.y1, have);
                    warn[m].push_back(msg);
                }
            }
            std::sort(found[m].begin(), found[m].end(),
                      [](cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
        }
    });
    for (int m = 0; m < n; ++m) {
        for (cplx z : found[m]) {
            rep.eigenvalues.push_back(z);
            rep.modes.push_back(m);
            const double ratio = std::pow(std::abs(z), gamma) / rep.potential_norm;
            rep.ratios.push_back(ratio);
            rep.max_ratio = std::max(rep.max_ratio, ratio);
        }
        for (auto& s : warn[m]) rep.warnings.push_back(std::move(s));
    }
    return rep;
}

std::vector<cplx> dense_perturbed_eigenvalues(const GridOperator& t0, const std::vector<cplx>& v,
                                              const EigenOptions& opt) {
    check_reference(t0, v, opt);
    const auto& g = t0.grid();
    const int N = g.size(), n = g.n_theta;
    const Eigen::MatrixXcd t = t0.dense();
    Eigen::MatrixXcd l = t.partialPivLu().inverse();
    for (int k = 0; k < N; ++k) l(k, k) += opt.sigma0 + v[k / n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(l, false);
    std::vector<cplx> out;
    for (int k = 0; k < N; ++k)
        if (in_region(es.eigenvalues()(k), opt)) out.push_back(es.eigenvalues()(k));
    std::sort(out.begin(), out.end(),
              [](cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
    return out;
}

// ---------------------------------------------------------------------------------------------
// Exact disc-potential eigenvalues

namespace {

// Spherical Bessel j_l and Hankel h_l⁽¹⁾ for complex argument, l ≤ lmax.
void sph_j(int lmax, cplx z, std::vector<cplx>& j) {
    j.assign(lmax + 2, 0.0);
    if (std::abs(z) < 4.0 + lmax) {
        // Power series z^l/(2l+1)!! Σ (-z²/2)^k / (k! (2l+3)(2l+5)···(2l+2k+1)).
        for (int l = 0; l <= lmax + 1; ++l) {
            cplx pre = 1.0;
            for (int k = 1; k <= l; ++k) pre *= z / double(2 * k + 1);
            cplx term = 1.0, sum = 1.0;
            for (int k = 1; k < 200; ++k) {
                term *= -0.5 * z * z / (double(k) * double(2 * l + 2 * k + 1));
                sum += term;
                if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            }
            j[l] = pre * sum;
        }
        return;
    }
    j[0] = std::sin(z) / z;
    j[1] = std::sin(z) / (z * z) - std::cos(z) / z;
    for (int l = 1; l <= lmax; ++l) j[l + 1] = double(2 * l + 1) / z * j[l] - j[l - 1];
}

void sph_h(int lmax, cplx z, std::vector<cplx>& h) {
    h.assign(lmax + 2, 0.0);
    const cplx I(0, 1);
    h[0] = -I * std::exp(I * z) / z;
    h[1] = -(1.0 + I / z) * std::exp(I * z) / z;  // -(z + i) e^{iz} / z²
    for (int l = 1; l <= lmax; ++l) h[l + 1] = double(2 * l + 1) / z * h[l] - h[l - 1];
}

// Matching determinant for half-integer order l + 1/2.
cplx half_integer_match(int l, cplx lambda, const DiscPotential& v) {
    cplx k = std::sqrt(lambda - v.value);
    cplx kap = std::sqrt(lambda);
    if (kap.imag() < 0.0) kap = -kap;
    std::vector<cplx> j, h;
    sph_j(l, k * v.radius, j);
    sph_h(l, kap * v.radius, h);
    const cplx zj = k * v.radius, zh = kap * v.radius;
    // f'_l(z) = f_{l-1}(z) - (l+1)/z f_l(z); j_0' = -j_1.
    const cplx jd = l == 0 ? -j[1] : j[l - 1] - double(l + 1) / zj * j[l];
    const cplx hd = l == 0 ? -h[1] : h[l - 1] - double(l + 1) / zh * h[l];
    return k * jd * h[l] - kap * hd * j[l];
}

}  // namespace

std::vector<cplx> disc_potential_eigenvalues(double alpha, const DiscPotential& v, const EigenOptions& opt) {
    std::vector<cplx> roots;
    auto add = [&](cplx z) {
        if (!in_region(z, opt)) return;
        for (cplx y : roots)
            if (std::abs(y - z) < 1e-9 * std::max(1.0, std::abs(z))) return;
        roots.push_back(z);
    };
    if (std::abs(alpha - 0.5) < 1e-15) {
        for (int l = 0; l <= 12; ++l) {
            auto f = [&](cplx z) { return half_integer_match(l, z, v); };
            const int gridn = 40;
            for (int a = 0; a <= gridn; ++a)
                for (int b = 0; b <= gridn; ++b) {
                    cplx z0(-opt.lambda_max + 2 * opt.lambda_max * a / gridn, -opt.lambda_max + 2 * opt.lambda_max * b / gridn);
                    if (!in_region(z0, opt)) continue;
                    cplx z1 = z0 + cplx(1e-4, 1e-4);
                    cplx f0 = f(z0), f1 = f(z1);
                    bool ok = false;
                    for (int it = 0; it < 80; ++it) {
                        if (f1 == f0) break;
                        const cplx z2 = z1 - f1 * (z1 - z0) / (f1 - f0);
                        if (!std::isfinite(z2.real()) || !std::isfinite(z2.imag()) || std::abs(z2) > 4 * opt.lambda_max) break;
                        z0 = z1;
                        f0 = f1;
                        z1 = z2;
                        f1 = f(z1);
                        if (std::abs(z1 - z0) < 1e-14 * std::max(1.0, std::abs(z1))) {
                            ok = true;
                            break;
                        }
                    }
                    // Reject the trivial zeros at the branch point λ = 0 and at zero interior momentum λ = V.
                    if (ok && std::abs(z1) > 1e-8 && std::abs(z1 - v.value) > 1e-6 * std::max(1.0, std::abs(v.value)))
                        add(z1);
                }
        }
    } else if (alpha == 0.0) {
        if (v.value.imag() != 0.0 || !(v.value.real() < 0.0))
            throw std::invalid_argument("disc_potential_eigenvalues: flux 0 oracle needs a real attractive potential");
        const double vr = v.value.real(), R = v.radius;
        for (int nn = 0; nn <= 12; ++nn) {
            auto f = [&](double lam) {
                const double k = std::sqrt(lam - vr), t = std::sqrt(-lam);
                const double jn = std::cyl_bessel_j(nn, k * R), kn = std::cyl_bessel_k(nn, t * R);
                const double jd = nn == 0 ? -std::cyl_bessel_j(1, k * R)
                                          : 0.5 * (std::cyl_bessel_j(nn - 1, k * R) - std::cyl_bessel_j(nn + 1, k * R));
                const double kd = nn == 0 ? -std::cyl_bessel_k(1, t * R)
                                          : -0.5 * (std::cyl_bessel_k(nn - 1, t * R) + std::cyl_bessel_k(nn + 1, t * R));
                return k * jd * kn - t * kd * jn;
            };
            const double lo = std::max(vr, -opt.lambda_max) * (1 - 1e-12), hi = -opt.axis_gap;
            const int steps = 4000;
            double xa = lo, fa = f(xa);
            for (int s = 1; s <= steps; ++s) {
                const double xb = lo + (hi - lo) * s / steps, fb = f(xb);
                if (fa * fb < 0.0) {
                    double a = xa, b = xb, fl = fa;
                    for (int it = 0; it < 200 && b - a > 1e-15 * std::abs(a); ++it) {
                        const double m = 0.5 * (a + b), fm = f(m);
                        if (fl * fm <= 0.0) {
                            b = m;
                        } else {
                            a = m;
                            fl = fm;
                        }
                    }
                    add(0.5 * (a + b));
                }
                xa = xb;
                fa = fb;
            }
        }
    } else {
        throw std::invalid_argument("disc_potential_eigenvalues: exact oracle available for flux 0 and 1/2 only");
    }
    std::sort(roots.begin(), roots.end(),
              [](cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
    return roots;
}

}  // namespace abr
