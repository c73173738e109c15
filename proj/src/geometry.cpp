#include "abr/geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>

namespace abr {

namespace {
constexpr int kTableSize = 4096;
}

double reduce_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

double wrap_to_pi(double delta) {
    double t = std::remainder(delta, kTwoPi);
    if (t == -kPi) t = kPi;
    return t;
}

PolarPoint::PolarPoint(double r_, double theta_) : r(r_), theta(reduce_angle(theta_)) {
    if (!(r_ > 0.0) || !std::isfinite(r_)) throw std::invalid_argument("PolarPoint: radius must be positive");
}

double PolarPoint::x() const { return r * std::cos(theta); }
double PolarPoint::y() const { return r * std::sin(theta); }

CirculationProfile CirculationProfile::constant(double alpha) {
    CirculationProfile p;
    p.kind_ = Kind::constant;
    p.mean_ = alpha;
    p.cos_ = {alpha};
    return p;
}

CirculationProfile CirculationProfile::fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
    CirculationProfile p;
    p.kind_ = Kind::fourier;
    if (cos_coeffs.empty()) cos_coeffs.push_back(0.0);
    p.mean_ = cos_coeffs[0];
    p.cos_ = std::move(cos_coeffs);
    p.sin_ = std::move(sin_coeffs);
    bool flat = true;
    for (std::size_t k = 1; k < p.cos_.size(); ++k) flat = flat && p.cos_[k] == 0.0;
    for (double s : p.sin_) flat = flat && s == 0.0;
    if (flat) p.kind_ = Kind::constant;
    return p;
}

CirculationProfile CirculationProfile::callable(Fn alpha, std::optional<Fn> antiderivative) {
    CirculationProfile p;
    p.kind_ = Kind::callable;
    p.fn_ = std::move(alpha);
    p.exact_anti_ = std::move(antiderivative);
    if (p.exact_anti_) {
        p.mean_ = ((*p.exact_anti_)(kTwoPi) - (*p.exact_anti_)(0.0)) / kTwoPi;
    } else {
        p.build_table();
    }
    return p;
}

void CirculationProfile::build_table() {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    const double h = kTwoPi / kTableSize;
    std::vector<double> phi(kTableSize + 1, 0.0);
    for (int k = 0; k < kTableSize; ++k) {
        phi[k + 1] = phi[k] + GK::integrate(fn_, k * h, (k + 1) * h, 8, 1e-14);
    }
    mean_ = phi[kTableSize] / kTwoPi;
    auto tab = std::make_shared<std::vector<double>>(kTableSize + 1);
    auto dtab = std::make_shared<std::vector<double>>(kTableSize + 1);
    for (int k = 0; k <= kTableSize; ++k) {
        (*tab)[k] = phi[k] - mean_ * k * h;
        (*dtab)[k] = fn_(k * h) - mean_;
    }
    table_ = tab;
    dtable_ = dtab;
}

double CirculationProfile::alpha(double theta) const {
    switch (kind_) {
        case Kind::constant:
            return mean_;
        case Kind::fourier: {
            double v = cos_[0];
            for (std::size_t k = 1; k < cos_.size(); ++k) v += cos_[k] * std::cos(k * theta);
            for (std::size_t k = 0; k < sin_.size(); ++k) v += sin_[k] * std::sin((k + 1) * theta);
            return v;
        }
        case Kind::callable:
            return fn_(reduce_angle(theta));
    }
    return 0.0;
}

double CirculationProfile::periodic_part(double theta) const {
    // Φ(θ) - ᾱθ, which is 2π-periodic and vanishes at 0.
    switch (kind_) {
        case Kind::constant:
            return 0.0;
        case Kind::fourier: {
            double v = 0.0;
            for (std::size_t k = 1; k < cos_.size(); ++k) v += cos_[k] * std::sin(k * theta) / k;
            for (std::size_t k = 0; k < sin_.size(); ++k) {
                const double m = static_cast<double>(k + 1);
                v += sin_[k] * (1.0 - std::cos(m * theta)) / m;
            }
            return v;
        }
        case Kind::callable: {
            const double t = reduce_angle(theta);
            if (exact_anti_) return (*exact_anti_)(t) - (*exact_anti_)(0.0) - mean_ * t;
            const double h = kTwoPi / kTableSize;
            int k = static_cast<int>(t / h);
            if (k >= kTableSize) k = kTableSize - 1;
            const double u = (t - k * h) / h;
            const auto& f = *table_;
            const auto& df = *dtable_;
            const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
            const double h10 = u * (1 - u) * (1 - u);
            const double h01 = u * u * (3 - 2 * u);
            const double h11 = u * u * (u - 1);
            return h00 * f[k] + h10 * h * df[k] + h01 * f[k + 1] + h11 * h * df[k + 1];
        }
    }
    return 0.0;
}

double CirculationProfile::antiderivative(double theta) const {
    return mean_ * theta + periodic_part(theta);
}

cplx CirculationProfile::gauge(double theta) const {
    if (kind_ == Kind::constant) return 1.0;
    return std::polar(1.0, periodic_part(theta));
}

double distance(double r1, double r2, double delta) {
    // (r1 - r2)² + 4 r1 r2 sin²(Δ/2) avoids cancellation for nearby points.
    const double s = std::sin(0.5 * delta);
    const double d2 = (r1 - r2) * (r1 - r2) + 4.0 * r1 * r2 * s * s;
    return std::sqrt(std::max(d2, 0.0));
}

double distance(const PolarPoint& x, const PolarPoint& y) { return distance(x.r, y.r, x.theta - y.theta); }

double diffractive_distance(double r1, double r2, double s) {
    if (s < 0) throw std::invalid_argument("diffractive_distance: s must be nonnegative");
    if (s < 600.0) {
        // cosh s = 1 + 2 sinh²(s/2) keeps the small-s behaviour exact.
        const double sh = std::sinh(0.5 * s);
        return std::sqrt((r1 + r2) * (r1 + r2) + 4.0 * r1 * r2 * sh * sh);
    }
    const double scale = std::exp(0.5 * s + 0.5 * std::log(r1 * r2));
    const double rest = (r1 * r1 + r2 * r2) / (r1 * r2) * std::exp(-s) + std::exp(-2.0 * s);
    return scale * std::sqrt(1.0 + rest);
}

cplx flux_phase(const CirculationProfile& profile, double theta1, double theta2) {
    return std::polar(1.0, profile.antiderivative(theta2) - profile.antiderivative(theta1));
}

}  // namespace abr
