#pragma once
//! Polar points, angular flux profiles and the two distances used by the kernels.

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace abr {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

using cplx = std::complex<double>;

//! Reduce an angle to [0, 2π).
double reduce_angle(double theta);

//! Reduce an angle difference to [-π, π]; π maps to +π.
double wrap_to_pi(double delta);

struct PolarPoint {
    double r;
    double theta;

    PolarPoint(double r_, double theta_);
    double x() const;
    double y() const;
};

//! Angular profile α(θ) of a transversal vector potential A = α(θ)(-sinθ, cosθ)/|x|.
class CirculationProfile {
public:
    using Fn = std::function<double(double)>;

    static CirculationProfile constant(double alpha);
    //! α(θ) = cos[0] + Σ_{k≥1} cos[k] cos kθ + sin[k-1] sin kθ.
    static CirculationProfile fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
    //! Arbitrary profile; without an exact antiderivative one is tabulated on 4096 points.
    static CirculationProfile callable(Fn alpha, std::optional<Fn> antiderivative = std::nullopt);

    double alpha(double theta) const;
    //! ∫_0^θ α for any real θ (periodic extension adds 2π·mean per turn).
    double antiderivative(double theta) const;
    double mean_flux() const { return mean_; }
    bool is_constant() const { return kind_ == Kind::constant; }

    //! e^{i(Φ(θ) - ᾱθ)}, the gauge factor relating the profile to its mean flux.
    cplx gauge(double theta) const;

    const std::vector<double>& cos_coeffs() const { return cos_; }
    const std::vector<double>& sin_coeffs() const { return sin_; }

private:
    enum class Kind { constant, fourier, callable };

    CirculationProfile() = default;
    void build_table();
    double periodic_part(double theta) const;

    Kind kind_ = Kind::constant;
    double mean_ = 0.0;
    std::vector<double> cos_, sin_;
    Fn fn_;
    std::optional<Fn> exact_anti_;
    // Tabulated Φ(θ) - ᾱθ on [0, 2π] with first derivatives, for cubic Hermite interpolation.
    std::shared_ptr<const std::vector<double>> table_, dtable_;
};

//! |x - y|.
double distance(const PolarPoint& x, const PolarPoint& y);

//! Same as distance but from radii and the raw angle difference.
double distance(double r1, double r2, double delta);

//! |n| = sqrt(r1² + r2² + 2 r1 r2 cosh s), overflow-safe for large s.
double diffractive_distance(double r1, double r2, double s);

//! exp(i[Φ(θ2) - Φ(θ1)]).
cplx flux_phase(const CirculationProfile& profile, double theta1, double theta2);

}  // namespace abr
