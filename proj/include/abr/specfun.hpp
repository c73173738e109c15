#pragma once
//! Order-zero Hankel functions, the oscillatory/near-field split and the dyadic partition of unity.

#include "abr/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace abr {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

//! Above this modulus the Hankel asymptotic expansion is used.
inline constexpr double kHankelCrossover = 12.0;

//! H₀⁽¹⁾(r) = J₀(r) + iY₀(r) for r > 0.
cplx hankel0_plus(double r);
//! H₀⁽²⁾(r), the conjugate of hankel0_plus.
cplx hankel0_minus(double r);

//! H₀⁽¹⁾(z) for complex z with Im z ≥ 0, z ≠ 0.
cplx hankel0_complex(cplx z);
//! H₀⁽¹⁾(z)·e^{-i Re z}; finite-phase form used by oscillatory quadrature.
cplx hankel0_complex_modulated(cplx z);

//! Σ_k i^k a_k z^{-k} with H₀⁽¹⁾(z) ≈ √(2/(πz)) e^{i(z-π/4)} × (this sum).
cplx hankel0_asymptotic_sum(cplx z);

namespace detail {
cplx hankel0_series(cplx z);
cplx hankel0_asymptotic(cplx z);
cplx hankel0_integral(cplx z);
}  // namespace detail

//! Smooth transition χ with χ = 1 on (0, 1/2] and χ = 0 on [3/4, ∞).
class Cutoff {
public:
    enum class Shape { bump, quintic };
    explicit Cutoff(Shape shape = Shape::bump) : shape_(shape) {}
    double operator()(double r) const;
    double derivative(double r) const;
    Shape shape() const { return shape_; }
    std::string name() const { return shape_ == Shape::bump ? "bump" : "quintic"; }

private:
    Shape shape_;
};

struct HankelSplit {
    cplx a_part;
    cplx b_part;
    cplx full;
};

//! H₀⁺(r) = e^{ir} r^{-1/2} a(r) + b(r) with b = χH₀⁺.
HankelSplit split_ab(double r, const Cutoff& chi = Cutoff{});

//! d/dr of the amplitude a(r) from split_ab, using H₀⁺' = -H₁⁺.
cplx split_a_derivative(double r, const Cutoff& chi = Cutoff{});

//! β(2^{-j}·) for j ≥ 1 and β₀ for j = 0.
class DyadicCutoff {
public:
    explicit DyadicCutoff(int j);
    double operator()(double r) const;
    int j() const { return j_; }

    //! Bump supported on [3/4, 8/3].
    static double psi(double r);
    //! ψ normalised by its dyadic sum.
    static double beta(double r);
    static double beta0(double r);

private:
    int j_;
};

struct LogGrid {
    double r_min;
    double r_max;
    int n;
    std::vector<double> nodes() const;
    double step() const;
};

struct DerivativeBoundReport {
    std::vector<int> orders;
    std::vector<double> max_ratio;
    std::vector<double> worst_r;
};

//! Max over the grid of |f^{(k)}(r)| / envelope(r, k), derivatives by central differences in log r.
DerivativeBoundReport finite_difference_bounds(const std::function<cplx(double)>& f, const std::vector<int>& orders,
                                               const std::function<double(double, int)>& envelope,
                                               const LogGrid& grid);

}  // namespace abr
