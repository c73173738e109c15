#pragma once
//! Gauss rules, adaptive Gauss–Kronrod for complex integrands, and Filon panels for e^{iωx}.

#include "abr/geometry.hpp"

#include <functional>
#include <vector>

namespace abr::quad {

//! Nodes and weights on [-1, 1], ascending.
struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

//! Gauss–Legendre rule with n ∈ {8, 16, 24, 32}.
const Rule& gauss_legendre(int n);

struct Result {
    cplx value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

struct AdaptiveOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_panels = 4000;
};

//! Adaptive G7K15 on [a, b] with optional interior breakpoints.
Result adaptive(const std::function<cplx(double)>& f, double a, double b, const AdaptiveOptions& opt,
                const std::vector<double>& breakpoints = {});

//! Spherical Bessel j_0..j_kmax at real x.
void spherical_bessel(int kmax, double x, double* out);

//! Legendre expansion of g on [a, b] sampled at the 16-point Gauss nodes.
struct FilonPanel {
    double a = 0.0, b = 0.0;
    cplx value = 0.0;     //!< ∫_a^b e^{iω(x-c)} g(x) dx with c the panel midpoint
    double error = 0.0;   //!< coefficient-tail estimate
    std::vector<cplx> coeffs;
    cplx at_right() const;        //!< g(b) from the expansion
    cplx derivative_right(int order) const;  //!< g'(b) or g''(b)
};

inline constexpr int kFilonPoints = 16;

//! Filon–Legendre rule: exact for e^{iωx}·p(x), deg p < 16.
FilonPanel filon_panel(const std::function<cplx(double)>& g, double a, double b, double omega);

//! Same, from precomputed samples of g at the panel's Gauss nodes.
FilonPanel filon_panel_samples(const cplx* samples, double a, double b, double omega);

//! Complex weights W with Σ W_i g(x_i) equal to the Filon panel value; x_i are the 16-point Gauss nodes.
void filon_weights(double a, double b, double omega, cplx* weights);

}  // namespace abr::quad
