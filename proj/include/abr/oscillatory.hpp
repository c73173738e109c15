#pragma once
//! Quadrature for ∫_a^b e^{iλφ(x)} ψ(x) dx and empirical checks of the non-stationary and
//! van der Corput decay rates.

#include "abr/quadrature.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace abr {

struct OscillatoryProblem {
    std::function<double(double)> phase;
    std::function<double(double)> dphase;   //!< optional; finite differences otherwise
    std::function<double(double)> d2phase;  //!< optional
    std::function<cplx(double)> amplitude;
    double lambda = 1.0;
    double a = 0.0;
    double b = 1.0;  //!< may be +infinity
};

struct OscillatoryResult {
    cplx value = 0.0;
    double error = 0.0;
    int panels = 0;
    bool converged = true;
    bool fd_derivatives = false;  //!< phase derivatives came from finite differences
};

struct OscillatoryOptions {
    int max_panels = 20000;
};

OscillatoryResult integrate(const OscillatoryProblem& p, double tol, const OscillatoryOptions& opt = {});

//! Stationary points of the phase in [a, b] (finite b), including endpoints where φ' = 0.
std::vector<double> stationary_points(const OscillatoryProblem& p);

struct DecayFit {
    std::vector<double> lambdas;
    std::vector<double> magnitudes;
    double slope = 0.0;          //!< fitted d log|I| / d log λ over the retained window
    bool stationary = false;     //!< a stationary point was detected in the support
    bool pass = false;
};

//! Fits log|I(λ)| against log λ for λ = 2^k, k ∈ [k_min, k_max], dropping the two smallest λ.
DecayFit nonstationary_decay_check(const OscillatoryProblem& p, int K, int k_min = 1, int k_max = 8,
                                   double tol = 1e-15);

struct VanDerCorputReport {
    int order = 1;
    double derivative_floor = 0.0;  //!< min |φ^{(k)}| used to normalise the phase
    double amplitude_variation = 0.0;  //!< |ψ(b)| + ∫|ψ'|
    std::vector<double> lambdas;
    std::vector<double> ratios;     //!< |I(λ)| / (λ'^{-1/k} (|ψ(b)| + ∫|ψ'|)), λ' = λ·floor
    double max_ratio = 0.0;
    double drift = 0.0;             //!< max ratio over the upper half of λ divided by the lower half
};

VanDerCorputReport van_der_corput_check(const OscillatoryProblem& p, int k, int k_min = 4, int k_max = 14,
                                        double tol = 1e-13);

//! Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace abr
