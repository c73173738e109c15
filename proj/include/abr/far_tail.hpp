#pragma once
//! ∫_{u0}^∞ e^{iωu} g(u) du for slowly varying g: adaptive Filon panels on geometric intervals,
//! closed by the integration-by-parts tail once the remainder is below tolerance.

#include "abr/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace abr::detail {

// Filon panels in u over [u0, ∞) for e^{iωu} g(u), including the integration-by-parts tail.
struct FarResult {
    cplx value = 0.0;
    double error = 0.0;
    bool converged = true;
    int evaluations = 0;
};

template <class Amp>
void far_panel(const Amp& g, double a, double b, double omega, double tol, int depth, FarResult& res,
               quad::FilonPanel& last) {
    auto p = quad::filon_panel(g, a, b, omega);
    res.evaluations += quad::kFilonPoints;
    if (p.error > tol && depth < 24) {
        const double m = 0.5 * (a + b);
        far_panel(g, a, m, omega, 0.5 * tol, depth + 1, res, last);
        far_panel(g, m, b, omega, 0.5 * tol, depth + 1, res, last);
        return;
    }
    if (p.error > tol) res.converged = false;
    res.value += p.value * std::polar(1.0, omega * 0.5 * (a + b));
    res.error += p.error;
    last = std::move(p);
}

//! κ = ω + i·decay with the e^{-decay·u} factor already folded into g.
template <class Amp>
FarResult far_integral(const Amp& g, double u0, cplx kappa, double tol) {
    FarResult res;
    const double omega = kappa.real(), decay = kappa.imag();
    const double km = std::abs(kappa);
    double U = u0;
    quad::FilonPanel last;
    for (int panel = 0; panel < 400; ++panel) {
        double len = std::max(U, 1.0);
        if (decay > 0.0) len = std::min(len, 4.0 / decay);
        far_panel(g, U, U + len, omega, tol / 16.0, 0, res, last);
        U += len;
        const cplx g0 = last.at_right(), g1 = last.derivative_right(1), g2 = last.derivative_right(2);
        // e^{iωu}g = e^{iκu}h with h algebraic; derivatives of h carried with the e^{-Im κ u} factor.
        const cplx h1 = g1 + decay * g0;
        const cplx h2 = g2 + 2.0 * decay * g1 + decay * decay * g0;
        const double remainder = std::abs(h2) / (km * km * km);
        if (km * U >= 8.0 && remainder < tol / 16.0 && std::abs(g0) / km < 1e3 * tol) {
            const cplx ph = std::polar(1.0, omega * U);
            res.value += ph * (cplx(0, 1) * g0 / kappa - h1 / (kappa * kappa));
            res.error += remainder;
            return res;
        }
    }
    res.converged = false;
    return res;
}

}  // namespace abr::detail
