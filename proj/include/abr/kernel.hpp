#pragma once
//! Explicit resolvent kernel of (i∂_θ + α(θ))²-type magnetic operators in the plane:
//! direct part F(|x-y|)·A and diffractive part ∫ F(|n|)·B ds.

#include "abr/geometry.hpp"
#include "abr/specfun.hpp"

#include <vector>

namespace abr {

//! Spectral parameter σ ∉ [0, ∞), or a boundary value λ² ± i0.
class SpectralParameter {
public:
    static SpectralParameter off_axis(cplx sigma);
    static SpectralParameter boundary(double lambda, int branch);
    //! sign·√(1-δ²) + iδ.
    static SpectralParameter from_delta(int sign, double delta);

    bool is_boundary() const { return boundary_; }
    cplx sigma() const { return sigma_; }
    double lambda() const { return lambda_; }
    int branch() const { return branch_; }

    //! √σ with Im ≥ 0; ±λ on the boundary.
    cplx kappa() const;
    double modulus() const { return std::abs(sigma_); }
    SpectralParameter normalized() const;

    //! Decomposition of σ/|σ| as sign·√(1-δ²) + iδ.
    int sign() const;
    double delta() const;
    //! Regime 1 (Re σ < 0), 2 (Re σ > 0, |δ| ≥ eps) or 3 (near the positive axis or boundary).
    int regime(double eps = 0.1) const;

private:
    bool boundary_ = false;
    cplx sigma_ = -1.0;
    double lambda_ = 0.0;
    int branch_ = 0;
};

//! H_σ(ρ) = H₀⁽¹⁾(√σ ρ); on the lower boundary this is -H₀⁻(λρ).
cplx free_hankel(const SpectralParameter& sp, double rho);
//! H_σ(ρ)·e^{-i Re(√σ) ρ}.
cplx free_hankel_modulated(const SpectralParameter& sp, double rho);

//! Classical free Green's function (i/4) H₀⁽¹⁾(√σ |x-y|).
cplx free_oracle(const SpectralParameter& sp, const PolarPoint& x, const PolarPoint& y);

//! e^{i∫_{θ1}^{θ̃2} α}/(4π²) with θ̃2 the representative of θ2 nearest θ1; half weight at |θ1-θ2| = π.
cplx angular_A(const CirculationProfile& profile, double theta1, double theta2);

//! Bracket of B_α for constant flux: sin|α|π e^{-|α|s} + sin απ · [...]/(cosh s - cos φ), φ = θ1-θ2+π.
cplx angular_B_bracket(double alpha, double s, double phi);

//! -(1/4π²)·gauge·bracket.
cplx angular_B(const CirculationProfile& profile, double s, double theta1, double theta2);

struct KernelOptions {
    double tol = 1e-10;
    Cutoff cutoff{};
};

struct KernelValue {
    cplx g1 = 0.0, g2 = 0.0, d1 = 0.0, d2 = 0.0;
    cplx total = 0.0;
    double err_d1 = 0.0, err_d2 = 0.0;
    bool converged = true;
};

//! g1 = (1-χ(ρ)) H_σ(d)·A, g2 = χ(ρ) H_σ(d)·A with ρ = |√σ| d; A oriented from y to x.
std::pair<cplx, cplx> direct_terms(const CirculationProfile& profile, const PolarPoint& x, const PolarPoint& y,
                                   const SpectralParameter& sp = SpectralParameter::boundary(1.0, +1),
                                   const Cutoff& cutoff = Cutoff{});

struct DiffractiveResult {
    cplx d1 = 0.0, d2 = 0.0;
    double err1 = 0.0, err2 = 0.0;
    bool converged = true;
    int evaluations = 0;
};

//! ∫_0^∞ (1-χ)H_σ(|n|) B ds and ∫_0^∞ χ H_σ(|n|) B ds.
DiffractiveResult diffractive_terms(const CirculationProfile& profile, const PolarPoint& x, const PolarPoint& y,
                                    const SpectralParameter& sp = SpectralParameter::boundary(1.0, +1),
                                    const KernelOptions& opt = {});

//! Same integrals with the bracket only (no -1/4π² and no gauge), for radii and φ = θ1-θ2+π.
DiffractiveResult diffractive_bracket_integrals(double alpha, double r1, double r2, double phi,
                                                const SpectralParameter& sp, const KernelOptions& opt);

//! Global constant c with R(σ)(x,y) = c·(i/4π)(g1+g2+(d1+d2)/π); fitted once against free_oracle.
struct Calibration {
    double constant = 0.0;
    double variance = 0.0;   //!< variance of the per-pair ratios
    int pairs = 0;
};
const Calibration& kernel_calibration();
Calibration calibrate_normalization(int pairs, unsigned seed);

KernelValue resolvent_kernel(const CirculationProfile& profile, const SpectralParameter& sp, const PolarPoint& x,
                             const PolarPoint& y, const KernelOptions& opt = {});

//! (λ/iπ)(R(λ²+i0) - R(λ²-i0)) at (x, y).
cplx spectral_measure_kernel(const CirculationProfile& profile, double lambda, const PolarPoint& x,
                             const PolarPoint& y, const KernelOptions& opt = {});

struct SpectralRouteResult {
    cplx value = 0.0;
    double error = 0.0;
    double cutoff_lambda = 0.0;
};

//! R(σ)(x,y) as ∫_0^Λ dE(λ;x,y)/(λ²-σ): cross-check path for off-axis σ.
SpectralRouteResult resolvent_kernel_spectral(const CirculationProfile& profile, const SpectralParameter& sp,
                                              const PolarPoint& x, const PolarPoint& y, double tol);

//! Fixed node set for ∫_0^∞ H_σ(|n(s)|)·bracket(α, s, φ) ds at fixed radii, reused across many φ.
//! Near nodes are graded Gauss panels in s down to the scale b_min; far nodes carry Filon weights in u = |n|.
class DiffractiveRule {
public:
    DiffractiveRule(double alpha, double r1, double r2, const SpectralParameter& sp, double b_min, double tol);

    cplx operator()(double phi) const;
    //! out[a] = rule at φ with b2[a] = 1 - cos φ and sinphi[a] = sin φ.
    void evaluate(const double* b2, const double* sinphi, int count, cplx* out) const;
    std::size_t size() const { return wf_re_.size(); }
    //! False when a far panel hit the subdivision limit or the tail never closed.
    bool converged() const { return converged_; }

private:
    void add_node(double s, cplx weight);

    double c_exp_ = 0.0, c_frac_ = 0.0, alpha_ = 0.0;
    bool converged_ = true;
    // Structure-of-arrays: weight·H, e^{-|α|s}, e^{-s}-1, sinh αs, cosh αs, 2 sinh²(s/2).
    std::vector<double> wf_re_, wf_im_, e1_, em1_, sh_, ch_, dd_;
};

}  // namespace abr
