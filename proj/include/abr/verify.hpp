#pragma once
//! Empirical checks of the dyadic kernel envelopes, the Schur-type scaling, the appendix inequalities and
//! the integrability facts behind the uniform resolvent bound. "≲" is read as: finite maximum of
//! observed/envelope over a dense or seeded parameter set, stable under refinement.

#include "abr/geometry.hpp"
#include "abr/oscillatory.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace abr::verify {

//! Half-width parameter of the angular window around the antipodal direction.
inline constexpr double kWindowEps = 0.05;

struct SampleRecord {
    int j = 0;
    double ratio = 0.0;
    std::vector<std::pair<std::string, double>> params;
};

struct BoundCheckReport {
    std::string claim_id;
    long sample_count = 0;  //!< evaluated samples
    long skipped = 0;       //!< vacuous samples (infinite envelope) plus quadrature failures
    long failed = 0;        //!< quadrature failures, a subset of skipped
    long points = 0;        //!< integrand or expression evaluations, for grid-based checks
    double max_ratio = 0.0;
    std::vector<std::pair<std::string, double>> worst_point;
    std::vector<SampleRecord> worst;  //!< largest ratios, descending

    //! j-sweeps: max ratio per j and the fitted slope of log₂(max ratio) against j.
    std::vector<int> js;
    std::vector<double> max_ratio_by_j;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double slope_target = 0.0;
    double slope_tolerance = 0.0;  //!< absolute

    //! Grid checks: the same maximum on the doubled grid.
    double refined_max_ratio = std::numeric_limits<double>::quiet_NaN();

    std::vector<std::pair<std::string, double>> extras;  //!< check-specific diagnostics
    bool pass = false;
    std::string note;

    std::string verdict() const { return pass ? "pass" : "fail"; }
    //! |refined/max - 1|, or NaN without a refinement.
    double refinement_change() const;
};

struct SweepOptions {
    int j_min = 2;
    int j_max = 8;
    long samples = 10000;  //!< total over the j-sweep
    std::uint64_t seed = 1;
    double tol = 1e-9;
    double eps = kWindowEps;
    double flat_tolerance = 0.15;
    int threads = 0;
};

// ---------------------------------------------------------------------------------------------
// Building blocks

//! a(r) of the Hankel split (bump cutoff).
cplx amplitude_a(double r);

//! Smooth window, 1 for |θ - π| ≤ ε and 0 for |θ - π| ≥ 2ε.
double window(double theta, double eps = kWindowEps);

//! θ₁-integral of two rescaled direct kernels with source angles θ₂, θ₂′ (TT* kernel at scale 2^j).
cplx direct_dyadic_kernel(int j, double r1, double r2, double r2p, double theta2, double theta2p, double eps,
                          double tol, bool* converged = nullptr);
//! 2^{-j}(2^j|r₂ - r₂′|)^{-1/2} r₁^{-1}; infinite for r₂ = r₂′.
double direct_dyadic_envelope(int j, double r1, double r2, double r2p);

//! Angular Fourier multiplier of the rescaled direct kernel at frequency ζ. The amplitude carries
//! (2^j d)^{-1/2} as in the kernel; printed_scaling = true uses (2^{j/2} d)^{-1/2} instead.
cplx multiplier_integral(int j, double r1, double r2, double zeta, double eps, double tol,
                         bool printed_scaling = false, bool* converged = nullptr);
//! 2^{-j/2}(2^j r₁r₂)^{-1/2}.
double multiplier_envelope(int j, double r1, double r2);

enum class DiffractivePiece { exponential = 1, sinh_part = 2, cosh_part = 3, cosh_model = 4 };

//! ∫_0^∞ e^{iλ|n|}|n|^{-1/2} a(λ|n|) w(s) ds with |n|² = r₁² + r₂² + 2r₁r₂ cosh s, φ = θ₁ - θ₂ + π and
//! w = e^{-|α|s}, (e^{-s} - cos φ) sinh αs/(cosh s - cos φ), sin φ cosh αs/(cosh s - cos φ), or the
//! quadratic model (r₁+r₂)^{-1/2} a(λ(r₁+r₂)) sin φ/(s²/2 + 2 sin²(φ/2)) with the |n| factors dropped.
cplx diffractive_piece_integral(DiffractivePiece piece, double alpha, double r1, double r2, double phi, double lambda,
                                double tol, bool* converged = nullptr);

//! 2^{-j/2} β(r₁+r₂)(r₁+r₂)^{1/2} ∫_0^∞ e^{i2^j r₁r₂ s²} ψ_model(s) ds, by rotating onto e^{iπ/4}ℝ₊.
cplx morse_model_term(int j, double r1, double r2, double phi, double tol = 1e-12);

//! 2^{-j/2}(1 + 2^j r₁r₂)^{-1/2}.
double diffractive_envelope(int j, double r1, double r2);

// ---------------------------------------------------------------------------------------------
// Checks

BoundCheckReport check_direct_dyadic(const SweepOptions& opt = {});

//! The ζ = 0 slice is returned in extras as the van der Corput ratio of the same phase.
BoundCheckReport check_multiplier_bound(const SweepOptions& opt = {}, bool printed_scaling = false);

//! ell = 1: |K̃¹|. ell = 2: |K̃²| and |K̃¹| + |K̃²|. ell = 3: the error part, the model comparison
//! |e^{-i2^j(r₁+r₂)}K̃_m - H| and |H|.
std::vector<BoundCheckReport> check_diffractive_dyadic(int ell, const SweepOptions& opt = {});

//! c = min r₁r₂/(r₁+r₂) ratio of |φ''| on [0,1] and φ' on [1, 20], reported as max_ratio = 1/c.
BoundCheckReport check_phase_derivatives(long samples = 2000, std::uint64_t seed = 1);

struct SchurOptions {
    int j_min = 2;
    int j_max = 7;
    int n_r = 160;
    int n_theta = 16;
    double r_min = 1e-4;
    double r_max = 3.0;
    double slope_rel_tolerance = 0.15;
};

//! Operator with kernel 2^{-j/2}(1 + 2^j r₁r₂)^{-1/2} β(r₁+r₂) on the probe family; fits the decay of the
//! max probe ratio against 2^{-j(1/2+2/q)}. Requires q > 4 and q ≥ p′, or (p, q) = (1, ∞); on q = p′ the
//! j-independent constant grows like log(1/r_min) and the report carries a note.
BoundCheckReport check_schur_bound(double p, double q, const SchurOptions& opt = {});

//! ‖(1 + |x|)^{-1/2}‖_{L^q(|x| ≤ R)}^q for each R.
std::vector<double> envelope_norm_power(double q, const std::vector<double>& radii);

//! Inequality (1) expression, k = 0 or 1 (analytic derivative):
//! (e^{-s} - 1 + b²) sinh αs/(2 sinh²(s/2) + b²) - (-s + b²)αs/(s²/2 + b²).
double appendix_expression(double s, double b, double alpha, int k);
//! Closed form of the b = 0 slice: (e^{-s} - 1) sinh αs/(2 sinh²(s/2)) + 2α and its derivative.
double appendix_expression_b0(double s, double alpha, int k);

enum class AppendixForm {
    reduced,  //!< b ∈ [0, 2], |n|² = (r₁+r₂)² + r₁r₂(cosh s - 1), numerator b
    angular   //!< φ-grid, b = √2 sin(φ/2), kernel |n|, numerator sin φ
};

//! ∫_0^1 |∂_s[...]| ds for inequality 2 or 3. In the angular form `b_or_phi` is φ.
double appendix_integral(int inequality, AppendixForm form, double b_or_phi, double alpha, int j, double r1,
                         double r2, double tol, long* evaluations = nullptr);

struct AppendixGrid {
    int n_s = 100, n_b = 100, n_alpha = 101;  //!< inequality 1
    int n_b_int = 12, n_alpha_int = 5, n_split = 3;  //!< inequalities 2, 3 (j ∈ 1..8, r₁+r₂ ∈ {0.8, 1.3, 2.2})
    int threads = 0;
    double tol = 1e-7;
};

//! inequality 1 checks k = 0 and k = 1 together. Runs the grid and its doubling.
BoundCheckReport check_appendix(int inequality, AppendixForm form = AppendixForm::reduced,
                                const AppendixGrid& grid = {});

//! Facts on α ∈ {±0.1, ±0.3, ±0.5, ±0.7, ±0.9} and an n_theta grid in θ₁ - θ₂ (plus its doubling):
//! 1: ∫e^{-|α|s}, 2: ∫|sinh part|, 3: ∫|cosh part|. max_ratio is the raw integral.
BoundCheckReport check_B_facts(int fact, int n_theta = 256);
//! ∫_0^∞ |bracket| ds with the stable-form integrand and kink breakpoints.
double bracket_fact_integral(int fact, double alpha, double phi, double tol = 1e-10);

//! |A| + ∫|B| ds over α ∈ {±0.1, ±0.5, ±0.9} and an angle grid (plus its doubling).
BoundCheckReport check_B_integrability(int n_theta = 256);

//! |D₂|/|log(r₁+r₂)| on r₁+r₂ ∈ [10⁻⁴, 0.74] (n_t log points), three radius splits, six fluxes and an
//! angle grid with an antipodal cluster; then both grids doubled.
BoundCheckReport check_near_diffractive_log(int n_t = 24, int n_phi = 6);

//! case 1 (σ = -√(1-δ²) + iδ) or 2 (σ = √(1-δ²) + iδ), δ ∈ {±0.2, ±0.6}, both amplitude signs, against
//! C|log r| on (0, 3/4) and C r^{-1} on [3/4, 50]; n_r points per range, then doubled.
BoundCheckReport check_lambda_integrals(int envelope_case, int n_r = 24, int threads = 0);

}  // namespace abr::verify
