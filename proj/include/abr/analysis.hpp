#pragma once
//! Polar-grid discretization of the resolvent, probe-based L^p → L^q norm estimates, σ-sweeps and
//! Birman–Schwinger eigenvalue search.

#include "abr/kernel.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace abr {

//! Log-spaced radial cells on [r_min, r_max] with nodes at cell midpoints, uniform angles.
struct GridSpec {
    double r_min = 1e-3;
    double r_max = 16.0;
    int n_r = 96;
    int n_theta = 128;

    void validate() const;
    int size() const { return n_r * n_theta; }
    std::vector<double> edges() const;
    std::vector<double> radii() const;
    //! r·Δr·Δθ per radial index.
    std::vector<double> radial_weights() const;
    double dtheta() const;
    double angle(int a) const { return dtheta() * a; }
};

struct AssemblyOptions {
    double tol = 1e-9;
    int threads = 0;
    Cutoff cutoff{};
};

//! T f(x_i) = Σ_j K(x_i, y_j) w_j f_j on a polar grid. Vectors are indexed i·n_theta + a.
//! Stored in block-circulant form: kernel(r_i, θ_c; r_j, 0) for each c, plus the gauge of the profile.
class GridOperator {
public:
    const GridSpec& grid() const { return grid_; }
    const SpectralParameter& sigma() const { return sigma_; }
    int size() const { return grid_.size(); }

    std::vector<cplx> apply(const std::vector<cplx>& f) const;
    //! (T* f)(x) = Σ_y conj K(y, x) w_y f(y).
    std::vector<cplx> apply_adjoint(const std::vector<cplx>& f) const;

    //! K(x_row, y_col)·w_col; the diagonal holds the cell-averaged local integral.
    cplx entry(int row, int col) const;
    Eigen::MatrixXcd dense() const;

    //! Angular mode m: (n_r × n_r) matrix acting on the m-th Fourier coefficients of gauge-stripped data.
    Eigen::MatrixXcd mode_matrix(int m) const;

    //! kernel(r_i, θ_c; r_j, 0) for the mean flux (gauge not applied).
    cplx sample(int i, int j, int c) const;

    //! Quadrature failures during assembly, with node indices.
    const std::vector<std::string>& failures() const { return failures_; }

private:
    friend GridOperator assemble(const CirculationProfile&, const SpectralParameter&, const GridSpec&,
                                 const AssemblyOptions&);
    std::vector<cplx> apply_impl(const std::vector<cplx>& f, bool adjoint) const;

    GridSpec grid_;
    SpectralParameter sigma_ = SpectralParameter::off_axis(-1.0);
    std::vector<double> weights_;
    std::vector<cplx> gauge_;
    std::vector<cplx> samples_;  // [(i·n_r + j)·n_theta + c]
    std::vector<cplx> khat_;     // [m·n_r·n_r + i·n_r + j], DFT over c
    std::vector<std::string> failures_;
};

GridOperator assemble(const CirculationProfile& profile, const SpectralParameter& sigma, const GridSpec& grid,
                      const AssemblyOptions& opt = {});

//! ∫_0^ρ H₀⁽¹⁾(κt) t dt by its convergent series.
cplx hankel_disc_moment(cplx kappa, double rho);

// ---------------------------------------------------------------------------------------------
// Probes and norms

inline constexpr const char* kProbeFamilyVersion = "probes-v1";

struct Probe {
    std::string id;
    std::vector<cplx> values;
};

//! Gaussians (5 scales × 8 centres), annular indicators and e^{iωθ}g(r) with ω ∈ {0, ±1, ±3}.
//! Probes that vanish at every grid node are dropped.
std::vector<Probe> default_probes(const GridSpec& grid);

//! (Σ w|f|^p)^{1/p}; p = ∞ gives the max.
double discrete_norm(const GridSpec& grid, const std::vector<cplx>& f, double p);

//! Throws unless 1 ≤ p < 4/3, 4 < q ≤ ∞ and 2/3 ≤ 1/p - 1/q < 1.
void validate_exponents(double p, double q);

struct ProbeNormResult {
    double ratio = 0.0;          //!< max over probes of ‖Tf‖_q / ‖f‖_p
    std::string best_probe;
    std::vector<double> ratios;  //!< per probe, same order as the input family
};

ProbeNormResult probe_norm(const GridOperator& op, double p, double q, const std::vector<Probe>& probes,
                           bool adjoint = false, bool check_window = true);

// ---------------------------------------------------------------------------------------------
// σ-sweeps

enum class Regime { i, ii, iii };
Regime parse_regime(const std::string& s);
const char* regime_name(Regime r);

//! σ for a regime and δ: -√(1-δ²)+iδ, +√(1-δ²)+iδ (|δ| ≥ ε), or +√(1-δ²)+iδ / boundary at δ = 0.
SpectralParameter regime_sigma(Regime regime, double delta, double eps = 0.1);

struct ScanRow {
    double delta;
    Regime regime;
    std::string probe_id;
    double ratio;
};

struct SigmaScan {
    std::vector<ScanRow> rows;
    std::vector<double> deltas;
    std::vector<double> best;        //!< per δ
    std::vector<double> envelope;    //!< per δ: max |kernel| / (|log d|𝟙_{d≤3/4} + d^{-1}𝟙_{d>3/4}) over grid pairs
    double spread = 0.0;             //!< max(best) / min(best)
    bool uniform = false;            //!< spread < 2
};

SigmaScan sigma_scan(const CirculationProfile& profile, double p, double q, Regime regime,
                     const std::vector<double>& deltas, const GridSpec& grid, const AssemblyOptions& opt = {},
                     bool check_window = true);

//! Max over off-diagonal grid pairs of |kernel|/envelope(d).
double kernel_envelope_constant(const GridOperator& op);

//! ‖(A1 - A2) - (σ1 - σ2) A1 A2‖_F / ‖A1 - A2‖_F over all angular modes.
double resolvent_identity_residual(const GridOperator& a1, const GridOperator& a2);

//! ∫_0^∞ λ/(λ² - σ) a_±(λr) e^{±iλr} dλ with a_+(ρ) = (1 - χ(ρ)) H₀⁺(ρ) e^{-iρ}, a_- = conj(a_+).
cplx amplitude_lambda_integral(cplx sigma, double r, int sign, double tol = 1e-10);

// ---------------------------------------------------------------------------------------------
// Eigenvalues of the perturbed operator

struct DiscPotential {
    double radius = 1.0;
    cplx value = -1.0;
};

//! Cell-averaged V on each radial cell (area fraction inside the disc).
std::vector<cplx> radial_samples(const GridSpec& grid, const DiscPotential& v);

struct EigenOptions {
    double lambda_max = 4.0;
    double axis_gap = 1e-2;
    double sigma0 = -1.0;      //!< reference point of the discrete operator σ0 + T(σ0)^{-1}
    int tiles = 8;             //!< per side of the square [-λmax, λmax]²
    int edge_points = 24;      //!< Gauss points per rectangle edge; edges near [0,∞) use graded 8-point panels
    int probe_columns = 6;
    int threads = 0;
};

struct EigenReport {
    double gamma = 0.5;
    double potential_norm = 0.0;          //!< Σ w |V|^{γ+1}
    std::vector<cplx> eigenvalues;
    std::vector<int> modes;               //!< angular mode of each eigenvalue
    std::vector<double> ratios;           //!< |λ|^γ / potential_norm
    double max_ratio = 0.0;
    double free_resolvent_norm = 0.0;  //!< largest eigenvalue of the discrete free resolvent at sigma0
    std::vector<std::string> warnings;
};

//! Eigenvalues of σ0 + T(σ0)^{-1} + V in {|λ| ≤ λmax, dist(λ, [0,∞)) ≥ gap} via contour integrals of the
//! Birman–Schwinger family I + |V|^{1/2} R(λ) V^{1/2}, V^{1/2} = |V|^{1/2} sgn V. V is radial (per radial node).
EigenReport birman_schwinger_eigen(const GridOperator& t0, const std::vector<cplx>& radial_potential, double gamma,
                                   const EigenOptions& opt = {});

//! Same operator as a dense (n × n) matrix eigenproblem; eigenvalues inside the search region.
std::vector<cplx> dense_perturbed_eigenvalues(const GridOperator& t0, const std::vector<cplx>& radial_potential,
                                              const EigenOptions& opt = {});

//! Exact continuum eigenvalues for a constant disc potential at flux 1/2 (half-integer Bessel orders) or
//! flux 0 (integer orders): roots of the interior/exterior logarithmic-derivative match, per mode order.
std::vector<cplx> disc_potential_eigenvalues(double alpha, const DiscPotential& v, const EigenOptions& opt = {});

}  // namespace abr
