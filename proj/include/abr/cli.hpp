#pragma once
//! Run configuration, constants ledger, report serialization and suite dispatch shared by the command-line
//! tool and the acceptance runner.

#include "abr/analysis.hpp"
#include "abr/oscillatory.hpp"
#include "abr/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace abr::cli {

using json = nlohmann::json;

struct RunConfig {
    std::string command;
    double alpha = 0.5;
    GridSpec grid{};
    double tol = 1e-9;
    std::uint64_t seed = 1;
    long samples = 10000;
    int threads = 0;
    std::string out_dir = ".";

    //! Throws std::invalid_argument naming the violated constraint.
    void validate() const;
    json to_json() const;
    //! Missing keys keep their defaults; unknown keys are an error.
    static RunConfig from_json(const json& j);
    //! FNV-1a of the canonical JSON dump, as 16 hex digits. out_dir and threads are excluded.
    std::string hash() const;
};

RunConfig load_config(const std::string& path);

// ---------------------------------------------------------------------------------------------
// Constants ledger: JSON lines, append-only.

struct LedgerEntry {
    std::string claim_id;
    double constant = 0.0;
    long samples = 0;
    std::string verdict;
    std::string config_hash;
};

class ConstantsLedger {
public:
    explicit ConstantsLedger(std::string path);
    //! AB_RESOLVENT_LEDGER if set, else <out_dir>/constants_ledger.jsonl.
    static std::string default_path(const std::string& out_dir);

    const std::string& path() const { return path_; }
    void record(const LedgerEntry& e) const;
    //! Latest entry for the claim; throws std::out_of_range for an unknown claim or a missing file.
    LedgerEntry read(const std::string& claim_id) const;
    std::vector<LedgerEntry> entries() const;

private:
    std::string path_;
};

LedgerEntry ledger_entry(const verify::BoundCheckReport& r, const std::string& config_hash);

// ---------------------------------------------------------------------------------------------
// Reports

json report_json(const verify::BoundCheckReport& r);
//! claim_id,rank,j,ratio,params with params as key=value pairs joined by ';'. Numbers use %.17g.
void write_worst_csv(std::ostream& os, const std::vector<verify::BoundCheckReport>& reports);
std::string format_double(double v);

// ---------------------------------------------------------------------------------------------
// Suites

const std::vector<std::string>& suite_names();

//! direct, multiplier, diffractive, schur, appendix, bfacts, lemma3. Sampled suites use cfg.samples
//! per claim; grid suites use their default grids.
std::vector<verify::BoundCheckReport> run_suite(const std::string& suite, const RunConfig& cfg);

//! ‖(1+|x|)^{-1/2}‖_q^q growth with r_max: q = 4 grows by 2π ln 10 per decade, q = 6 converges to π.
verify::BoundCheckReport check_envelope_integrability();

// ---------------------------------------------------------------------------------------------
// Oscillatory fixture corpus

struct CorpusFixture {
    std::string id;
    std::string phase;      //!< linear, quadratic, cubic_shift, cosh_distance
    std::string amplitude;  //!< one, bump
    std::vector<double> params;
    double a = 0.0, b = 1.0;
    std::string kind;  //!< nonstationary or stationary
    int order = 0;     //!< van der Corput order for stationary fixtures
};

std::vector<CorpusFixture> load_corpus(const std::string& path);
OscillatoryProblem make_problem(const CorpusFixture& f);

struct CorpusRow {
    std::string id;
    std::string kind;
    double measure = 0.0;  //!< fitted slope (nonstationary) or max ratio (stationary)
    double drift = 0.0;    //!< stationary only
    bool pass = false;
};

//! Nonstationary fixtures: decay slope ≤ -K. Stationary fixtures: finite max ratio with drift ≤ max_drift.
std::vector<CorpusRow> run_corpus(const std::vector<CorpusFixture>& fixtures, int K, double max_drift = 1.5);

// ---------------------------------------------------------------------------------------------
// Eigenvalue bounds

struct EigenCase {
    DiscPotential potential;
    std::vector<cplx> eigenvalues;
    std::vector<cplx> dense;
    double potential_norm = 0.0;  //!< Σ w|V|^{3/2}
    double max_ratio = 0.0;
    double max_mismatch = 0.0;  //!< max relative distance from a located eigenvalue to the dense spectrum
    bool counts_match = false;
};

struct EigenSummary {
    std::vector<EigenCase> cases;
    double constant = 0.0;  //!< max |λ|^{1/2}/Σw|V|^{3/2} over all cases
    double max_mismatch = 0.0;
    double free_resolvent_norm = 0.0;
};

//! 20 discs of radius 1: strengths {2, 4, 6, 8} × phases {π, 3π/4, 5π/4, π/2, 3π/2}.
std::vector<DiscPotential> default_potentials();
std::vector<DiscPotential> load_potentials(const std::string& path);
EigenSummary run_eigen_bounds(const std::vector<DiscPotential>& potentials, double alpha, const GridSpec& grid,
                              int threads, bool with_dense = true);

//! Coarse eigenvalue grid: 24 radial × 32 angular cells on [10⁻³, 8].
GridSpec coarse_eigen_grid();

// ---------------------------------------------------------------------------------------------
// Self-test

//! Small deterministic runs across every module, as CSV rows section,key,value.
void write_selftest_csv(std::ostream& os, const RunConfig& cfg);

}  // namespace abr::cli
