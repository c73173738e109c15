#include "abr/cli.hpp"
#include "abr/kernel.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace abr;
using namespace abr::cli;

namespace {

struct GridFlags {
    CLI::Option* n_r = nullptr;
    CLI::Option* n_theta = nullptr;
    CLI::Option* r_min = nullptr;
    CLI::Option* r_max = nullptr;
    GridSpec values;

    void add(CLI::App* sub) {
        n_r = sub->add_option("--n-r", values.n_r, "radial cells");
        n_theta = sub->add_option("--n-theta", values.n_theta, "angular cells");
        r_min = sub->add_option("--r-min", values.r_min, "inner radius");
        r_max = sub->add_option("--r-max", values.r_max, "outer radius");
    }
    void apply(GridSpec& g) const {
        if (n_r->count()) g.n_r = values.n_r;
        if (n_theta->count()) g.n_theta = values.n_theta;
        if (r_min->count()) g.r_min = values.r_min;
        if (r_max->count()) g.r_max = values.r_max;
    }
    bool any() const { return n_r->count() || n_theta->count() || r_min->count() || r_max->count(); }
};

json cplx_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/" + name);
    if (!out) throw std::runtime_error("cannot write " + cfg.out_dir + "/" + name);
    return out;
}

void persist_config(const RunConfig& cfg) {
    auto out = open_out(cfg, "run_config.json");
    out << cfg.to_json().dump(2) << '\n';
}

int run_verify(const std::string& suite, const RunConfig& cfg) {
    const auto reports = run_suite(suite, cfg);
    const ConstantsLedger ledger(ConstantsLedger::default_path(cfg.out_dir));
    json arr = json::array();
    bool ok = true;
    for (const auto& r : reports) {
        ledger.record(ledger_entry(r, cfg.hash()));
        arr.push_back(report_json(r));
        ok = ok && r.pass;
        std::cout << r.claim_id << ' ' << r.verdict() << " constant=" << format_double(r.max_ratio) << '\n';
    }
    const json summary{{"suite", suite}, {"config_hash", cfg.hash()}, {"config", cfg.to_json()}, {"reports", arr}};
    open_out(cfg, "verify_" + suite + ".json") << summary.dump(2) << '\n';
    auto csv = open_out(cfg, "verify_" + suite + "_worst.csv");
    write_worst_csv(csv, reports);
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resolvent kernel evaluation and bound verification for Aharonov-Bohm type operators"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_dir;
    int threads = 0;
    auto* config_opt = app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    auto* threads_opt = app.add_option("--threads", threads, "worker threads (0 = all cores)");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    (void)config_opt;

    double alpha = 0.5, sigma_re = -1.0, sigma_im = 0.0, boundary_lambda = 0.0;
    int branch = 1;
    std::vector<double> xs, ys;
    auto* ek = app.add_subcommand("eval-kernel", "evaluate the resolvent kernel at one point pair");
    auto* ek_alpha = ek->add_option("--alpha", alpha, "constant flux in (-1, 1)");
    ek->add_option("--sigma-re", sigma_re, "Re sigma");
    ek->add_option("--sigma-im", sigma_im, "Im sigma");
    auto* ek_boundary = ek->add_option("--boundary", boundary_lambda, "boundary value lambda^2 +- i0 instead of sigma");
    ek->add_option("--branch", branch, "boundary branch, +1 or -1")->check(CLI::IsMember({-1, 1}));
    ek->add_option("--x", xs, "r,theta")->delimiter(',')->expected(2)->required();
    ek->add_option("--y", ys, "r,theta")->delimiter(',')->expected(2)->required();

    double p = 1.2, q = 6.0;
    std::string regime = "iii";
    std::vector<double> deltas{0.1, 0.01, 0.001};
    GridFlags scan_grid;
    auto* ss = app.add_subcommand("scan-sigma", "probe-norm sweep over sigma for one regime");
    auto* ss_alpha = ss->add_option("--alpha", alpha, "constant flux in (-1, 1)");
    ss->add_option("--p", p, "source exponent");
    ss->add_option("--q", q, "target exponent");
    ss->add_option("--regime", regime, "i, ii or iii")->check(CLI::IsMember({"i", "ii", "iii"}));
    ss->add_option("--deltas", deltas, "comma-separated delta values")->delimiter(',');
    scan_grid.add(ss);

    std::string suite;
    long samples = 0;
    std::uint64_t seed = 0;
    auto* vb = app.add_subcommand("verify-bounds", "run a verification suite and record constants");
    vb->add_option("--suite", suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
    auto* vb_samples = vb->add_option("--samples", samples, "samples per claim for sampled suites");
    auto* vb_seed = vb->add_option("--seed", seed, "sampling seed");
    auto* ca = app.add_subcommand("check-appendix", "alias for verify-bounds --suite appendix");
    auto* ca_samples = ca->add_option("--samples", samples, "accepted for symmetry; the appendix grids are fixed");
    auto* ca_seed = ca->add_option("--seed", seed, "sampling seed");

    std::string potentials_path;
    bool no_dense = false;
    GridFlags eig_grid;
    auto* eb = app.add_subcommand("eigen-bounds", "eigenvalues of disc potentials against the uniform bound");
    eb->add_option("--potentials", potentials_path, "JSON list of {radius, re, im}")->check(CLI::ExistingFile);
    auto* eb_alpha = eb->add_option("--alpha", alpha, "constant flux in (-1, 1)");
    eb->add_flag("--no-dense", no_dense, "skip the dense eigensolve cross-check");
    eig_grid.add(eb);

    auto* st = app.add_subcommand("selftest", "small deterministic runs of every module, written as CSV");
    auto* st_seed = st->add_option("--seed", seed, "sampling seed");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (threads_opt->count()) cfg.threads = threads;
        if (out_opt->count()) cfg.out_dir = out_dir;
        for (auto* o : {ek_alpha, ss_alpha, eb_alpha})
            if (o->count()) cfg.alpha = alpha;
        for (auto* o : {vb_samples, ca_samples})
            if (o->count()) cfg.samples = samples;
        for (auto* o : {vb_seed, ca_seed, st_seed})
            if (o->count()) cfg.seed = seed;

        if (ek->parsed()) {
            cfg.command = "eval-kernel";
            cfg.validate();
            const auto sp = ek_boundary->count() ? SpectralParameter::boundary(boundary_lambda, branch)
                                                 : SpectralParameter::off_axis(cplx(sigma_re, sigma_im));
            const PolarPoint x{xs[0], xs[1]}, y{ys[0], ys[1]};
            KernelOptions ko;
            ko.tol = std::min(cfg.tol, 1e-10);
            const auto v = resolvent_kernel(CirculationProfile::constant(cfg.alpha), sp, x, y, ko);
            json out{{"alpha", cfg.alpha}, {"x", xs},          {"y", ys},
                     {"g1", cplx_json(v.g1)}, {"g2", cplx_json(v.g2)}, {"d1", cplx_json(v.d1)},
                     {"d2", cplx_json(v.d2)}, {"total", cplx_json(v.total)}, {"converged", v.converged}};
            if (cfg.alpha == 0.0) out["free_oracle"] = cplx_json(free_oracle(sp, x, y));
            std::cout << out.dump(2) << '\n';
            return v.converged ? 0 : 1;
        }
        if (ss->parsed()) {
            cfg.command = "scan-sigma";
            scan_grid.apply(cfg.grid);
            cfg.validate();
            validate_exponents(p, q);
            persist_config(cfg);
            AssemblyOptions ao;
            ao.threads = cfg.threads;
            const auto scan = sigma_scan(CirculationProfile::constant(cfg.alpha), p, q, parse_regime(regime), deltas,
                                         cfg.grid, ao);
            auto csv = open_out(cfg, "scan_sigma.csv");
            csv << "delta,regime,probe_id,ratio\n";
            for (const auto& r : scan.rows)
                csv << format_double(r.delta) << ',' << regime_name(r.regime) << ',' << r.probe_id << ','
                    << format_double(r.ratio) << '\n';
            const json summary{{"alpha", cfg.alpha}, {"p", p},          {"q", q},
                               {"regime", regime},   {"deltas", deltas}, {"best", scan.best},
                               {"envelope", scan.envelope}, {"spread", scan.spread},
                               {"verdict", scan.uniform ? "uniform" : "not uniform"}};
            open_out(cfg, "scan_sigma.json") << summary.dump(2) << '\n';
            std::cout << summary.dump(2) << '\n';
            return scan.uniform ? 0 : 1;
        }
        if (vb->parsed() || ca->parsed()) {
            if (ca->parsed()) suite = "appendix";
            cfg.command = "verify-bounds";
            cfg.validate();
            persist_config(cfg);
            return run_verify(suite, cfg);
        }
        if (eb->parsed()) {
            cfg.command = "eigen-bounds";
            if (!eig_grid.any()) cfg.grid = coarse_eigen_grid();
            eig_grid.apply(cfg.grid);
            cfg.validate();
            persist_config(cfg);
            const auto pots = potentials_path.empty() ? default_potentials() : load_potentials(potentials_path);
            const auto sum = run_eigen_bounds(pots, cfg.alpha, cfg.grid, cfg.threads, !no_dense);
            json cases = json::array();
            auto csv = open_out(cfg, "eigen_bounds.csv");
            csv << "case,v_re,v_im,radius,eig_re,eig_im,ratio_sqrt_abs_over_norm\n";
            for (std::size_t k = 0; k < sum.cases.size(); ++k) {
                const auto& c = sum.cases[k];
                json eig = json::array();
                for (cplx z : c.eigenvalues) {
                    eig.push_back(cplx_json(z));
                    const double ratio = std::sqrt(std::abs(z)) / c.potential_norm;
                    csv << k << ',' << format_double(c.potential.value.real()) << ','
                        << format_double(c.potential.value.imag()) << ',' << format_double(c.potential.radius) << ','
                        << format_double(z.real()) << ',' << format_double(z.imag()) << ',' << format_double(ratio)
                        << '\n';
                }
                cases.push_back({{"potential", cplx_json(c.potential.value)},
                                 {"radius", c.potential.radius},
                                 {"potential_norm", c.potential_norm},
                                 {"eigenvalues", eig},
                                 {"max_ratio", c.max_ratio},
                                 {"dense_count", c.dense.size()},
                                 {"counts_match", c.counts_match},
                                 {"max_mismatch", c.max_mismatch}});
            }
            const json summary{{"claim_id", "eigenvalue_bound_constant"},
                               {"constant", sum.constant},
                               {"max_mismatch", sum.max_mismatch},
                               {"free_resolvent_norm", sum.free_resolvent_norm},
                               {"config_hash", cfg.hash()},
                               {"cases", cases}};
            open_out(cfg, "eigen_bounds.json") << summary.dump(2) << '\n';
            const ConstantsLedger ledger(ConstantsLedger::default_path(cfg.out_dir));
            long found = 0;
            for (const auto& c : sum.cases) found += static_cast<long>(c.eigenvalues.size());
            bool counts = true;
            for (const auto& c : sum.cases) counts = counts && c.counts_match;
            const bool ok = no_dense || (counts && sum.max_mismatch <= 1e-4);
            ledger.record({"eigenvalue_bound_constant", sum.constant, found, ok ? "pass" : "fail", cfg.hash()});
            std::cout << "eigenvalue_bound_constant " << format_double(sum.constant) << " eigenvalues=" << found
                      << " max_mismatch=" << format_double(sum.max_mismatch) << '\n';
            return ok ? 0 : 1;
        }
        if (st->parsed()) {
            cfg.command = "selftest";
            cfg.validate();
            persist_config(cfg);
            auto csv = open_out(cfg, "selftest.csv");
            write_selftest_csv(csv, cfg);
            std::cout << cfg.out_dir << "/selftest.csv\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
