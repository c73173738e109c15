#include "abr/cli.hpp"
#include "abr/kernel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace abr;
using namespace abr::cli;

namespace {

// Pinned tolerances.
constexpr double kCalibrationRelTol = 1e-6;
constexpr int kCalibrationPairs = 100;
constexpr double kUniformSpread = 2.0;
constexpr double kRefinementChange = 0.25;
constexpr long kDyadicSamples = 10000;
constexpr double kFlatSlope = 0.15;
constexpr double kSchurSlopeRel = 0.15;
constexpr long kAppendixMinPoints = 1000000;
constexpr double kSliceTol = 1e-8;
constexpr double kEigenMatchRel = 1e-4;
constexpr double kMaxDrift = 1.5;

struct Outcome {
    bool pass = false;
    std::string detail;
    json data = json::object();
};

struct Context {
    RunConfig cfg;
    ConstantsLedger ledger{""};
    std::vector<std::string> recorded;

    void record(const verify::BoundCheckReport& r) {
        ledger.record(ledger_entry(r, cfg.hash()));
        recorded.push_back(r.claim_id);
    }
    void record(const std::string& id, double c, long n, bool pass) {
        ledger.record({id, c, n, pass ? "pass" : "fail", cfg.hash()});
        recorded.push_back(id);
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

Outcome criterion1(Context& ctx) {
    const auto prof = CirculationProfile::constant(0.0);
    const auto sp = SpectralParameter::off_axis(-1.0);
    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_real_distribution<double> rad(0.05, 4.0), ang(0.0, kTwoPi);
    double worst = 0.0;
    for (int k = 0; k < kCalibrationPairs; ++k) {
        const PolarPoint x{rad(rng), ang(rng)}, y{rad(rng), ang(rng)};
        const cplx ref = free_oracle(sp, x, y);
        const cplx v = resolvent_kernel(prof, sp, x, y).total;
        worst = std::max(worst, std::abs(v - ref) / std::abs(ref));
    }
    const double c = kernel_calibration().constant;
    ctx.record("free_field_calibration", worst, kCalibrationPairs, worst <= kCalibrationRelTol);
    return {worst <= kCalibrationRelTol,
            "max relative error " + fmt(worst) + " over " + std::to_string(kCalibrationPairs) +
                " pairs (tol " + fmt(kCalibrationRelTol) + "), normalization " + fmt(c),
            {{"max_rel_error", worst}, {"normalization", c}}};
}

Outcome criterion2(Context& ctx) {
    const std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
    const std::pair<double, double> exps[] = {{1.2, 6.0}, {4.0 / 3.0 - 0.05, 12.0}};
    AssemblyOptions ao;
    ao.threads = ctx.cfg.threads;
    bool ok = true;
    std::string detail;
    json data = json::array();
    for (auto [p, q] : exps) {
        const auto scan =
            sigma_scan(CirculationProfile::constant(0.5), p, q, Regime::iii, deltas, GridSpec{}, ao);
        const bool pass = scan.spread < kUniformSpread;
        ok = ok && pass;
        ctx.record("uniform_probe_norm_p" + fmt(p) + "_q" + fmt(q), *std::max_element(scan.best.begin(), scan.best.end()),
                   static_cast<long>(scan.rows.size()), pass);
        detail += "(p,q)=(" + fmt(p) + "," + fmt(q) + ") spread " + fmt(scan.spread) + "; ";
        data.push_back({{"p", p}, {"q", q}, {"best", scan.best}, {"spread", scan.spread}});
    }
    return {ok, detail + "limit " + fmt(kUniformSpread), {{"scans", data}}};
}

bool grid_pass(const verify::BoundCheckReport& r) {
    return std::isfinite(r.max_ratio) && r.refinement_change() < kRefinementChange;
}

Outcome grid_suite(Context& ctx, const std::vector<verify::BoundCheckReport>& reps) {
    bool ok = true;
    std::string detail;
    json data = json::array();
    for (const auto& r : reps) {
        const bool pass = grid_pass(r) && r.pass;
        ok = ok && pass;
        ctx.record(r);
        detail += r.claim_id + " C=" + fmt(r.max_ratio) + " (refined change " + fmt(r.refinement_change()) + "); ";
        data.push_back(report_json(r));
    }
    return {ok, detail, {{"reports", data}}};
}

Outcome criterion3(Context& ctx) {
    return grid_suite(ctx, {verify::check_lambda_integrals(1, 24, ctx.cfg.threads),
                            verify::check_lambda_integrals(2, 24, ctx.cfg.threads)});
}

Outcome criterion4(Context& ctx) {
    RunConfig c = ctx.cfg;
    return grid_suite(ctx, run_suite("bfacts", c));
}

Outcome criterion5(Context& ctx) {
    verify::SweepOptions so;
    so.samples = kDyadicSamples;
    so.seed = ctx.cfg.seed;
    so.threads = ctx.cfg.threads;
    so.flat_tolerance = kFlatSlope;
    std::vector<verify::BoundCheckReport> reps;
    reps.push_back(verify::check_direct_dyadic(so));
    reps.push_back(verify::check_multiplier_bound(so));
    for (int ell : {1, 2, 3})
        for (auto& r : verify::check_diffractive_dyadic(ell, so)) reps.push_back(std::move(r));
    bool ok = true;
    std::string detail, failing;
    json data = json::array();
    for (const auto& r : reps) {
        const bool pass = r.pass && r.sample_count >= kDyadicSamples * 99 / 100 && std::abs(r.slope) <= kFlatSlope;
        ok = ok && pass;
        ctx.record(r);
        detail += r.claim_id + " slope " + fmt(r.slope) + " C=" + fmt(r.max_ratio) + (pass ? "" : " FAIL") + "; ";
        data.push_back(report_json(r));
    }
    return {ok, detail + "flat band +-" + fmt(kFlatSlope), {{"reports", data}}};
}

Outcome criterion6(Context& ctx) {
    verify::SchurOptions so;
    so.slope_rel_tolerance = kSchurSlopeRel;
    const auto schur = verify::check_schur_bound(1.2, 6.0, so);
    const auto env = check_envelope_integrability();
    ctx.record(schur);
    ctx.record(env);
    const bool ok = schur.pass && env.pass;
    return {ok,
            "slope " + fmt(schur.slope) + " vs " + fmt(schur.slope_target) + " (+-" + fmt(schur.slope_tolerance) +
                "); q=4 growth per decade " + fmt(env.extras[0].second) + " vs " + fmt(2.0 * kPi * std::log(10.0)) +
                ", q=6 norm " + fmt(env.extras[3].second),
            {{"schur", report_json(schur)}, {"envelope", report_json(env)}}};
}

Outcome criterion7(Context& ctx) {
    verify::AppendixGrid g;
    g.threads = ctx.cfg.threads;
    std::vector<verify::BoundCheckReport> reps;
    for (auto form : {verify::AppendixForm::reduced, verify::AppendixForm::angular})
        for (int k : {1, 2, 3}) reps.push_back(verify::check_appendix(k, form, g));
    auto out = grid_suite(ctx, reps);
    long points = 0;
    for (const auto& r : reps) points += r.points;
    double slice = 0.0, zero_flux = 0.0;
    for (double alpha : {-1.0, -0.5, 0.25, 0.9}) {
        for (double s : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
            const double a3 = alpha * alpha * alpha;
            const double taylor = alpha * s + s * s * (-a3 / 3.0 - alpha / 6.0) + a3 * s * s * s / 6.0;
            slice = std::max(slice, std::abs(verify::appendix_expression(s, 0.0, alpha, 0) - taylor));
            slice = std::max(slice, std::abs(verify::appendix_expression_b0(s, alpha, 0) - taylor));
        }
    }
    for (double s : {1e-6, 1e-3, 0.5, 1.0})
        for (double b : {0.0, 1e-4, 0.3, 2.0})
            for (int k : {0, 1}) zero_flux = std::max(zero_flux, std::abs(verify::appendix_expression(s, b, 0.0, k)));
    const bool ok = out.pass && points >= kAppendixMinPoints && slice <= kSliceTol && zero_flux <= kSliceTol;
    out.pass = ok;
    out.detail += "points " + std::to_string(points) + "; b=0 slice error " + fmt(slice) + "; zero-flux max " +
                  fmt(zero_flux);
    out.data["points"] = points;
    out.data["slice_error"] = slice;
    return out;
}

Outcome criterion8(Context& ctx) {
    const auto sum = run_eigen_bounds(default_potentials(), 0.5, coarse_eigen_grid(), ctx.cfg.threads, true);
    long found = 0;
    bool counts = true, bounded = true;
    for (const auto& c : sum.cases) {
        found += static_cast<long>(c.eigenvalues.size());
        counts = counts && c.counts_match;
        for (cplx z : c.eigenvalues) bounded = bounded && std::sqrt(std::abs(z)) <= sum.constant * c.potential_norm * (1 + 1e-12);
    }
    const bool ok = std::isfinite(sum.constant) && counts && bounded && sum.max_mismatch <= kEigenMatchRel;
    ctx.record("eigenvalue_bound_constant", sum.constant, found, ok);
    return {ok,
            std::to_string(sum.cases.size()) + " potentials, " + std::to_string(found) + " eigenvalues, C=" +
                fmt(sum.constant) + ", max mismatch vs dense " + fmt(sum.max_mismatch) + " (tol " +
                fmt(kEigenMatchRel) + ")" + (counts ? "" : ", eigenvalue counts differ"),
            {{"constant", sum.constant}, {"eigenvalues", found}, {"max_mismatch", sum.max_mismatch}}};
}

Outcome criterion9(Context& ctx, const std::string& corpus_path) {
    const auto fixtures = load_corpus(corpus_path);
    bool ok = true;
    std::string detail;
    json data = json::array();
    for (int K : {1, 2, 3}) {
        for (const auto& row : run_corpus(fixtures, K, kMaxDrift)) {
            if (row.kind == "stationary" && K != 1) continue;
            ok = ok && row.pass;
            data.push_back({{"id", row.id}, {"K", K}, {"measure", row.measure}, {"drift", row.drift}, {"pass", row.pass}});
            if (row.kind == "nonstationary")
                detail += row.id + " K=" + std::to_string(K) + " slope " + fmt(row.measure) + "; ";
            else {
                detail += row.id + " ratio " + fmt(row.measure) + " drift " + fmt(row.drift) + "; ";
                ctx.record("van_der_corput_" + row.id, row.measure, 1, row.pass);
            }
        }
    }
    return {ok, detail, {{"rows", data}}};
}

Outcome criterion10(Context& ctx) {
    std::string runs[2];
    for (int k = 0; k < 2; ++k) {
        const std::string path = ctx.cfg.out_dir + "/selftest_run" + std::to_string(k + 1) + ".csv";
        {
            std::ofstream out(path);
            write_selftest_csv(out, ctx.cfg);
        }
        std::ifstream in(path, std::ios::binary);
        runs[k].assign(std::istreambuf_iterator<char>(in), {});
    }
    const bool ok = !runs[0].empty() && runs[0] == runs[1];
    return {ok, std::to_string(runs[0].size()) + " bytes per run, " + (ok ? "identical" : "different"),
            {{"bytes", runs[0].size()}}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria 1-10"};
    std::string out_dir = "acceptance_out", corpus = ABR_CORPUS_PATH;
    int threads = 0;
    std::uint64_t seed = 1;
    std::vector<int> only;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
    app.add_option("--seed", seed, "sampling seed");
    app.add_option("--corpus", corpus, "oscillatory fixture corpus")->check(CLI::ExistingFile);
    app.add_option("--only", only, "run only these criteria")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    std::filesystem::create_directories(out_dir);
    Context ctx;
    ctx.cfg.command = "acceptance";
    ctx.cfg.out_dir = out_dir;
    ctx.cfg.threads = threads;
    ctx.cfg.seed = seed;
    const std::string ledger_path = out_dir + "/constants_ledger.jsonl";
    std::filesystem::remove(ledger_path);
    ctx.ledger = ConstantsLedger(ledger_path);

    const std::set<int> selected(only.begin(), only.end());
    json summary = json::object();
    bool all = true;
    for (int n = 1; n <= 10; ++n) {
        if (!selected.empty() && !selected.count(n)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            switch (n) {
                case 1: o = criterion1(ctx); break;
                case 2: o = criterion2(ctx); break;
                case 3: o = criterion3(ctx); break;
                case 4: o = criterion4(ctx); break;
                case 5: o = criterion5(ctx); break;
                case 6: o = criterion6(ctx); break;
                case 7: o = criterion7(ctx); break;
                case 8: o = criterion8(ctx); break;
                case 9: o = criterion9(ctx, corpus); break;
                case 10: o = criterion10(ctx); break;
            }
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        all = all && o.pass;
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " [" << fmt(secs) << " s] "
                  << o.detail << std::endl;
        o.data["pass"] = o.pass;
        o.data["seconds"] = secs;
        summary[std::to_string(n)] = o.data;
    }
    std::map<std::string, int> counts;
    for (const auto& id : ctx.recorded) ++counts[id];
    for (const auto& [id, c] : counts)
        if (c != 1) std::cout << "ledger: claim " << id << " recorded " << c << " times" << std::endl;
    std::ofstream(out_dir + "/acceptance_summary.json") << summary.dump(2) << '\n';
    std::cout << (all ? "all criteria passed" : "some criteria failed") << std::endl;
    return all ? 0 : 1;
}
