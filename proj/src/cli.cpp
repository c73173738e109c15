#include "abr/cli.hpp"

#include "abr/kernel.hpp"
#include "abr/specfun.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace abr::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

json grid_json(const GridSpec& g) {
    return {{"r_min", g.r_min}, {"r_max", g.r_max}, {"n_r", g.n_r}, {"n_theta", g.n_theta}};
}

json pairs_json(const std::vector<std::pair<std::string, double>>& v) {
    json o = json::object();
    for (const auto& [k, x] : v) o[k] = std::isfinite(x) ? json(x) : json(format_double(x));
    return o;
}

json number_or_string(double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); }

}  // namespace

// ---------------------------------------------------------------------------------------------
// RunConfig

void RunConfig::validate() const {
    if (!(alpha > -1.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (-1, 1)");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (samples < 1) throw std::invalid_argument("samples must be positive");
    if (threads < 0) throw std::invalid_argument("threads must be non-negative");
    grid.validate();
}

json RunConfig::to_json() const {
    return {{"command", command}, {"alpha", alpha},     {"grid", grid_json(grid)},  {"tol", tol},
            {"seed", seed},       {"samples", samples}, {"threads", threads},       {"out_dir", out_dir}};
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
    RunConfig c;
    for (const auto& [key, v] : j.items()) {
        if (key == "command") c.command = v.get<std::string>();
        else if (key == "alpha") c.alpha = v.get<double>();
        else if (key == "tol") c.tol = v.get<double>();
        else if (key == "seed") c.seed = v.get<std::uint64_t>();
        else if (key == "samples") c.samples = v.get<long>();
        else if (key == "threads") c.threads = v.get<int>();
        else if (key == "out_dir") c.out_dir = v.get<std::string>();
        else if (key == "grid") {
            for (const auto& [gk, gv] : v.items()) {
                if (gk == "r_min") c.grid.r_min = gv.get<double>();
                else if (gk == "r_max") c.grid.r_max = gv.get<double>();
                else if (gk == "n_r") c.grid.n_r = gv.get<int>();
                else if (gk == "n_theta") c.grid.n_theta = gv.get<int>();
                else throw std::invalid_argument("config: unknown grid key '" + gk + "'");
            }
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    return c;
}

std::string RunConfig::hash() const {
    json j = to_json();
    j.erase("out_dir");
    j.erase("threads");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    return RunConfig::from_json(json::parse(in));
}

// ---------------------------------------------------------------------------------------------
// Ledger

ConstantsLedger::ConstantsLedger(std::string path) : path_(std::move(path)) {}

std::string ConstantsLedger::default_path(const std::string& out_dir) {
    if (const char* env = std::getenv("AB_RESOLVENT_LEDGER"); env && *env) return env;
    return out_dir + "/constants_ledger.jsonl";
}

void ConstantsLedger::record(const LedgerEntry& e) const {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("ledger: cannot open " + path_ + " for appending");
    const json j{{"claim_id", e.claim_id},
                 {"constant", number_or_string(e.constant)},
                 {"samples", e.samples},
                 {"verdict", e.verdict},
                 {"config_hash", e.config_hash}};
    out << j.dump() << '\n';
}

std::vector<LedgerEntry> ConstantsLedger::entries() const {
    std::ifstream in(path_);
    if (!in) throw std::out_of_range("ledger: no ledger file at " + path_);
    std::vector<LedgerEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = json::parse(line);
        LedgerEntry e;
        e.claim_id = j.at("claim_id").get<std::string>();
        const auto& c = j.at("constant");
        e.constant = c.is_number() ? c.get<double>() : std::strtod(c.get<std::string>().c_str(), nullptr);
        e.samples = j.at("samples").get<long>();
        e.verdict = j.at("verdict").get<std::string>();
        e.config_hash = j.at("config_hash").get<std::string>();
        out.push_back(std::move(e));
    }
    return out;
}

LedgerEntry ConstantsLedger::read(const std::string& claim_id) const {
    const auto all = entries();
    for (auto it = all.rbegin(); it != all.rend(); ++it)
        if (it->claim_id == claim_id) return *it;
    throw std::out_of_range("ledger: unknown claim '" + claim_id + "'");
}

LedgerEntry ledger_entry(const verify::BoundCheckReport& r, const std::string& config_hash) {
    return {r.claim_id, r.max_ratio, r.sample_count, r.verdict(), config_hash};
}

// ---------------------------------------------------------------------------------------------
// Reports

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json report_json(const verify::BoundCheckReport& r) {
    json j{{"claim_id", r.claim_id},
           {"verdict", r.verdict()},
           {"constant", number_or_string(r.max_ratio)},
           {"samples", r.sample_count},
           {"skipped", r.skipped},
           {"failed", r.failed},
           {"points", r.points},
           {"worst_point", pairs_json(r.worst_point)}};
    if (!r.js.empty()) {
        j["js"] = r.js;
        j["max_ratio_by_j"] = r.max_ratio_by_j;
        j["slope"] = number_or_string(r.slope);
        j["slope_target"] = r.slope_target;
        j["slope_tolerance"] = r.slope_tolerance;
    }
    if (std::isfinite(r.refined_max_ratio)) {
        j["refined_constant"] = r.refined_max_ratio;
        j["refinement_change"] = r.refinement_change();
    }
    if (!r.extras.empty()) j["extras"] = pairs_json(r.extras);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

void write_worst_csv(std::ostream& os, const std::vector<verify::BoundCheckReport>& reports) {
    os << "claim_id,rank,j,ratio,params\n";
    auto params = [](const std::vector<std::pair<std::string, double>>& p) {
        std::string s;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (k) s += ';';
            s += p[k].first + '=' + format_double(p[k].second);
        }
        return s;
    };
    for (const auto& r : reports) {
        if (r.worst.empty()) {
            os << r.claim_id << ",0,," << format_double(r.max_ratio) << ',' << params(r.worst_point) << '\n';
            continue;
        }
        for (std::size_t k = 0; k < r.worst.size(); ++k) {
            const auto& w = r.worst[k];
            os << r.claim_id << ',' << k << ',' << w.j << ',' << format_double(w.ratio) << ',' << params(w.params)
               << '\n';
        }
    }
}

// ---------------------------------------------------------------------------------------------
// Suites

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"direct", "multiplier", "diffractive", "schur",
                                                "appendix", "bfacts", "lemma3"};
    return names;
}

verify::BoundCheckReport check_envelope_integrability() {
    const std::vector<double> radii{1e2, 1e3, 1e4, 1e5};
    const auto q4 = verify::envelope_norm_power(4.0, radii);
    const auto q6 = verify::envelope_norm_power(6.0, radii);
    verify::BoundCheckReport rep;
    rep.claim_id = "envelope_q4_divergence";
    const double per_decade = 2.0 * kPi * std::log(10.0);
    double worst = 0.0;
    for (std::size_t k = 1; k < radii.size(); ++k) {
        const double step = q4[k] - q4[k - 1];
        worst = std::max(worst, std::abs(step / per_decade - 1.0));
        rep.extras.push_back({"q4_growth_decade_" + std::to_string(k), step});
    }
    rep.extras.push_back({"q6_at_R1e5", q6.back()});
    rep.extras.push_back({"q6_limit", kPi});
    rep.max_ratio = q4.back();
    rep.points = static_cast<long>(2 * radii.size());
    rep.sample_count = rep.points;
    // q = 4: each decade adds 2π ln 10 up to O(1/R); q = 6 settles at π.
    rep.pass = worst < 0.02 && std::abs(q6.back() - kPi) < 1e-3;
    return rep;
}

std::vector<verify::BoundCheckReport> run_suite(const std::string& suite, const RunConfig& cfg) {
    using namespace verify;
    SweepOptions so;
    so.samples = cfg.samples;
    so.seed = cfg.seed;
    so.threads = cfg.threads;
    std::vector<BoundCheckReport> out;
    if (suite == "direct") {
        out.push_back(check_direct_dyadic(so));
    } else if (suite == "multiplier") {
        out.push_back(check_multiplier_bound(so, false));
        out.push_back(check_multiplier_bound(so, true));
    } else if (suite == "diffractive") {
        for (int ell : {1, 2, 3})
            for (auto& r : check_diffractive_dyadic(ell, so)) out.push_back(std::move(r));
        out.push_back(check_phase_derivatives(2000, cfg.seed));
    } else if (suite == "schur") {
        out.push_back(check_schur_bound(1.2, 6.0));
        out.push_back(check_schur_bound(1.0, kInf));
        out.push_back(check_envelope_integrability());
    } else if (suite == "appendix") {
        AppendixGrid g;
        g.threads = cfg.threads;
        for (auto form : {AppendixForm::reduced, AppendixForm::angular})
            for (int k : {1, 2, 3}) out.push_back(check_appendix(k, form, g));
    } else if (suite == "bfacts") {
        for (int f : {1, 2, 3}) out.push_back(check_B_facts(f));
        out.push_back(check_B_integrability());
        out.push_back(check_near_diffractive_log());
    } else if (suite == "lemma3") {
        out.push_back(check_lambda_integrals(1, 24, cfg.threads));
        out.push_back(check_lambda_integrals(2, 24, cfg.threads));
    } else {
        throw std::invalid_argument("unknown suite '" + suite +
                                    "' (expected direct, multiplier, diffractive, schur, appendix, bfacts or lemma3)");
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Corpus

std::vector<CorpusFixture> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("corpus: cannot open " + path);
    const auto j = json::parse(in);
    std::vector<CorpusFixture> out;
    for (const auto& e : j.at("fixtures")) {
        CorpusFixture f;
        f.id = e.at("id").get<std::string>();
        f.phase = e.at("phase").get<std::string>();
        f.amplitude = e.at("amplitude").get<std::string>();
        f.params = e.value("params", std::vector<double>{});
        f.a = e.at("a").get<double>();
        f.b = e.at("b").get<double>();
        f.kind = e.at("kind").get<std::string>();
        f.order = e.value("order", 0);
        if (f.kind != "nonstationary" && f.kind != "stationary")
            throw std::invalid_argument("corpus: fixture " + f.id + " has unknown kind " + f.kind);
        if (f.kind == "stationary" && f.order < 1)
            throw std::invalid_argument("corpus: stationary fixture " + f.id + " needs order >= 1");
        out.push_back(std::move(f));
    }
    return out;
}

OscillatoryProblem make_problem(const CorpusFixture& f) {
    OscillatoryProblem p;
    p.a = f.a;
    p.b = f.b;
    auto param = [&](std::size_t k, double dflt) { return k < f.params.size() ? f.params[k] : dflt; };
    if (f.phase == "linear") {
        const double c = param(0, 1.0);
        p.phase = [c](double x) { return c * x; };
        p.dphase = [c](double) { return c; };
        p.d2phase = [](double) { return 0.0; };
    } else if (f.phase == "quadratic") {
        p.phase = [](double x) { return 0.5 * x * x; };
        p.dphase = [](double x) { return x; };
        p.d2phase = [](double) { return 1.0; };
    } else if (f.phase == "cubic_shift") {
        const double c = param(0, 1.0);
        p.phase = [c](double x) { return x * x * x / 3.0 + c * x; };
        p.dphase = [c](double x) { return x * x + c; };
        p.d2phase = [](double x) { return 2.0 * x; };
    } else if (f.phase == "cosh_distance") {
        const double r1 = param(0, 0.5), r2 = param(1, 0.5);
        p.phase = [r1, r2](double s) { return diffractive_distance(r1, r2, s); };
        p.dphase = [r1, r2](double s) { return r1 * r2 * std::sinh(s) / diffractive_distance(r1, r2, s); };
        p.d2phase = [r1, r2](double s) {
            const double n = diffractive_distance(r1, r2, s), d1 = r1 * r2 * std::sinh(s) / n;
            return (r1 * r2 * std::cosh(s) - d1 * d1) / n;
        };
    } else {
        throw std::invalid_argument("corpus: unknown phase id '" + f.phase + "'");
    }
    if (f.amplitude == "one") {
        p.amplitude = [](double) { return cplx(1.0); };
    } else if (f.amplitude == "bump") {
        const double a = f.a, b = f.b;
        p.amplitude = [a, b](double x) {
            const double u = (2.0 * x - a - b) / (b - a);
            return std::abs(u) < 1.0 ? cplx(std::exp(-1.0 / (1.0 - u * u))) : cplx(0.0);
        };
    } else {
        throw std::invalid_argument("corpus: unknown amplitude id '" + f.amplitude + "'");
    }
    return p;
}

std::vector<CorpusRow> run_corpus(const std::vector<CorpusFixture>& fixtures, int K, double max_drift) {
    std::vector<CorpusRow> rows;
    for (const auto& f : fixtures) {
        const auto p = make_problem(f);
        CorpusRow row;
        row.id = f.id;
        row.kind = f.kind;
        if (f.kind == "nonstationary") {
            const auto fit = nonstationary_decay_check(p, K);
            row.measure = fit.slope;
            row.pass = fit.pass;
        } else {
            const auto v = van_der_corput_check(p, f.order);
            row.measure = v.max_ratio;
            row.drift = v.drift;
            row.pass = std::isfinite(v.max_ratio) && v.max_ratio > 0.0 && v.drift <= max_drift;
        }
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------------------------
// Eigenvalues

std::vector<DiscPotential> default_potentials() {
    std::vector<DiscPotential> out;
    for (double strength : {2.0, 4.0, 6.0, 8.0})
        for (double phase : {1.0, 0.75, 1.25, 0.5, 1.5}) out.push_back({1.0, std::polar(strength, phase * kPi)});
    return out;
}

std::vector<DiscPotential> load_potentials(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("potentials: cannot open " + path);
    const auto j = json::parse(in);
    std::vector<DiscPotential> out;
    for (const auto& e : j) {
        DiscPotential d;
        d.radius = e.value("radius", 1.0);
        d.value = cplx(e.value("re", 0.0), e.value("im", 0.0));
        if (!(d.radius > 0.0)) throw std::invalid_argument("potentials: radius must be positive");
        out.push_back(d);
    }
    return out;
}

GridSpec coarse_eigen_grid() {
    GridSpec g;
    g.r_min = 1e-3;
    g.r_max = 8.0;
    g.n_r = 24;
    g.n_theta = 32;
    return g;
}

EigenSummary run_eigen_bounds(const std::vector<DiscPotential>& potentials, double alpha, const GridSpec& grid,
                              int threads, bool with_dense) {
    AssemblyOptions ao;
    ao.threads = threads;
    EigenOptions eo;
    eo.threads = threads;
    const auto op = assemble(CirculationProfile::constant(alpha), SpectralParameter::off_axis(eo.sigma0), grid, ao);
    EigenSummary sum;
    for (const auto& v : potentials) {
        const auto pot = radial_samples(grid, v);
        const auto rep = birman_schwinger_eigen(op, pot, 0.5, eo);
        EigenCase c;
        c.potential = v;
        c.eigenvalues = rep.eigenvalues;
        c.max_ratio = rep.max_ratio;
        c.potential_norm = rep.potential_norm;
        sum.free_resolvent_norm = rep.free_resolvent_norm;
        if (with_dense) {
            c.dense = dense_perturbed_eigenvalues(op, pot, eo);
            c.counts_match = c.dense.size() == c.eigenvalues.size();
            for (cplx z : c.eigenvalues) {
                double best = kInf;
                for (cplx d : c.dense) best = std::min(best, std::abs(z - d));
                c.max_mismatch = std::max(c.max_mismatch, best / std::abs(z));
            }
        }
        sum.constant = std::max(sum.constant, c.max_ratio);
        sum.max_mismatch = std::max(sum.max_mismatch, c.max_mismatch);
        sum.cases.push_back(std::move(c));
    }
    return sum;
}

// ---------------------------------------------------------------------------------------------
// Self-test

void write_selftest_csv(std::ostream& os, const RunConfig& cfg) {
    using namespace verify;
    os << "section,key,value\n";
    auto row = [&](const std::string& sec, const std::string& key, double v) {
        os << sec << ',' << key << ',' << format_double(v) << '\n';
    };
    for (double r : {0.3, 5.0, 40.0}) {
        const cplx h = hankel0_plus(r);
        row("specfun", "hankel0_re_" + format_double(r), h.real());
        row("specfun", "hankel0_im_" + format_double(r), h.imag());
    }
    const auto prof = CirculationProfile::constant(cfg.alpha);
    const auto sp = SpectralParameter::off_axis(-1.0);
    const PolarPoint pts[][2] = {{{1.0, 0.0}, {1.0, 1.0}}, {{0.5, 0.3}, {1.7, 2.9}}, {{2.0, 0.0}, {0.4, kPi}}};
    int k = 0;
    for (const auto& pr : pts) {
        const auto v = resolvent_kernel(prof, sp, pr[0], pr[1]);
        row("kernel", "total_re_" + std::to_string(k), v.total.real());
        row("kernel", "total_im_" + std::to_string(k), v.total.imag());
        ++k;
    }
    SweepOptions so;
    so.samples = 70;
    so.seed = cfg.seed;
    so.threads = cfg.threads;
    auto sweep = [&](const BoundCheckReport& r) {
        row("verify", r.claim_id + "_max", r.max_ratio);
        for (std::size_t i = 0; i < r.js.size(); ++i)
            row("verify", r.claim_id + "_j" + std::to_string(r.js[i]), r.max_ratio_by_j[i]);
    };
    sweep(check_direct_dyadic(so));
    sweep(check_multiplier_bound(so));
    for (const auto& r : check_diffractive_dyadic(2, so)) sweep(r);
    AppendixGrid ag;
    ag.n_s = 20;
    ag.n_b = 20;
    ag.n_alpha = 11;
    const auto app = check_appendix(1, AppendixForm::reduced, ag);
    row("verify", app.claim_id + "_max", app.max_ratio);
    row("verify", app.claim_id + "_refined", app.refined_max_ratio);
    for (int f : {1, 2, 3}) row("verify", "bracket_fact_" + std::to_string(f), check_B_facts(f, 16).max_ratio);
    row("verify", "lambda_integral_case1", check_lambda_integrals(1, 6, cfg.threads).max_ratio);

    GridSpec g;
    g.r_min = 1e-3;
    g.r_max = 6.0;
    g.n_r = 10;
    g.n_theta = 12;
    AssemblyOptions ao;
    ao.threads = cfg.threads;
    const auto op = assemble(prof, SpectralParameter::from_delta(1, 0.1), g, ao);
    const auto pn = probe_norm(op, 1.2, 6.0, default_probes(g));
    row("analysis", "probe_norm_6_5_6", pn.ratio);
}

}  // namespace abr::cli
