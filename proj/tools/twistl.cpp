#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twistl/verify.hpp"

namespace {

using namespace twistl;

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;

void require_file(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw ConfigError("no such file: " + path);
}

int cmd_verify(const std::string& suite, const std::string& report, const std::string& eigendata, i64 c_max,
               bool quiet) {
    VerifyOptions opt;
    if (!eigendata.empty()) {
        require_file(eigendata);
        opt.eigendata_path = eigendata;
    }
    if (c_max > 0) opt.petersson_c_max = c_max;
    const auto rep = run_verify(suite, opt, [&](const CheckRow& r) {
        if (quiet && r.pass) return;
        std::printf("%-4s %-10s %-32s residual=%-12.4g budget=%-8.3g %6.1fs  %s\n", r.pass ? "ok" : "FAIL",
                    r.suite.c_str(), r.identity.c_str(), r.residual, r.budget, r.seconds, r.parameters.c_str());
        if (!r.pass && !r.detail.empty()) std::printf("     %s\n", r.detail.c_str());
        std::fflush(stdout);
    });
    const auto& c = rep.conventions;
    std::printf("sign conventions: twisted_sum=%s poisson_n2=%s congruence_sign=%+d\n", to_string(c.twisted_sum),
                to_string(c.poisson_n2), c.poisson_n2_sign);
    if (!report.empty()) {
        std::ofstream os(report, std::ios::binary);
        if (!os) throw ConfigError("cannot open " + report + " for writing");
        write_verify_csv(os, rep);
    }
    if (const CheckRow* bad = rep.first_failure()) {
        std::fprintf(stderr, "verification failed: %s/%s (%s)%s%s\n", bad->suite.c_str(), bad->identity.c_str(),
                     bad->parameters.c_str(), bad->detail.empty() ? "" : ": ", bad->detail.c_str());
        return exit_failure;
    }
    std::printf("%zu checks passed\n", rep.rows.size());
    return exit_ok;
}

int cmd_eigendata_compute(i64 q, i64 n_max, const std::string& out) {
    if (!is_prime(q)) throw ConfigError("--q must be prime");
    if (n_max < 30) throw ConfigError("--nmax must be at least 30");
    const auto forms = newform_eigendata(q, n_max);
    if (out.empty() || out == "-") {
        for (const auto& f : forms) export_eigendata(std::cout, f);
    } else {
        export_eigendata(out, forms);
        std::fprintf(stderr, "wrote %zu forms of level %lld to %s\n", forms.size(), static_cast<long long>(q), out.c_str());
    }
    return exit_ok;
}

int cmd_eigendata_ingest(const std::string& path) {
    require_file(path);
    const auto forms = ingest_eigendata(path);
    for (const auto& f : forms)
        std::printf("level=%lld weight=%d form=%d fricke=%+d n_max=%lld %s\n", static_cast<long long>(f.level), f.weight,
                    f.form, f.fricke_sign, static_cast<long long>(f.n_max()), f.integral() ? "integral" : "decimal");
    std::printf("%zu forms validated\n", forms.size());
    return exit_ok;
}

std::vector<NewformEigendata> load_forms(i64 q, int k, i64 need, const std::string& eigendata) {
    std::vector<NewformEigendata> forms;
    if (!eigendata.empty()) {
        require_file(eigendata);
        for (auto& f : ingest_eigendata(eigendata))
            if (f.level == q && f.weight == k) forms.push_back(std::move(f));
        if (forms.empty()) throw ConfigError("no forms of level " + std::to_string(q) + " and weight " +
                                             std::to_string(k) + " in " + eigendata);
        for (const auto& f : forms)
            if (f.n_max() < need) throw EigendataTooShort(need, f.n_max());
        return forms;
    }
    if (k != 2) throw ConfigError("weight " + std::to_string(k) + " needs --eigendata");
    return newform_eigendata(q, need);
}

int cmd_moment(i64 q, i64 p, int k, const std::string& label, const std::string& eigendata, double mult, i64 c_max) {
    if (!is_prime(q) || !is_prime(p) || p < 3) throw ConfigError("--q and --p must be primes, p odd");
    if (q == p) throw ConfigError("--q and --p must differ");
    if (mult < 1.0) throw ConfigError("--afe-mult must be >= 1");
    std::vector<DirichletCharacter> chars;
    if (label.empty()) {
        chars = characters_mod(p);
    } else {
        chars.push_back(parse_character(label));
        if (chars.front().modulus() != p) throw ConfigError("--char modulus differs from --p");
        if (!chars.front().is_primitive()) throw ConfigError("--char must be nontrivial");
    }
    const i64 need = std::max<i64>({30, required_n_max(q, p, k, mult), static_cast<i64>(2.0 * analytic_scale(q, p)) + 1});
    const auto forms = load_forms(q, k, need, eigendata);

    std::optional<HarmonicWeights> weights;
    std::string weight_error;
    try {
        weights = solve_harmonic_weights(forms, q, k, default_probes(forms.size(), q), c_max);
    } catch (const Error& e) {
        weight_error = e.what();
    }

    std::printf("q=%lld p=%lld k=%d dim=%zu genus=%lld\n", static_cast<long long>(q), static_cast<long long>(p), k,
                forms.size(), static_cast<long long>(genus_x0(q)));
    if (weights) {
        std::printf("harmonic weights (c_max=%lld):", static_cast<long long>(c_max));
        for (const double w : weights->omega) std::printf(" %.10g", w);
        std::printf("\n");
    } else {
        std::printf("harmonic weights unavailable: %s\n", weight_error.c_str());
    }
    std::printf("character,form,re_L,im_L,abs_eps_minus_1,afe_length,error_estimate\n");
    for (const auto& chi : chars) {
        for (const auto& f : forms) {
            const auto cv = central_value(f, chi, mult);
            std::printf("%s,%d,%.12g,%.12g,%.3g,%lld,%.3g\n", chi.label().c_str(), f.form, cv.value.real(),
                        cv.value.imag(), std::abs(cv.root_number) - 1.0, static_cast<long long>(cv.afe_length),
                        cv.error_estimate);
        }
    }
    std::printf("character,moment_natural,moment_harmonic,ratio\n");
    for (const auto& chi : chars) {
        const double nat = twisted_moment(forms, chi, Weighting::natural, nullptr, mult).moment;
        const std::string harm =
            weights ? format_number(twisted_moment(forms, chi, Weighting::harmonic, &*weights).moment) : std::string("nan");
        std::printf("%s,%s,%s,%s\n", chi.label().c_str(), format_number(nat).c_str(), harm.c_str(),
                    format_number(nat / static_cast<double>(q + p)).c_str());
    }
    return exit_ok;
}

int cmd_scan(const std::string& config, const std::string& out, std::optional<unsigned> workers,
             std::optional<i64> c_max, std::optional<double> mult, bool timing) {
    require_file(config);
    ScanConfig cfg = load_scan_config(config);
    if (workers) cfg.workers = *workers;
    if (c_max) cfg.c_max = *c_max;
    if (mult) cfg.afe_length_multiplier = *mult;
    if (timing) cfg.record_timing = true;
    if (!out.empty()) cfg.output = out;
    if (cfg.output.empty()) throw ConfigError("no output path (use --out or the config's output field)");
    const auto res = run_scan(cfg);
    write_scan_csv(cfg.output, res, cfg.record_timing);
    const auto& s = res.summary;
    std::printf("%zu records (%zu failed) -> %s\n", s.records, s.failures, cfg.output.c_str());
    std::printf("max moment/(q+p) = %.6g, max |L|/(sqrt q + sqrt p) = %.6g\n", s.max_ratio, s.max_l_ratio);
    std::printf("diagonal trend: %zu cells, spearman rho = %.4f, one-sided p = %.4g (%s)\n", s.trend.cells, s.trend.rho,
                s.trend.p_value, s.trend.significant ? "significant" : "not significant");
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"twistl: twisted L-function moments and the identities behind them"};
    app.require_subcommand(1);

    std::string suite = "all", report, verify_eigendata;
    i64 verify_c_max = 0;
    bool quiet = false;
    auto* verify = app.add_subcommand("verify", "run the identity and oracle suites");
    verify->add_option("suite", suite, "all | characters | exp-sums | special | petersson | lfunctions");
    verify->add_option("--report", report, "write the report CSV here");
    verify->add_option("--eigendata", verify_eigendata, "also ingest and validate this eigendata file");
    verify->add_option("--c-max", verify_c_max, "truncation for the quick trace-formula checks");
    verify->add_flag("--quiet", quiet, "print failures only");

    auto* eig = app.add_subcommand("eigendata", "compute or ingest newform eigendata");
    eig->require_subcommand(1);
    i64 eq = 0, nmax = 0;
    std::string eout, epath;
    auto* compute = eig->add_subcommand("compute", "weight-2 newforms of prime level via modular symbols");
    compute->add_option("--q", eq, "prime level")->required();
    compute->add_option("--nmax", nmax, "largest n")->required();
    compute->add_option("--out", eout, "output file (stdout if omitted)");
    auto* ingest = eig->add_subcommand("ingest", "validate an eigendata file");
    ingest->add_option("path", epath)->required();

    i64 mq = 0, mp = 0, mc = default_dual_c_max;
    int mk = 2;
    double mmult = 1.0;
    std::string mchar, meig;
    auto* moment = app.add_subcommand("moment", "central values and second moments for one (q, p)");
    moment->add_option("--q", mq, "prime level")->required();
    moment->add_option("--p", mp, "prime character modulus")->required();
    moment->add_option("--k", mk, "weight");
    moment->add_option("--char", mchar, "single character p:a");
    moment->add_option("--eigendata", meig, "eigendata file (required for k > 2)");
    moment->add_option("--afe-mult", mmult, "AFE length multiplier");
    moment->add_option("--c-max", mc, "Petersson truncation for the harmonic weights");

    std::string sconfig, sout;
    std::optional<unsigned> sworkers;
    std::optional<i64> scmax;
    std::optional<double> smult;
    bool stiming = false;
    auto* scan = app.add_subcommand("scan", "grid scan of moments over (q, p, chi)");
    scan->add_option("--config", sconfig, "JSON config")->required();
    scan->add_option("--out", sout, "CSV output (overrides the config)");
    scan->add_option("--workers", sworkers, "worker threads (overrides the config)");
    scan->add_option("--c-max", scmax, "Petersson truncation (overrides the config)");
    scan->add_option("--afe-mult", smult, "AFE length multiplier (overrides the config)");
    scan->add_flag("--timing", stiming, "fill runtime_ms");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (verify->parsed()) return cmd_verify(suite, report, verify_eigendata, verify_c_max, quiet);
        if (compute->parsed()) return cmd_eigendata_compute(eq, nmax, eout);
        if (ingest->parsed()) return cmd_eigendata_ingest(epath);
        if (moment->parsed()) return cmd_moment(mq, mp, mk, mchar, meig, mmult, mc);
        if (scan->parsed()) return cmd_scan(sconfig, sout, sworkers, scmax, smult, stiming);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_failure;
    }
    return exit_config;
}
