// Acceptance run: one PASS/FAIL line per criterion. Exits 0 once every
// criterion has been evaluated; with --strict the exit code is the number of
// failing criteria. --report PATH also writes the criterion lines to PATH.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "twistl/verify.hpp"

using namespace twistl;

namespace {

struct Verdict {
    bool pass = true;
    std::string summary;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// folds check rows into a verdict and echoes them indented
Verdict from_rows(const std::vector<CheckRow>& rows) {
    Verdict v;
    std::ostringstream os;
    for (const auto& r : rows) {
        std::printf("      %-4s %-32s residual=%-11.4g budget=%-9.3g %s%s%s\n", r.pass ? "ok" : "FAIL", r.identity.c_str(),
                    r.residual, r.budget, r.parameters.c_str(), r.detail.empty() ? "" : " | ", r.detail.c_str());
        v.pass = v.pass && r.pass;
    }
    std::fflush(stdout);
    return v;
}

std::FILE* report_file = nullptr;

void report(int n, const char* title, const Verdict& v, double secs, int& failures) {
    if (!v.pass) ++failures;
    char line[1024];
    std::snprintf(line, sizeof line, "criterion %2d: %s  %s (%.1fs)%s%s\n", n, v.pass ? "PASS" : "FAIL", title, secs,
                  v.summary.empty() ? "" : "  ", v.summary.c_str());
    std::fputs(line, stdout);
    std::fflush(stdout);
    if (report_file) {
        std::fputs(line, report_file);
        std::fflush(report_file);
    }
}

}  // namespace

int main(int argc, char** argv) {
    bool strict = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0) {
            strict = true;
        } else if (std::strcmp(argv[i], "--report") == 0 && i + 1 < argc) {
            report_file = std::fopen(argv[++i], "w");
            if (!report_file) {
                std::fprintf(stderr, "cannot open %s\n", argv[i]);
                return 2;
            }
        } else {
            std::fprintf(stderr, "usage: acceptance [--strict] [--report PATH]\n");
            return 2;
        }
    }
    int failures = 0;

    {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v = from_rows({check_twisted_sum_grid(), check_reciprocity(), check_poisson_n2_grid()});
        const double secs = seconds_since(t0);
        if (secs >= 60.0) v.pass = false;
        const auto& c = resolve_sign_conventions();
        v.summary = std::string("orientation ") + to_string(c.twisted_sum) + "/" + to_string(c.poisson_n2) +
                    ", congruence sign " + std::to_string(c.poisson_n2_sign) + ", runtime budget 60s";
        report(1, "identity suite", v, secs, failures);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Verdict v = from_rows({check_gauss_sums(101)});
        report(2, "Gauss sums |tau|^2 = p, p <= 101", v, seconds_since(t0), failures);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Verdict v = from_rows({check_weil_bound(500, 200)});
        report(3, "Weil bound, c <= 500", v, seconds_since(t0), failures);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Verdict v = from_rows({check_weight_V(), check_weight_V_k2()});
        report(4, "V(x) closed form vs contour", v, seconds_since(t0), failures);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Verdict v = from_rows({check_bessel_crossover(), check_bessel_envelopes()});
        report(5, "Bessel dual evaluation and envelopes", v, seconds_since(t0), failures);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Verdict v = from_rows(check_stationary_phase());
        report(6, "stationary phase", v, seconds_since(t0), failures);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<CheckRow> rows{check_point_count_oracle(50)};
        for (auto& r : check_eigendata_batteries({11, 23, 37}, 1000)) rows.push_back(std::move(r));
        const Verdict v = from_rows(rows);
        report(7, "eigendata", v, seconds_since(t0), failures);
    }
    {
        // the held-out budget is 1e-6; the c-sum noise is about 1/c_max, and
        // q = 11 needs 2^20 where 2^19 suffices for 23 and 37
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<CheckRow> rows;
        const std::vector<std::pair<i64, i64>> levels{{11, i64{1} << 20}, {23, i64{1} << 19}, {37, i64{1} << 19}};
        for (const auto& [q, c_max] : levels)
            for (auto& r : check_petersson_level({q, default_held_out(q), c_max}, 1e-6)) rows.push_back(std::move(r));
        for (auto& r : check_dual_moment({{11, 3, 10.0}, {11, 5, 20.0}}, i64{1} << 17, default_dual_c_max))
            rows.push_back(std::move(r));
        const Verdict v = from_rows(rows);
        report(8, "Petersson trace formula and dual moment", v, seconds_since(t0), failures);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Verdict v = from_rows(check_root_numbers({11, 23}, {3, 5, 7, 13}));
        report(9, "root numbers", v, seconds_since(t0), failures);
    }

    std::string csv1;
    {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            ScanConfig cfg = default_scan_config();
            cfg.workers = 1;
            const auto res = run_scan(cfg);
            const double secs = seconds_since(t0);
            std::ostringstream os;
            write_scan_csv(os, res, false);
            csv1 = os.str();
            const auto& s = res.summary;
            const bool bounded = std::isfinite(s.max_ratio) && std::isfinite(s.max_l_ratio) && s.failures == 0;
            std::printf("      records=%zu failures=%zu max moment/(q+p)=%.6g max |L|/(sqrt q+sqrt p)=%.6g\n", s.records,
                        s.failures, s.max_ratio, s.max_l_ratio);
            std::printf("      diagonal trend: %zu cells, spearman rho=%.4f, one-sided p=%.3g (alpha 0.05)\n", s.trend.cells,
                        s.trend.rho, s.trend.p_value);
            v.pass = bounded && secs < 600.0 && !s.trend.significant;
            std::ostringstream sum;
            sum << "max ratio " << format_number(s.max_ratio) << ", max L ratio " << format_number(s.max_l_ratio)
                << ", trend rho " << format_number(s.trend.rho) << " p " << format_number(s.trend.p_value)
                << (s.trend.significant ? " (significant upward trend)" : "");
            v.summary = sum.str();
        } catch (const std::exception& e) {
            v.pass = false;
            v.summary = e.what();
        }
        report(10, "moment surrogates over the q, p <= 60 grid", v, seconds_since(t0), failures);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            ScanConfig cfg = default_scan_config();
            cfg.workers = 8;
            std::ostringstream os;
            write_scan_csv(os, run_scan(cfg), false);
            v.pass = !csv1.empty() && os.str() == csv1;
            v.summary = std::to_string(csv1.size()) + " bytes, 1 vs 8 workers " + (v.pass ? "identical" : "differ");
        } catch (const std::exception& e) {
            v.pass = false;
            v.summary = e.what();
        }
        report(11, "scan determinism", v, seconds_since(t0), failures);
    }

    std::printf("%d of 11 criteria failed\n", failures);
    if (report_file) {
        std::fprintf(report_file, "%d of 11 criteria failed\n", failures);
        std::fclose(report_file);
    }
    return strict ? failures : 0;
}
