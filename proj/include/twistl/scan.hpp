#pragma once

// Grid scans of twisted second moments over (q, p, chi), written as CSV.
// Cells run on a worker pool but rows are sorted before writing, so the file
// does not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "twistl/characters.hpp"
#include "twistl/eigendata.hpp"
#include "twistl/errors.hpp"
#include "twistl/lfunctions.hpp"
#include "twistl/petersson.hpp"

namespace twistl {

struct ScanConfig {
    std::vector<i64> q_list;
    std::vector<i64> p_list;
    int k = 2;
    std::optional<std::vector<i64>> characters;  // exponents a of chi = p:a; empty means all
    double afe_length_multiplier = 1.0;
    i64 c_max = default_dual_c_max;  // Petersson truncation for the harmonic weights
    double tolerance = 1e-6;         // allowed | |eps| - 1 |
    unsigned workers = 1;
    std::string output;
    bool record_timing = false;
    std::vector<std::string> eigendata_files;  // ingested data, needed for k > 2
};

/// Levels below the bound where X_0(q) has positive genus.
inline std::vector<i64> positive_genus_levels(i64 bound) {
    std::vector<i64> out;
    for (const i64 q : primes_up_to(bound))
        if (q >= 11 && genus_x0(q) > 0) out.push_back(q);
    return out;
}

/// All primes in [3, 60] for p; positive-genus prime levels up to 60 for q.
inline ScanConfig default_scan_config() {
    ScanConfig c;
    c.q_list = positive_genus_levels(60);
    for (const i64 p : primes_up_to(60))
        if (p >= 3) c.p_list.push_back(p);
    return c;
}

inline ScanConfig parse_scan_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("scan config must be a JSON object");
    ScanConfig c;
    static const std::vector<std::string> known{"q_list", "p_list", "k", "characters", "afe_length_multiplier", "c_max",
                                                "tolerance", "workers", "output", "record_timing", "eigendata"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("unknown scan config field '" + it.key() + "'");
    try {
        if (!j.contains("q_list") || !j.contains("p_list")) throw ConfigError("scan config needs q_list and p_list");
        c.q_list = j.at("q_list").get<std::vector<i64>>();
        c.p_list = j.at("p_list").get<std::vector<i64>>();
        if (j.contains("k")) c.k = j.at("k").get<int>();
        if (j.contains("characters")) {
            const auto& ch = j.at("characters");
            if (ch.is_string()) {
                if (ch.get<std::string>() != "all") throw ConfigError("characters must be \"all\" or a list of indices");
            } else {
                c.characters = ch.get<std::vector<i64>>();
            }
        }
        if (j.contains("afe_length_multiplier")) c.afe_length_multiplier = j.at("afe_length_multiplier").get<double>();
        if (j.contains("c_max")) c.c_max = j.at("c_max").get<i64>();
        if (j.contains("tolerance")) c.tolerance = j.at("tolerance").get<double>();
        if (j.contains("workers")) c.workers = j.at("workers").get<unsigned>();
        if (j.contains("output")) c.output = j.at("output").get<std::string>();
        if (j.contains("record_timing")) c.record_timing = j.at("record_timing").get<bool>();
        if (j.contains("eigendata")) c.eigendata_files = j.at("eigendata").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scan config: ") + e.what());
    }
    return c;
}

inline ScanConfig load_scan_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return parse_scan_config(j);
}

inline void validate(const ScanConfig& c) {
    if (c.q_list.empty() || c.p_list.empty()) throw ConfigError("q_list and p_list must be nonempty");
    for (const i64 q : c.q_list)
        if (!is_prime(q)) throw ConfigError("q_list entry " + std::to_string(q) + " is not prime");
    for (const i64 p : c.p_list)
        if (!is_prime(p)) throw ConfigError("p_list entry " + std::to_string(p) + " is not prime");
    if (c.k < 2 || c.k % 2 != 0) throw ConfigError("k must be an even integer >= 2");
    if (!(c.afe_length_multiplier >= 1.0)) throw ConfigError("afe_length_multiplier must be >= 1");
    if (c.c_max < 2) throw ConfigError("c_max must be >= 2");
    if (!(c.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    if (c.characters)
        for (const i64 a : *c.characters)
            if (a < 1) throw ConfigError("character indices must be >= 1");
}

/// Worker count: TWISTL_WORKERS overrides the config.
inline unsigned effective_workers(const ScanConfig& c) {
    unsigned w = c.workers;
    if (const char* env = std::getenv("TWISTL_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw ConfigError("TWISTL_WORKERS must be a positive integer");
        w = static_cast<unsigned>(v);
    }
    return std::max(1u, w);
}

struct ExperimentRecord {
    i64 q = 0;
    i64 p = 0;
    int k = 2;
    std::string character;
    i64 character_index = 0;
    std::size_t dim = 0;
    double moment_natural = 0.0;
    double moment_harmonic = 0.0;
    double ratio = 0.0;
    double max_central_sq = 0.0;
    double max_l_ratio = 0.0;
    double runtime_ms = 0.0;
    std::string error;
    bool out_of_window = false;  // q > p^2: listed but not computed
};

inline const char* experiment_csv_header() {
    return "q,p,k,character,dim,moment_natural,moment_harmonic,ratio,max_central_sq,max_l_ratio,runtime_ms,error";
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string to_csv_row(const ExperimentRecord& r, bool timing) {
    std::ostringstream os;
    os << r.q << ',' << r.p << ',' << r.k << ',' << r.character << ',';
    if (r.error.empty()) {
        os << r.dim << ',' << format_number(r.moment_natural) << ',' << format_number(r.moment_harmonic) << ','
           << format_number(r.ratio) << ',' << format_number(r.max_central_sq) << ',' << format_number(r.max_l_ratio);
    } else {
        os << r.dim << ",,,,,";
    }
    os << ',' << (timing ? format_number(r.runtime_ms) : std::string()) << ',' << csv_field(r.error);
    return os.str();
}

struct TrendTest {
    std::size_t cells = 0;
    double rho = 0.0;
    double p_value = 1.0;  // one-sided, against rho > 0
    bool significant = false;
};

/// Spearman rank correlation with average ranks for ties.
inline double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

/// Upward-trend test of the mean ratio per (q, p) against q + p, over cells
/// with q/p within a factor of two.
inline TrendTest diagonal_trend(const std::vector<ExperimentRecord>& rows, double alpha = 0.05) {
    std::map<std::pair<i64, i64>, std::pair<double, int>> cells;
    for (const auto& r : rows) {
        if (!r.error.empty()) continue;
        if (std::abs(std::log(static_cast<double>(r.q) / static_cast<double>(r.p))) > std::log(2.0)) continue;
        auto& c = cells[{r.q, r.p}];
        c.first += r.ratio;
        c.second += 1;
    }
    TrendTest t;
    t.cells = cells.size();
    if (cells.size() < 4) return t;
    std::vector<double> size, ratio;
    for (const auto& [key, v] : cells) {
        size.push_back(static_cast<double>(key.first + key.second));
        ratio.push_back(v.first / v.second);
    }
    t.rho = spearman_rho(size, ratio);
    const double n = static_cast<double>(cells.size());
    if (t.rho >= 1.0) {
        t.p_value = 0.0;
    } else {
        const double stat = t.rho * std::sqrt((n - 2.0) / (1.0 - t.rho * t.rho));
        const boost::math::students_t dist(n - 2.0);
        t.p_value = boost::math::cdf(boost::math::complement(dist, stat));
    }
    t.significant = t.p_value < alpha;
    return t;
}

struct ScanSummary {
    std::size_t records = 0;
    std::size_t out_of_window = 0;
    std::size_t failures = 0;
    double max_ratio = 0.0;
    double max_l_ratio = 0.0;
    TrendTest trend;
};

inline ScanSummary summarize(const std::vector<ExperimentRecord>& rows) {
    ScanSummary s;
    s.records = rows.size();
    for (const auto& r : rows) {
        if (r.out_of_window) {
            ++s.out_of_window;
            continue;
        }
        if (!r.error.empty()) {
            ++s.failures;
            continue;
        }
        s.max_ratio = std::max(s.max_ratio, r.ratio);
        s.max_l_ratio = std::max(s.max_l_ratio, r.max_l_ratio);
    }
    s.trend = diagonal_trend(rows);
    return s;
}

struct ScanResult {
    std::vector<ExperimentRecord> rows;
    ScanSummary summary;
};

namespace detail {

struct LevelData {
    std::vector<NewformEigendata> forms;
    std::optional<HarmonicWeights> weights;
    std::string error;
    std::string weight_error;
};

struct Cell {
    i64 q;
    i64 p;
    i64 a;
};

inline ExperimentRecord run_cell(const Cell& cell, const LevelData& level, const ScanConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentRecord r;
    r.q = cell.q;
    r.p = cell.p;
    r.k = cfg.k;
    r.character = std::to_string(cell.p) + ":" + std::to_string(cell.a);
    r.character_index = cell.a;
    if (cell.q > cell.p * cell.p) {
        r.out_of_window = true;
        r.dim = static_cast<std::size_t>(genus_x0(cell.q));
        r.error = "outside the window q <= p^2";
        return r;
    }
    try {
        if (!level.error.empty()) throw Error(level.error);
        r.dim = level.forms.size();
        const DirichletCharacter chi(cell.p, cell.a);
        const double bound = std::sqrt(static_cast<double>(cell.q)) + std::sqrt(static_cast<double>(cell.p));
        for (const auto& f : level.forms) {
            const cplx eps = root_number(f, chi);
            if (std::abs(std::abs(eps) - 1.0) > cfg.tolerance)
                throw NumericallyUnstable("|eps| - 1 = " + std::to_string(std::abs(eps) - 1.0));
            const CentralValue cv = central_value(f, chi, cfg.afe_length_multiplier);
            const double sq = std::norm(cv.value);
            r.moment_natural += sq;
            r.max_central_sq = std::max(r.max_central_sq, sq);
            r.max_l_ratio = std::max(r.max_l_ratio, std::sqrt(sq) / bound);
        }
        r.ratio = r.moment_natural / static_cast<double>(cell.q + cell.p);
        if (!level.weights) throw Error(level.weight_error);
        r.moment_harmonic = twisted_moment(level.forms, chi, Weighting::harmonic, &*level.weights).moment;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

template <typename F>
void parallel_for(std::size_t count, unsigned workers, F&& body) {
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for (std::size_t i = next++; i < count; i = next++) body(i);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(loop);
    loop();
    for (auto& t : pool) t.join();
}

}  // namespace detail

inline ScanResult run_scan(const ScanConfig& cfg) {
    validate(cfg);
    const unsigned workers = effective_workers(cfg);

    std::vector<i64> qs = cfg.q_list, ps = cfg.p_list;
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());

    std::vector<detail::Cell> cells;
    std::map<i64, i64> p_max;
    for (const i64 q : qs) {
        for (const i64 p : ps) {
            if (p == q) continue;
            if (q <= p * p) p_max[q] = std::max(p_max[q], p);
            else p_max.try_emplace(q, 0);
            for (i64 a = 1; a <= p - 2; ++a) {
                if (cfg.characters && std::find(cfg.characters->begin(), cfg.characters->end(), a) == cfg.characters->end())
                    continue;
                cells.push_back({q, p, a});
            }
        }
    }

    // ingested eigendata, keyed by level
    std::map<i64, std::vector<NewformEigendata>> ingested;
    for (const auto& path : cfg.eigendata_files)
        for (auto& f : ingest_eigendata(path))
            if (f.weight == cfg.k) ingested[f.level].push_back(std::move(f));

    // per-level data, computed in parallel
    std::vector<i64> levels;
    for (const auto& [q, pm] : p_max) levels.push_back(q);
    std::vector<detail::LevelData> data(levels.size());
    detail::parallel_for(levels.size(), workers, [&](std::size_t i) {
        const i64 q = levels[i];
        auto& d = data[i];
        const i64 pm = p_max.at(q);
        if (pm == 0) return;
        try {
            const i64 need = std::max<i64>(
                {30, required_n_max(q, pm, cfg.k, cfg.afe_length_multiplier),
                 static_cast<i64>(2.0 * analytic_scale(q, pm)) + 1});
            if (auto it = ingested.find(q); it != ingested.end()) {
                d.forms = it->second;
                for (const auto& f : d.forms)
                    if (f.n_max() < need) throw EigendataTooShort(need, f.n_max());
            } else if (cfg.k == 2) {
                d.forms = newform_eigendata(q, need);
            } else {
                throw Error("no eigendata for level " + std::to_string(q) + " at weight " + std::to_string(cfg.k));
            }
        } catch (const std::exception& e) {
            d.error = e.what();
            return;
        }
        try {
            d.weights = solve_harmonic_weights(d.forms, q, cfg.k, default_probes(d.forms.size(), q), cfg.c_max);
        } catch (const std::exception& e) {
            d.weight_error = std::string("harmonic weights: ") + e.what();
        }
    });
    std::map<i64, const detail::LevelData*> by_level;
    // levels with no pair inside the window never need eigendata
    for (std::size_t i = 0; i < levels.size(); ++i) by_level[levels[i]] = &data[i];

    ScanResult out;
    out.rows.resize(cells.size());
    detail::parallel_for(cells.size(), workers, [&](std::size_t i) {
        out.rows[i] = detail::run_cell(cells[i], *by_level.at(cells[i].q), cfg);
    });
    std::sort(out.rows.begin(), out.rows.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
        if (a.q != b.q) return a.q < b.q;
        if (a.p != b.p) return a.p < b.p;
        return a.character_index < b.character_index;
    });
    if (out.rows.empty()) throw ConfigError("scan produced no records (check q != p and the character list)");
    out.summary = summarize(out.rows);
    return out;
}

inline void write_scan_csv(std::ostream& os, const ScanResult& res, bool timing) {
    os << experiment_csv_header() << '\n';
    for (const auto& r : res.rows) os << to_csv_row(r, timing) << '\n';
    const auto& s = res.summary;
    os << "# records=" << s.records << " out_of_window=" << s.out_of_window << " failures=" << s.failures << '\n';
    os << "# max_ratio=" << format_number(s.max_ratio) << " max_l_ratio=" << format_number(s.max_l_ratio) << '\n';
    os << "# diagonal_trend cells=" << s.trend.cells << " spearman_rho=" << format_number(s.trend.rho)
       << " p_value=" << format_number(s.trend.p_value) << " significant=" << (s.trend.significant ? "yes" : "no")
       << '\n';
}

inline void write_scan_csv(const std::string& path, const ScanResult& res, bool timing) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    write_scan_csv(os, res, timing);
}

}  // namespace twistl
