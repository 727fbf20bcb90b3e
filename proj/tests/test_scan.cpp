#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "twistl/scan.hpp"

using namespace twistl;

namespace {

std::string csv(const ScanResult& r) {
    std::ostringstream os;
    write_scan_csv(os, r, false);
    return os.str();
}

}  // namespace

TEST(ScanConfig, Defaults) {
    const auto c = default_scan_config();
    EXPECT_EQ(c.q_list, (std::vector<i64>{11, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59}));
    EXPECT_EQ(c.p_list.front(), 3);
    EXPECT_EQ(c.p_list.back(), 59);
    EXPECT_EQ(c.p_list.size(), 16u);
}

TEST(ScanConfig, ParsesKnownFields) {
    const auto j = nlohmann::json::parse(
        R"({"q_list":[11,23],"p_list":[5,7],"characters":[1,2],"afe_length_multiplier":1.5,"workers":3,"output":"x.csv"})");
    const auto c = parse_scan_config(j);
    EXPECT_EQ(c.q_list, (std::vector<i64>{11, 23}));
    ASSERT_TRUE(c.characters.has_value());
    EXPECT_EQ(c.characters->size(), 2u);
    EXPECT_DOUBLE_EQ(c.afe_length_multiplier, 1.5);
    EXPECT_EQ(c.workers, 3u);
    EXPECT_EQ(c.output, "x.csv");
    EXPECT_FALSE(parse_scan_config(nlohmann::json::parse(R"({"q_list":[11],"p_list":[5],"characters":"all"})"))
                     .characters.has_value());
}

TEST(ScanConfig, Rejections) {
    EXPECT_THROW(parse_scan_config(nlohmann::json::parse(R"({"q_list":[11],"p_list":[5],"speed":9})")), ConfigError);
    EXPECT_THROW(parse_scan_config(nlohmann::json::parse(R"({"q_list":[11]})")), ConfigError);
    EXPECT_THROW(parse_scan_config(nlohmann::json::parse(R"({"q_list":"11","p_list":[5]})")), ConfigError);
    EXPECT_THROW(parse_scan_config(nlohmann::json::parse("[1,2]")), ConfigError);
    ScanConfig c;
    c.q_list = {12};
    c.p_list = {5};
    EXPECT_THROW(validate(c), ConfigError);
    c.q_list = {11};
    c.afe_length_multiplier = 0.5;
    EXPECT_THROW(validate(c), ConfigError);
    EXPECT_THROW(load_scan_config("/nonexistent/scan.json"), ConfigError);
}

TEST(Scan, OutOfWindowCellIsListed) {
    ScanConfig c;
    c.q_list = {11};
    c.p_list = {3};
    const auto r = run_scan(c);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_TRUE(r.rows[0].out_of_window);
    EXPECT_EQ(r.rows[0].dim, 1u);
    EXPECT_FALSE(r.rows[0].error.empty());
    EXPECT_EQ(r.summary.out_of_window, 1u);
    EXPECT_EQ(r.summary.failures, 0u);
}

TEST(Scan, SmallGrid) {
    ScanConfig c;
    c.q_list = {11, 23};
    c.p_list = {5, 7};
    const auto r = run_scan(c);
    // 3 + 5 characters at each level
    ASSERT_EQ(r.rows.size(), 16u);
    for (const auto& row : r.rows) {
        EXPECT_TRUE(row.error.empty()) << row.error;
        EXPECT_GT(row.moment_natural, 0.0);
        EXPECT_GT(row.moment_harmonic, 0.0);
        EXPECT_NEAR(row.ratio, row.moment_natural / static_cast<double>(row.q + row.p), 1e-15);
        EXPECT_LE(row.max_central_sq, row.moment_natural + 1e-15);
    }
    EXPECT_EQ(r.rows.front().q, 11);
    EXPECT_EQ(r.rows.front().character, "5:1");
    EXPECT_EQ(r.rows.back().character, "7:5");
}

TEST(Scan, GenusZeroLevelIsAnError) {
    ScanConfig c;
    c.q_list = {13};
    c.p_list = {5};
    const auto r = run_scan(c);
    ASSERT_EQ(r.rows.size(), 3u);
    for (const auto& row : r.rows) EXPECT_NE(row.error.find("genus 0"), std::string::npos);
    EXPECT_EQ(r.summary.failures, 3u);
}

TEST(Scan, CharacterSelection) {
    ScanConfig c;
    c.q_list = {11};
    c.p_list = {7};
    c.characters = std::vector<i64>{3};
    const auto r = run_scan(c);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].character, "7:3");
}

TEST(Scan, WorkerCountDoesNotChangeOutput) {
    ScanConfig c;
    c.q_list = {11, 23, 37};
    c.p_list = {5, 7, 11, 13};
    c.workers = 1;
    const std::string one = csv(run_scan(c));
    c.workers = 8;
    EXPECT_EQ(csv(run_scan(c)), one);
    ::setenv("TWISTL_WORKERS", "3", 1);
    c.workers = 1;
    EXPECT_EQ(effective_workers(c), 3u);
    EXPECT_EQ(csv(run_scan(c)), one);
    ::setenv("TWISTL_WORKERS", "zero", 1);
    EXPECT_THROW(effective_workers(c), ConfigError);
    ::unsetenv("TWISTL_WORKERS");
}

TEST(Scan, CsvLayout) {
    ScanConfig c;
    c.q_list = {11};
    c.p_list = {5};
    const std::string s = csv(run_scan(c));
    std::istringstream is(s);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, experiment_csv_header());
    std::getline(is, line);
    EXPECT_EQ(line.rfind("11,5,2,5:1,1,", 0), 0u);
    EXPECT_NE(s.find("# records=3 out_of_window=0 failures=0"), std::string::npos);
}

TEST(Spearman, KnownValues) {
    EXPECT_NEAR(spearman_rho({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-15);
    EXPECT_NEAR(spearman_rho({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-15);
    // d = (0, 0, -1, 1): 1 - 6*2/(5*24) = 0.9
    EXPECT_NEAR(spearman_rho({1, 2, 3, 4, 5}, {1, 2, 4, 3, 5}), 0.9, 1e-15);
    EXPECT_EQ(spearman_rho({1, 1, 1}, {1, 2, 3}), 0.0);
}

TEST(Spearman, TrendTestOnSyntheticRows) {
    std::vector<ExperimentRecord> rows;
    for (i64 q = 11; q <= 50; q += 3) {
        ExperimentRecord r;
        r.q = q;
        r.p = q + 1;
        r.ratio = static_cast<double>(q);
        rows.push_back(r);
    }
    const auto up = diagonal_trend(rows);
    EXPECT_TRUE(up.significant);
    EXPECT_NEAR(up.rho, 1.0, 1e-15);
    for (auto& r : rows) r.ratio = 1.0 / static_cast<double>(r.q);
    const auto down = diagonal_trend(rows);
    EXPECT_FALSE(down.significant);
    EXPECT_GT(down.p_value, 0.99);
}
