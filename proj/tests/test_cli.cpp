#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(TWISTL_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("twistl_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    fs::path dir;
};

}  // namespace

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("moment --q 11"), 2);
    EXPECT_EQ(run("moment --q 12 --p 5"), 2);
    EXPECT_EQ(run("verify --eigendata /nonexistent/file"), 2);
    EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, VerifyCharacters) {
    EXPECT_EQ(run("verify characters --report " + path("r.csv")), 0);
    const std::string rep = slurp(path("r.csv"));
    EXPECT_NE(rep.find("suite,identity,parameters,residual,budget,status,detail"), std::string::npos);
    EXPECT_NE(rep.find("# sign_conventions"), std::string::npos);
}

TEST_F(Cli, EigendataRoundTripAndCorruption) {
    const std::string file = path("e11.txt");
    ASSERT_EQ(run("eigendata compute --q 11 --nmax 60 --out " + file), 0);
    EXPECT_EQ(run("eigendata ingest " + file), 0);

    std::string text = slurp(file);
    const auto pos = text.find("\n6,");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, text.find('\n', pos + 1) - pos, "\n6,5");
    const std::string bad = path("bad.txt");
    std::ofstream(bad) << text;
    EXPECT_EQ(run("eigendata ingest " + bad), 1);
    EXPECT_EQ(run("verify characters --eigendata " + bad), 1);
    EXPECT_EQ(run("eigendata ingest " + path("missing.txt")), 2);
    EXPECT_EQ(run("eigendata compute --q 13 --nmax 40"), 1);
}

TEST_F(Cli, Moment) {
    EXPECT_EQ(run("moment --q 11 --p 5 --c-max 4096"), 0);
    EXPECT_EQ(run("moment --q 11 --p 5 --char 5:2"), 0);
    EXPECT_EQ(run("moment --q 11 --p 5 --char 7:2"), 2);
    EXPECT_EQ(run("moment --q 11 --p 5 --k 4"), 2);
}

TEST_F(Cli, Scan) {
    const std::string cfg = path("scan.json");
    std::ofstream(cfg) << R"({"q_list":[11,23],"p_list":[5,7],"c_max":4096})";
    const std::string out = path("scan.csv");
    EXPECT_EQ(run("scan --config " + cfg + " --out " + out + " --workers 2"), 0);
    const std::string csv = slurp(out);
    EXPECT_EQ(csv.rfind("q,p,k,character,dim,", 0), 0u);
    EXPECT_NE(csv.find("# records=16 out_of_window=0 failures=0"), std::string::npos);

    std::ofstream(path("bad.json")) << R"({"q_list":[11],"p_list":[5],"colour":"blue"})";
    EXPECT_EQ(run("scan --config " + path("bad.json") + " --out " + out), 2);
    std::ofstream(path("broken.json")) << "{";
    EXPECT_EQ(run("scan --config " + path("broken.json") + " --out " + out), 2);
    EXPECT_EQ(run("scan --config " + cfg), 2);
}
