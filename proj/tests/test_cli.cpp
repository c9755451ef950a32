#include "doctest.h"

#include "ergocap/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace ergocap;

namespace {

const std::filesystem::path kConfigs = ERGOCAP_CONFIG_DIR;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "ergocap");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto dir = std::filesystem::temp_directory_path() / "ergocap_cli_test";
    std::filesystem::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) return j;
    }
    FAIL("missing column " << name);
    return 0;
}

const std::string kTwoExp = R"("channel": {"sigma2": 1.0, "users": [
    {"fading": {"kind": "exponential", "mean": 1.0}, "pbar": 1.0},
    {"fading": {"kind": "exponential", "mean": 1.0}, "pbar": 1.0}]})";

}  // namespace

TEST_CASE("solve on a single user") {
    const auto r = cli({"solve", "--config", (kConfigs / "single_user.json").string()});
    CHECK(r.code == exit_code::kSuccess);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "mode");
    CHECK(std::stod(rows[1][column(rows[0], "lambda")]) == doctest::Approx(0.19688692).epsilon(1e-6));
    CHECK(rows[1][column(rows[0], "status")] == "ok");
}

TEST_CASE("config errors exit 1") {
    CHECK(cli({"solve"}).code == exit_code::kConfigError);
    CHECK(cli({"solve", "--config", "/nonexistent/x.json"}).code == exit_code::kConfigError);
    CHECK(cli({"launch", "--config", (kConfigs / "single_user.json").string()}).code == exit_code::kConfigError);
    CHECK(cli({"--config", (kConfigs / "single_user.json").string()}).code == exit_code::kConfigError);
    const auto bad = write_temp("bad.json", "{" + kTwoExp + R"(, "mu": [0.5, 0.5], "extra": true})");
    const auto r = cli({"solve", "--config", bad.string()});
    CHECK(r.code == exit_code::kConfigError);
    CHECK(r.err.find("extra: unknown field") != std::string::npos);
    const auto no_grid = write_temp("no_grid.json", "{" + kTwoExp + R"(, "mu": [0.5, 0.5]})");
    CHECK(cli({"boundary", "--config", no_grid.string()}).code == exit_code::kConfigError);
    const auto no_mu = write_temp("no_mu.json", "{" + kTwoExp + "}");
    CHECK(cli({"solve", "--config", no_mu.string()}).code == exit_code::kConfigError);
}

TEST_CASE("non-convergence exits 2") {
    const auto p = write_temp("tight.json", "{" + kTwoExp + R"(, "mu": [0.7, 0.3], "solver": {"max_outer_iters": 1}})");
    const auto r = cli({"solve", "--config", p.string()});
    CHECK(r.code == exit_code::kNonConvergence);
    CHECK(r.out.find("nonconverged") != std::string::npos);
}

TEST_CASE("verify-mc exit codes") {
    SUBCASE("corrected rule passes on asymmetric awards") {
        const auto p = write_temp("vc.json", "{" + kTwoExp + R"(, "mu": [0.7, 0.3], "mc": {"n_samples": 200000, "seed": 5}})");
        const auto r = cli({"verify-mc", "--config", p.string()});
        CHECK(r.code == exit_code::kSuccess);
        CHECK(parse_csv(r.out).size() == 5);
    }
    SUBCASE("naive rule fails on asymmetric awards") {
        const auto p = write_temp("vn.json", "{" + kTwoExp + R"(, "mu": [0.7, 0.3], "mc": {"n_samples": 200000, "seed": 5}})");
        const auto r = cli({"verify-mc", "--config", p.string(), "--mode", "naive"});
        CHECK(r.code == exit_code::kVerificationFailed);
    }
    SUBCASE("naive rule passes on equal awards") {
        const auto p = write_temp("vs.json", "{" + kTwoExp + R"(, "mu": [0.5, 0.5], "mc": {"n_samples": 200000, "seed": 5}})");
        CHECK(cli({"verify-mc", "--config", p.string(), "--mode", "naive"}).code == exit_code::kSuccess);
    }
}

TEST_CASE("boundary rows and units") {
    const auto cfg = (kConfigs / "two_user_asymmetric.json").string();
    const auto r = cli({"boundary", "--config", cfg});
    REQUIRE(r.code == exit_code::kSuccess);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 1 + 18);
    const auto& h = rows[0];
    CHECK(h == std::vector<std::string>{"mode", "mu_1", "mu_2", "lambda_1", "lambda_2", "R_1", "R_2", "Pach_1",
                                        "Pach_2", "quad_err", "solver_iters", "status"});
    const auto bits = parse_csv(cli({"boundary", "--config", cfg, "--units", "bits"}).out);
    REQUIRE(bits.size() == rows.size());
    for (std::size_t j = 1; j < rows.size(); ++j) {
        for (const char* name : {"R_1", "R_2"}) {
            const double nats = std::stod(rows[j][column(h, name)]);
            CHECK(std::stod(bits[j][column(h, name)]) == doctest::Approx(nats / std::numbers::ln2).epsilon(1e-15));
        }
        CHECK(bits[j][column(h, "lambda_1")] == rows[j][column(h, "lambda_1")]);
    }
    const auto single = parse_csv(cli({"boundary", "--config", (kConfigs / "single_user.json").string()}).out);
    CHECK(single.size() == 2);
}

TEST_CASE("compare output") {
    const auto r = cli({"compare", "--config", (kConfigs / "two_user_asymmetric.json").string()});
    REQUIRE(r.code == exit_code::kSuccess);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 3);
    const auto& h = rows[0];
    CHECK(std::stod(rows[1][column(h, "same_lambda_abs_gap")]) > 0.1);
    CHECK(std::abs(std::stod(rows[2][column(h, "same_lambda_abs_gap")])) <= 1e-8);
}

TEST_CASE("dump-config and output file") {
    const auto cfg = (kConfigs / "two_user_asymmetric.json").string();
    const auto r = cli({"--config", cfg, "--dump-config", "--mode", "naive", "--threads", "3"});
    CHECK(r.code == exit_code::kSuccess);
    CHECK(r.out.find("\"naive\"") != std::string::npos);
    CHECK(r.out.find("\"threads\": 3") != std::string::npos);

    const auto out = std::filesystem::temp_directory_path() / "ergocap_cli_test" / "solve.csv";
    std::filesystem::create_directories(out.parent_path());
    const auto w = cli({"solve", "--config", (kConfigs / "single_user.json").string(), "--output", out.string()});
    CHECK(w.code == exit_code::kSuccess);
    CHECK(w.out.empty());
    std::ifstream in(out);
    std::string first;
    std::getline(in, first);
    CHECK(first.starts_with("mode,user,mu,lambda"));
}

TEST_CASE("number formatting round trips") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.123}) CHECK(std::stod(format_number(x)) == x);
    CHECK(format_number(NAN) == "nan");
}
