#include "doctest.h"

#include "ergocap/config.hpp"

#include <filesystem>
#include <string>

using namespace ergocap;

namespace {

const std::filesystem::path kConfigs = ERGOCAP_CONFIG_DIR;

// Message of the ConfigError thrown by parsing `text`, or "" if none.
std::string error_of(const std::string& text) {
    try {
        parse_config(text, kConfigs);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kMinimal = R"({"channel": {"sigma2": 1.0, "users": [{"fading": {"kind": "exponential", "mean": 1.0}, "pbar": 1.0}]}})";

}  // namespace

TEST_CASE("sample configs load") {
    for (const char* name : {"single_user.json", "two_user_asymmetric.json", "two_user_symmetric.json",
                             "three_user_mixed.json", "empirical_two_user.json"}) {
        CAPTURE(name);
        CHECK_NOTHROW(load_config(kConfigs / name));
    }
    const auto cfg = load_config(kConfigs / "two_user_asymmetric.json");
    CHECK(cfg.channel.size() == 2);
    REQUIRE(cfg.mu);
    CHECK((*cfg.mu)[0] == 0.7);
    REQUIRE(cfg.mu_grid);
    CHECK(cfg.mu_grid->resolution == 8);
    CHECK(cfg.mode == ModeSelection::Both);
    CHECK(cfg.mc.seed == 20080915);

    const auto emp = load_config(kConfigs / "empirical_two_user.json");
    REQUIRE(emp.fading_sources[0]);
    CHECK(std::filesystem::path(*emp.fading_sources[0]).is_absolute());
    CHECK(emp.channel.users[0].fading.kind() == FadingKind::Empirical);
    CHECK_FALSE(emp.fading_sources[1]);
}

TEST_CASE("defaults") {
    const auto cfg = parse_config(kMinimal);
    CHECK_FALSE(cfg.mu);
    CHECK_FALSE(cfg.mu_grid);
    CHECK(cfg.solver == SolverSettings{});
    CHECK(cfg.mc == MonteCarloSettings{});
    CHECK(cfg.mode == ModeSelection::Corrected);
    CHECK(cfg.units == RateUnits::Nats);
    CHECK(cfg.threads == 0);
    CHECK(cfg.effective_threads() >= 1);
}

TEST_CASE("dump and parse round trip") {
    for (const char* name : {"single_user.json", "two_user_asymmetric.json", "two_user_symmetric.json",
                             "three_user_mixed.json", "empirical_two_user.json"}) {
        CAPTURE(name);
        const auto cfg = load_config(kConfigs / name);
        const auto text = dump_config(cfg);
        const auto back = parse_config(text, "/nonexistent");
        CHECK(back == cfg);
        CHECK(dump_config(back) == text);
    }
}

TEST_CASE("errors name the offending field") {
    const std::string user = R"({"fading": {"kind": "exponential", "mean": 1.0}, "pbar": 1.0})";
    auto with_root = [&](const std::string& extra) {
        return R"({"channel": {"sigma2": 1.0, "users": [)" + user + "," + user + "]}" + extra + "}";
    };
    CHECK(error_of("{not json").find("invalid JSON") != std::string::npos);
    CHECK(error_of(with_root(R"(, "bogus": 1)")).starts_with("bogus: unknown field"));
    CHECK(error_of(with_root(R"(, "solver": {"tolerance": 1})")).starts_with("solver.tolerance: unknown field"));
    CHECK(error_of(with_root(R"(, "mu": [0.6, 0.3])")).starts_with("mu:"));
    CHECK(error_of(with_root(R"(, "mu": [0.5, 0.3, 0.2])")).starts_with("mu:"));
    CHECK(error_of(with_root(R"(, "mode": "fast")")).starts_with("mode:"));
    CHECK(error_of(with_root(R"(, "output": {"units": "bytes"})")).starts_with("output.units:"));
    CHECK(error_of(with_root(R"(, "mu_grid": {"resolution": 4, "mu_min": 0.6})")).starts_with("mu_grid.mu_min:"));
    CHECK(error_of(with_root(R"(, "mc": {"n_samples": -5})")).starts_with("mc.n_samples:"));
    CHECK(error_of(R"({"channel": {"sigma2": 1.0, "users": [{"fading": {"kind": "exponential", "mean": 1.0}}]}})")
              .starts_with("channel.users[0].pbar: missing required field"));
    CHECK(error_of(R"({"channel": {"sigma2": 1.0, "users": [{"fading": {"kind": "rayleigh"}, "pbar": 1}]}})")
              .starts_with("channel.users[0].fading.kind:"));
    CHECK(error_of(R"({"channel": {"sigma2": 1.0, "users": [{"fading": {"kind": "uniform", "lower": 2, "upper": 1}, "pbar": 1}]}})")
              .starts_with("channel.users[0].fading:"));
    CHECK(error_of(R"({"channel": {"sigma2": 0, "users": []}})").starts_with("channel.sigma2:"));
    CHECK(error_of(R"({"channel": {"sigma2": 1.0, "users": [{"fading": {"kind": "empirical", "csv": "nope.csv"}, "pbar": 1}]}})")
              .starts_with("channel.users[0].fading"));
    CHECK_THROWS_AS(load_config(kConfigs / "does_not_exist.json"), ConfigError);
}

TEST_CASE("mode and unit spellings") {
    CHECK(parse_mode_selection("naive") == ModeSelection::Naive);
    CHECK(parse_mode_selection("both") == ModeSelection::Both);
    CHECK(modes_of(ModeSelection::Both) == std::vector<CdfMode>{CdfMode::Corrected, CdfMode::NaiveZero});
    CHECK(parse_units("bits") == RateUnits::Bits);
    CHECK_THROWS_AS(parse_units("Bits"), ConfigError);
}

TEST_CASE("naive mode selects the naive cdf rule") {
    const auto cfg = load_config(kConfigs / "two_user_symmetric.json");
    CHECK(cfg.mode == ModeSelection::Naive);
    CHECK(cfg.solver.mode == CdfMode::NaiveZero);
}
