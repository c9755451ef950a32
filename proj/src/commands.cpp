#include "ergocap/commands.hpp"

#include "ergocap/kernel.hpp"
#include "ergocap/montecarlo.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace ergocap {

namespace {

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c == '\n' ? ' ' : c;
    }
    return quoted + "\"";
}

double rate_scale(RateUnits units) {
    return units == RateUnits::Bits ? 1.0 / std::numbers::ln2 : 1.0;
}

const RateAwardVector& require_mu(const RunConfig& config, const char* command) {
    if (!config.mu) throw ConfigError(std::string("mu: required by '") + command + "'");
    return *config.mu;
}

SolverSettings settings_for(const RunConfig& config, CdfMode mode) {
    SolverSettings s = config.solver;
    s.mode = mode;
    return s;
}

}  // namespace

std::string format_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

CommandOutput cmd_solve(const RunConfig& config) {
    const auto& mu = require_mu(config, "solve");
    const std::size_t m = config.channel.size();
    CommandOutput out;
    std::ostringstream csv, log;
    csv << "mode,user,mu,lambda,pbar,achieved_power,residual,certified_residual,sweeps,status\n";
    for (CdfMode mode : modes_of(config.mode)) {
        try {
            const auto sol = solve_lambda(mu, config.channel, settings_for(config, mode));
            for (std::size_t i = 0; i < m; ++i) {
                csv << to_string(mode) << ',' << i + 1 << ',' << format_number(mu[i]) << ','
                    << format_number(sol.lambda[i]) << ',' << format_number(config.channel.users[i].pbar)
                    << ',' << format_number(sol.achieved_powers[i]) << ','
                    << format_number(sol.residuals[i]) << ',' << format_number(sol.certified_residuals[i])
                    << ',' << sol.sweeps << ",ok\n";
            }
            log << to_string(mode) << ": converged in " << sol.sweeps << " sweeps ("
                << sol.power_evaluations << " power evaluations)\n";
        } catch (const SolverError& e) {
            for (std::size_t i = 0; i < m; ++i) {
                const double lam = i < e.last_lambda().size() ? e.last_lambda()[i] : NAN;
                const double res = i < e.residuals().size() ? e.residuals()[i] : NAN;
                csv << to_string(mode) << ',' << i + 1 << ',' << format_number(mu[i]) << ','
                    << format_number(lam) << ',' << format_number(config.channel.users[i].pbar)
                    << ",nan," << format_number(res) << ",nan,"
                    << config.solver.max_outer_iters << ",nonconverged\n";
            }
            log << to_string(mode) << ": " << e.what() << '\n';
            out.exit_code = exit_code::kNonConvergence;
        } catch (const NumericError& e) {
            log << to_string(mode) << ": " << e.what() << '\n';
            out.exit_code = exit_code::kNonConvergence;
        }
    }
    out.csv = csv.str();
    out.log = log.str();
    return out;
}

CommandOutput cmd_boundary(const RunConfig& config) {
    if (!config.mu_grid) throw ConfigError("mu_grid: required by 'boundary'");
    const std::size_t m = config.channel.size();
    const auto grid = simplex_grid(m, *config.mu_grid);
    const double scale = rate_scale(config.units);

    std::ostringstream csv, log;
    csv << "mode";
    for (const char* prefix : {"mu_", "lambda_", "R_", "Pach_"}) {
        for (std::size_t i = 0; i < m; ++i) csv << ',' << prefix << i + 1;
    }
    csv << ",quad_err,solver_iters,status\n";

    std::size_t succeeded = 0;
    for (CdfMode mode : modes_of(config.mode)) {
        for (const auto& p : sweep(config.channel, grid, settings_for(config, mode))) {
            csv << to_string(mode);
            for (std::size_t i = 0; i < m; ++i) csv << ',' << format_number(p.mu[i]);
            for (std::size_t i = 0; i < m; ++i) csv << ',' << format_number(p.lambda ? (*p.lambda)[i] : NAN);
            for (std::size_t i = 0; i < m; ++i) csv << ',' << format_number(p.ok() ? p.rates[i] * scale : NAN);
            for (std::size_t i = 0; i < m; ++i) csv << ',' << format_number(p.ok() ? p.achieved_powers[i] : NAN);
            csv << ',' << format_number(p.quad_error) << ',' << p.solver_iterations << ','
                << csv_field(p.status) << '\n';
            if (p.ok()) {
                ++succeeded;
            } else {
                log << to_string(mode) << ": " << p.status << '\n';
            }
        }
    }
    CommandOutput out;
    out.csv = csv.str();
    out.log = log.str();
    out.exit_code = succeeded > 0 ? exit_code::kSuccess : exit_code::kNonConvergence;
    return out;
}

CommandOutput cmd_verify_mc(const RunConfig& config) {
    const auto& mu = require_mu(config, "verify-mc");
    const std::size_t m = config.channel.size();
    const double scale = rate_scale(config.units);
    constexpr double kMaxAbsZ = 4.0;

    CommandOutput out;
    std::ostringstream csv, log;
    csv << "mode,user,quantity,analytic,mc_mean,mc_se,z_score,n_samples\n";
    auto z_score = [](double analytic, double mean, double se) {
        if (se > 0.0) return (mean - analytic) / se;
        return mean == analytic ? 0.0 : std::copysign(INFINITY, mean - analytic);
    };
    bool all_pass = true;
    for (CdfMode mode : modes_of(config.mode)) {
        try {
            const auto settings = settings_for(config, mode);
            const auto sol = solve_lambda(mu, config.channel, settings);
            const auto rates = rate_point(mu, sol.lambda, config.channel, mode, settings.quadrature);
            const auto mc = estimate(config.channel, mu, sol.lambda, config.mc.n_samples, config.mc.seed,
                                     config.effective_threads());
            for (std::size_t i = 0; i < m; ++i) {
                const double zr = z_score(rates.rates[i], mc.mean_rates[i], mc.rate_std_errors[i]);
                const double pbar = config.channel.users[i].pbar;
                const double zp = z_score(pbar, mc.mean_powers[i], mc.power_std_errors[i]);
                csv << to_string(mode) << ',' << i + 1 << ",rate," << format_number(rates.rates[i] * scale)
                    << ',' << format_number(mc.mean_rates[i] * scale) << ','
                    << format_number(mc.rate_std_errors[i] * scale) << ',' << format_number(zr) << ','
                    << mc.samples << '\n';
                csv << to_string(mode) << ',' << i + 1 << ",power," << format_number(pbar) << ','
                    << format_number(mc.mean_powers[i]) << ',' << format_number(mc.power_std_errors[i])
                    << ',' << format_number(zp) << ',' << mc.samples << '\n';
                for (auto [name, z] : {std::pair{"rate", zr}, std::pair{"power", zp}}) {
                    if (!(std::abs(z) <= kMaxAbsZ)) {
                        all_pass = false;
                        log << to_string(mode) << ": user " << i + 1 << ' ' << name << " z-score "
                            << z << " exceeds " << kMaxAbsZ << '\n';
                    }
                }
            }
        } catch (const SolverError& e) {
            log << to_string(mode) << ": " << e.what() << '\n';
            out.exit_code = exit_code::kNonConvergence;
        } catch (const NumericError& e) {
            log << to_string(mode) << ": " << e.what() << '\n';
            out.exit_code = exit_code::kNonConvergence;
        }
    }
    if (out.exit_code == exit_code::kSuccess && !all_pass) out.exit_code = exit_code::kVerificationFailed;
    out.csv = csv.str();
    out.log = log.str();
    return out;
}

CommandOutput cmd_compare(const RunConfig& config) {
    const auto& mu = require_mu(config, "compare");
    const double scale = rate_scale(config.units);
    CommandOutput out;
    std::ostringstream csv;
    csv << "user,mu,lambda_corrected,lambda_naive,R_corrected,R_naive_same_lambda,"
           "same_lambda_abs_gap,same_lambda_rel_gap,R_naive_end_to_end,end_to_end_abs_gap,"
           "end_to_end_rel_gap\n";
    try {
        const auto cmp = compare_modes(config.channel, mu, config.solver);
        for (std::size_t i = 0; i < cmp.users.size(); ++i) {
            const auto& g = cmp.users[i];
            csv << i + 1 << ',' << format_number(mu[i]) << ',' << format_number(cmp.corrected_lambda[i])
                << ',' << format_number(cmp.naive_lambda[i]) << ','
                << format_number(g.corrected_rate * scale) << ','
                << format_number(g.naive_rate_same_lambda * scale) << ','
                << format_number(g.same_lambda_abs_gap * scale) << ','
                << format_number(g.same_lambda_rel_gap) << ','
                << format_number(g.naive_rate_end_to_end * scale) << ','
                << format_number(g.end_to_end_abs_gap * scale) << ','
                << format_number(g.end_to_end_rel_gap) << '\n';
        }
    } catch (const SolverError& e) {
        out.log = std::string(e.what()) + '\n';
        out.exit_code = exit_code::kNonConvergence;
    } catch (const NumericError& e) {
        out.log = std::string(e.what()) + '\n';
        out.exit_code = exit_code::kNonConvergence;
    }
    out.csv = csv.str();
    return out;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ergodic capacity region of the Gaussian multiaccess fading channel"};
    app.set_version_flag("--version", "ergocap 1.0.0");
    std::string command, config_path, output_path, mode, units;
    std::optional<unsigned> threads;
    bool dump = false;
    app.add_option("command", command, "solve | boundary | verify-mc | compare")
        ->check(CLI::IsMember({"solve", "boundary", "verify-mc", "compare"}));
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--output", output_path, "CSV destination (default: config output.path or stdout)");
    app.add_option("--mode", mode, "corrected | naive | both")
        ->check(CLI::IsMember({"corrected", "naive", "both"}));
    app.add_option("--units", units, "nats | bits")->check(CLI::IsMember({"nats", "bits"}));
    app.add_option("--threads", threads, "Monte Carlo worker threads (0 = all cores)");
    app.add_flag("--dump-config", dump, "Print the effective configuration and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::kSuccess : exit_code::kConfigError;
    }

    RunConfig config;
    try {
        config = load_config(config_path);
        if (!mode.empty()) {
            config.mode = parse_mode_selection(mode);
            config.solver.mode = config.mode == ModeSelection::Naive ? CdfMode::NaiveZero : CdfMode::Corrected;
        }
        if (!units.empty()) config.units = parse_units(units);
        if (threads) config.threads = *threads;
        if (!output_path.empty()) config.output_path = output_path;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_code::kConfigError;
    }

    if (dump) {
        out << dump_config(config);
        return exit_code::kSuccess;
    }
    if (command.empty()) {
        err << "error: a command is required (solve | boundary | verify-mc | compare)\n";
        return exit_code::kConfigError;
    }

    CommandOutput result;
    try {
        if (command == "solve") {
            result = cmd_solve(config);
        } else if (command == "boundary") {
            result = cmd_boundary(config);
        } else if (command == "verify-mc") {
            result = cmd_verify_mc(config);
        } else {
            result = cmd_compare(config);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_code::kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return exit_code::kConfigError;
    }

    err << result.log;
    if (config.output_path.empty()) {
        out << result.csv;
    } else {
        std::ofstream file(config.output_path, std::ios::binary);
        if (!file) {
            err << "error: cannot write " << config.output_path << '\n';
            return exit_code::kConfigError;
        }
        file << result.csv;
    }
    return result.exit_code;
}

}  // namespace ergocap
