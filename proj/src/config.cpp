#include "ergocap/config.hpp"

#include "json.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <thread>

namespace ergocap {

namespace {

using json = nlohmann::json;

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

// Typed access to one JSON object with the dotted path used in messages.
class Node {
public:
    Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {
        if (!value_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
    }

    void only(std::initializer_list<std::string_view> keys) const {
        for (const auto& [key, _] : value_.items()) {
            bool known = false;
            for (auto k : keys) known = known || key == k;
            if (!known) fail(join(path_, key), "unknown field");
        }
    }

    bool has(std::string_view key) const { return value_.contains(std::string(key)); }

    const json& raw(std::string_view key) const {
        if (!has(key)) fail(join(path_, key), "missing required field");
        return value_.at(std::string(key));
    }

    Node object(std::string_view key) const { return Node(raw(key), join(path_, key)); }

    double number(std::string_view key) const {
        const auto& v = raw(key);
        if (!v.is_number()) fail(join(path_, key), "expected a number");
        return v.get<double>();
    }
    double number(std::string_view key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    std::uint64_t integer(std::string_view key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            fail(join(path_, key), "expected a nonnegative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string text(std::string_view key) const {
        const auto& v = raw(key);
        if (!v.is_string()) fail(join(path_, key), "expected a string");
        return v.get<std::string>();
    }
    std::string text(std::string_view key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }

    std::vector<double> numbers(std::string_view key) const {
        const auto& v = raw(key);
        if (!v.is_array()) fail(join(path_, key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (!v[j].is_number()) fail(join(path_, key) + "[" + std::to_string(j) + "]", "expected a number");
            out.push_back(v[j].get<double>());
        }
        return out;
    }

    const std::string& path() const { return path_; }

private:
    const json& value_;
    std::string path_;
};

template <class F>
auto guarded(const std::string& path, F&& build) {
    try {
        return build();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

struct ParsedFading {
    FadingDistribution dist;
    std::optional<std::string> source;
};

ParsedFading parse_fading(const Node& node, const std::filesystem::path& base_dir) {
    const std::string kind = node.text("kind");
    if (kind == "exponential") {
        node.only({"kind", "mean"});
        const double mean = node.number("mean");
        return {guarded(node.path(), [&] { return FadingDistribution::exponential(mean); }), std::nullopt};
    }
    if (kind == "uniform") {
        node.only({"kind", "lower", "upper"});
        const double lower = node.number("lower"), upper = node.number("upper");
        return {guarded(node.path(), [&] { return FadingDistribution::uniform(lower, upper); }), std::nullopt};
    }
    if (kind == "empirical") {
        node.only({"kind", "knots", "csv"});
        if (node.has("csv") == node.has("knots")) {
            fail(node.path(), "empirical fading needs exactly one of 'knots' or 'csv'");
        }
        if (node.has("csv")) {
            std::filesystem::path p = node.text("csv");
            if (p.is_relative()) p = base_dir / p;
            p = std::filesystem::absolute(p).lexically_normal();
            return {guarded(join(node.path(), "csv"), [&] { return FadingDistribution::empirical_from_csv(p); }),
                    p.string()};
        }
        const auto& raw = node.raw("knots");
        const std::string path = join(node.path(), "knots");
        if (!raw.is_array()) fail(path, "expected an array of [h, F] pairs");
        std::vector<CdfKnot> knots;
        for (std::size_t j = 0; j < raw.size(); ++j) {
            const auto& pair = raw[j];
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
                fail(path + "[" + std::to_string(j) + "]", "expected [h, F]");
            }
            knots.push_back({pair[0].get<double>(), pair[1].get<double>()});
        }
        return {guarded(path, [&] { return FadingDistribution::empirical(std::move(knots)); }), std::nullopt};
    }
    fail(join(node.path(), "kind"), "unknown fading kind '" + kind + "' (exponential|uniform|empirical)");
}

json fading_to_json(const FadingDistribution& dist, const std::optional<std::string>& source) {
    const auto& p = dist.parameters();
    if (const auto* e = std::get_if<ExponentialGain>(&p)) return {{"kind", "exponential"}, {"mean", e->mean}};
    if (const auto* u = std::get_if<UniformGain>(&p)) {
        return {{"kind", "uniform"}, {"lower", u->lower}, {"upper", u->upper}};
    }
    if (source) return {{"kind", "empirical"}, {"csv", *source}};
    json knots = json::array();
    for (const auto& k : std::get<PiecewiseLinearEmpirical>(p).knots) knots.push_back({k.h, k.F});
    return {{"kind", "empirical"}, {"knots", knots}};
}

std::string_view to_string(ModeSelection m) {
    switch (m) {
        case ModeSelection::Corrected: return "corrected";
        case ModeSelection::Naive: return "naive";
        case ModeSelection::Both: return "both";
    }
    return "corrected";
}

}  // namespace

std::vector<CdfMode> modes_of(ModeSelection selection) {
    switch (selection) {
        case ModeSelection::Corrected: return {CdfMode::Corrected};
        case ModeSelection::Naive: return {CdfMode::NaiveZero};
        case ModeSelection::Both: return {CdfMode::Corrected, CdfMode::NaiveZero};
    }
    return {CdfMode::Corrected};
}

unsigned RunConfig::effective_threads() const {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

ModeSelection parse_mode_selection(std::string_view text) {
    if (text == "corrected") return ModeSelection::Corrected;
    if (text == "naive") return ModeSelection::Naive;
    if (text == "both") return ModeSelection::Both;
    throw ConfigError("mode: expected corrected|naive|both, got '" + std::string(text) + "'");
}

RateUnits parse_units(std::string_view text) {
    if (text == "nats") return RateUnits::Nats;
    if (text == "bits") return RateUnits::Bits;
    throw ConfigError("output.units: expected nats|bits, got '" + std::string(text) + "'");
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("<root>: invalid JSON: ") + e.what());
    }
    const Node root(doc, "");
    root.only({"channel", "mu", "mu_grid", "solver", "quadrature", "mc", "mode", "output", "threads"});

    RunConfig cfg;
    const Node channel = root.object("channel");
    channel.only({"sigma2", "users"});
    cfg.channel.sigma2 = channel.number("sigma2");
    if (!(cfg.channel.sigma2 > 0.0)) fail("channel.sigma2", "must be positive");
    const auto& users = channel.raw("users");
    if (!users.is_array() || users.empty()) fail("channel.users", "expected a nonempty array");
    for (std::size_t i = 0; i < users.size(); ++i) {
        const Node user(users[i], "channel.users[" + std::to_string(i) + "]");
        user.only({"fading", "pbar"});
        auto fading = parse_fading(user.object("fading"), base_dir);
        const double pbar = user.number("pbar");
        if (!(pbar > 0.0)) fail(join(user.path(), "pbar"), "must be positive");
        cfg.channel.users.push_back({std::move(fading.dist), pbar});
        cfg.fading_sources.push_back(std::move(fading.source));
    }
    const std::size_t m = cfg.channel.size();

    if (root.has("mu")) {
        auto mu = root.numbers("mu");
        if (mu.size() != m) fail("mu", "expected " + std::to_string(m) + " entries");
        cfg.mu = guarded("mu", [&] { return RateAwardVector(std::move(mu)); });
    }
    if (root.has("mu_grid")) {
        const Node grid = root.object("mu_grid");
        grid.only({"resolution", "mu_min"});
        MuGridSpec spec;
        spec.resolution = static_cast<int>(grid.integer("resolution", 10));
        spec.mu_min = grid.number("mu_min", spec.mu_min);
        if (spec.resolution < 1) fail("mu_grid.resolution", "must be >= 1");
        if (!(spec.mu_min > 0.0) || !(spec.mu_min * static_cast<double>(m) < 1.0)) {
            fail("mu_grid.mu_min", "must satisfy 0 < mu_min < 1/M");
        }
        cfg.mu_grid = spec;
    }

    if (root.has("solver")) {
        const Node s = root.object("solver");
        s.only({"power_rel_tol", "max_outer_iters", "bracket_growth"});
        cfg.solver.power_rel_tol = s.number("power_rel_tol", cfg.solver.power_rel_tol);
        cfg.solver.max_outer_iters = static_cast<int>(s.integer("max_outer_iters", cfg.solver.max_outer_iters));
        cfg.solver.bracket_growth = s.number("bracket_growth", cfg.solver.bracket_growth);
    }
    if (root.has("quadrature")) {
        const Node q = root.object("quadrature");
        q.only({"outer_tol", "inner_tol", "tail_eps", "max_evals"});
        auto& quad = cfg.solver.quadrature;
        quad.outer_tol = q.number("outer_tol", quad.outer_tol);
        // Inner integrals default to a tenth of the outer tolerance.
        quad.inner_tol = q.number("inner_tol", quad.outer_tol / 10.0);
        quad.tail_eps = q.number("tail_eps", quad.tail_eps);
        quad.max_evals = q.integer("max_evals", quad.max_evals);
    }
    try {
        cfg.solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (root.has("mc")) {
        const Node mc = root.object("mc");
        mc.only({"n_samples", "seed"});
        cfg.mc.n_samples = mc.integer("n_samples", cfg.mc.n_samples);
        cfg.mc.seed = mc.integer("seed", cfg.mc.seed);
        if (cfg.mc.n_samples < 1) fail("mc.n_samples", "must be >= 1");
    }
    if (root.has("mode")) cfg.mode = parse_mode_selection(root.text("mode"));
    cfg.solver.mode = cfg.mode == ModeSelection::Naive ? CdfMode::NaiveZero : CdfMode::Corrected;
    if (root.has("output")) {
        const Node out = root.object("output");
        out.only({"path", "units"});
        cfg.output_path = out.text("path", "");
        cfg.units = parse_units(out.text("units", "nats"));
    }
    cfg.threads = static_cast<unsigned>(root.integer("threads", 0));
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config: cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path().empty() ? "." : path.parent_path());
}

std::string dump_config(const RunConfig& cfg) {
    json users = json::array();
    for (std::size_t i = 0; i < cfg.channel.size(); ++i) {
        const auto& source = i < cfg.fading_sources.size() ? cfg.fading_sources[i] : std::nullopt;
        users.push_back({{"fading", fading_to_json(cfg.channel.users[i].fading, source)},
                         {"pbar", cfg.channel.users[i].pbar}});
    }
    json doc;
    doc["channel"] = {{"sigma2", cfg.channel.sigma2}, {"users", users}};
    if (cfg.mu) doc["mu"] = std::vector<double>(cfg.mu->values().begin(), cfg.mu->values().end());
    if (cfg.mu_grid) doc["mu_grid"] = {{"resolution", cfg.mu_grid->resolution}, {"mu_min", cfg.mu_grid->mu_min}};
    doc["solver"] = {{"power_rel_tol", cfg.solver.power_rel_tol},
                     {"max_outer_iters", cfg.solver.max_outer_iters},
                     {"bracket_growth", cfg.solver.bracket_growth}};
    const auto& q = cfg.solver.quadrature;
    doc["quadrature"] = {{"outer_tol", q.outer_tol},
                         {"inner_tol", q.inner_tol},
                         {"tail_eps", q.tail_eps},
                         {"max_evals", q.max_evals}};
    doc["mc"] = {{"n_samples", cfg.mc.n_samples}, {"seed", cfg.mc.seed}};
    doc["mode"] = to_string(cfg.mode);
    doc["output"] = {{"path", cfg.output_path}, {"units", cfg.units == RateUnits::Bits ? "bits" : "nats"}};
    doc["threads"] = cfg.threads;
    return doc.dump(2) + "\n";
}

}  // namespace ergocap
