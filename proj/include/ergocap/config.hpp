#pragma once

#include "ergocap/boundary.hpp"
#include "ergocap/channel.hpp"
#include "ergocap/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ergocap {

/// Config problem; the message starts with the dotted path of the field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MonteCarloSettings {
    std::size_t n_samples = 1000000;
    std::uint64_t seed = 20080915;
    bool operator==(const MonteCarloSettings&) const = default;
};

enum class ModeSelection { Corrected, Naive, Both };
enum class RateUnits { Nats, Bits };

std::vector<CdfMode> modes_of(ModeSelection selection);

struct RunConfig {
    ChannelConfig channel;
    /// CSV file each empirical user was loaded from, if any (absolute).
    std::vector<std::optional<std::string>> fading_sources;
    std::optional<RateAwardVector> mu;
    std::optional<MuGridSpec> mu_grid;
    SolverSettings solver;
    MonteCarloSettings mc;
    ModeSelection mode = ModeSelection::Corrected;
    std::string output_path;
    RateUnits units = RateUnits::Nats;
    /// 0 means one thread per hardware core.
    unsigned threads = 0;

    unsigned effective_threads() const;
    bool operator==(const RunConfig&) const = default;
};

/// Parses the JSON config text. Relative CSV paths resolve against base_dir.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);
/// Pretty-printed JSON that parse_config maps back to an equal RunConfig.
std::string dump_config(const RunConfig& config);

ModeSelection parse_mode_selection(std::string_view text);
RateUnits parse_units(std::string_view text);

}  // namespace ergocap
