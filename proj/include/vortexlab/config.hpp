#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vortexlab/core.hpp"
#include "vortexlab/energetics.hpp"
#include "vortexlab/jumps.hpp"
#include "vortexlab/rabi.hpp"

namespace vortexlab {

/// One `[name]` block. Entries keep file order; values are raw text.
struct ConfigSection {
    std::string name;
    int line = 0;
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(std::string_view key) const;
    std::optional<std::string> text(std::string_view key) const;
    /// Throws ConfigError when the key is missing or not a number.
    double number(std::string_view key) const;
    double number_or(std::string_view key, double fallback) const;
    long long integer(std::string_view key) const;
    long long integer_or(std::string_view key, long long fallback) const;
    /// Comma-separated numbers; an empty value gives an empty list.
    std::vector<double> list(std::string_view key) const;
};

/// Parsed `key = value` file with `[section]` headers and `#` comments.
/// Every key is checked against a per-section schema; unknown sections and
/// keys are errors. `[pinning]` may repeat (one block per site).
struct RunConfig {
    std::vector<ConfigSection> sections;
    std::string source;  // raw text, hashed into the manifest
    std::string origin;  // file name for messages

    const ConfigSection* find(std::string_view name) const;
    /// Throws ConfigError when absent.
    const ConfigSection& require(std::string_view name) const;
    std::vector<const ConfigSection*> all(std::string_view name) const;
};

RunConfig parse_config(std::string_view text, std::string_view origin = "<config>");
RunConfig load_config(const std::string& path);

/// Seed from VORTEXLAB_SEED when set, else `[jumps] seed`, else 1.
std::uint64_t resolve_seed(const RunConfig& config);

// Section readers. Units follow the key suffixes and are converted to SI.
DeviceModel read_device(const RunConfig& config);
std::optional<double> read_eps0_override(const RunConfig& config);
QrmParams read_qrm(const RunConfig& config);
HilbertTruncation read_truncation(const RunConfig& config);
std::vector<PinningSite> read_sites(const RunConfig& config);
TelegraphParams read_telegraph(const RunConfig& config);
ReadoutModel read_readout(const RunConfig& config);
/// `[sweep] B_list_uT` or `B_start_uT`, `B_stop_uT`, `points`; in T.
/// ConfigError on an empty list.
std::vector<double> read_field_sweep(const RunConfig& config);

}  // namespace vortexlab
