#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vortexlab/config.hpp"
#include "vortexlab/fitting.hpp"

namespace vortexlab::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kNumericalFailure = 2 };

struct OutputFile {
    std::string name;
    std::string sha256;
    std::size_t bytes = 0;
};

/// Everything a subcommand needs. Outputs go through write() so that the
/// manifest lists each file with its hash.
struct Context {
    std::string command;
    std::optional<RunConfig> config;
    std::filesystem::path out_dir;
    std::string format = "json";
    unsigned workers = 1;
    std::uint64_t seed = 1;
    std::optional<std::string> input;
    std::optional<double> f_q;  // Hz, analyze-jumps override
    bool joint = false;
    std::ostream* log = nullptr;
    std::vector<OutputFile> outputs;

    const RunConfig& cfg() const;
    void write(const std::string& name, const std::string& content);
};

std::string sha256_hex(const std::string& bytes);

/// Full command line (argv[0] excluded). Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// ----------------------------------------------------------- subcommands

void cmd_scales(Context& ctx);
void cmd_spectrum(Context& ctx);
void cmd_chi(Context& ctx);
void cmd_fit_spectrum(Context& ctx);
void cmd_fit_decay(Context& ctx);
void cmd_fit_ramsey(Context& ctx);
void cmd_fit_echo(Context& ctx);
void cmd_fit_rabi(Context& ctx);
void cmd_landscape(Context& ctx);
void cmd_gamma_map(Context& ctx);
void cmd_pair(Context& ctx);
void cmd_tunnel(Context& ctx);
void cmd_synth_jumps(Context& ctx);
void cmd_analyze_jumps(Context& ctx);
void cmd_batch_fit(Context& ctx);

/// Spectrum file: columns B_uT, f_GHz, optional sigma_MHz and kind
/// (qubit or resonator; default qubit).
SpectrumDataset read_spectrum_csv(const std::string& path);

/// Time trace file: t_us, value, optional sigma.
TimeTrace read_trace_csv(const std::string& path);

struct BatchRow {
    std::string dataset;
    bool converged = false;
    double f_q0 = std::nan("");   // Hz
    double B0 = std::nan("");     // T
    double gamma = std::nan("");  // Hz/T
    double g = std::nan("");      // Hz, joint fit only
    std::string error;
};

/// One row per *.csv file in `dir`, sorted by file name. Unreadable or
/// unfittable files give converged = false rows. InvalidArgument when the
/// directory holds no CSV file.
std::vector<BatchRow> batch_fit(const std::filesystem::path& dir, bool joint, unsigned workers);

}  // namespace vortexlab::cli
