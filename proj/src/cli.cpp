#include "vortexlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "vortexlab/errors.hpp"
#include "vortexlab/parallel.hpp"

namespace vortexlab::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Command {
    const char* name;
    const char* help;
    void (*run)(Context&);
    bool needs_config;
    bool takes_input;  // --input file
    bool analysis;     // --format json|csv
};

const std::vector<Command>& commands() {
    static const std::vector<Command> c{
        {"scales", "derived film scales (Pearl length, eps0, threshold field)", cmd_scales, true, false, false},
        {"spectrum", "dressed resonator/spin spectrum versus field", cmd_spectrum, true, false, false},
        {"chi", "dispersive shift versus field", cmd_chi, true, false, false},
        {"fit-spectrum", "hyperbola (or --joint Rabi-model) fit of a spectrum file", cmd_fit_spectrum, false, true, true},
        {"fit-decay", "exponential fit of an energy-relaxation trace", cmd_fit_decay, false, true, true},
        {"fit-ramsey", "two-tone Ramsey fit", cmd_fit_ramsey, false, true, true},
        {"fit-echo", "exponential fit of a Hahn-echo trace", cmd_fit_echo, false, true, true},
        {"fit-rabi", "Rabi frequency versus drive amplitude", cmd_fit_rabi, false, true, true},
        {"landscape", "vortex potential on an x-y grid", cmd_landscape, true, false, false},
        {"gamma-map", "gyromagnetic ratio over well geometry", cmd_gamma_map, true, false, false},
        {"pair", "vortex-vortex coupling versus separation", cmd_pair, true, false, false},
        {"tunnel", "tunneling spectrum of a pinned vortex versus field", cmd_tunnel, true, false, false},
        {"synth-jumps", "synthetic single-shot readout record", cmd_synth_jumps, true, false, false},
        {"analyze-jumps", "clustering, latching filter and dwell statistics", cmd_analyze_jumps, false, true, true},
        {"batch-fit", "parameter table over a directory of spectra", cmd_batch_fit, false, false, true},
    };
    return c;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f << content;
    if (!f) throw Error("write failed for '" + path.string() + "'");
}

void write_manifest(const Context& ctx) {
    Json m;
    m["command"] = ctx.command;
    if (ctx.config) {
        m["config_file"] = ctx.config->origin;
        m["config_sha256"] = sha256_hex(ctx.config->source);
    } else {
        m["config_file"] = nullptr;
        m["config_sha256"] = nullptr;
    }
    m["input"] = ctx.input ? Json(*ctx.input) : Json(nullptr);
    m["seed"] = ctx.seed;
    m["timestamp"] = utc_timestamp();
    Json files = Json::array();
    for (const auto& f : ctx.outputs) {
        files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    m["files"] = files;
    write_file(ctx.out_dir / "manifest.json", m.dump(2) + "\n");
}

void write_error(const Context& ctx, const std::exception& e, int code) {
    Json j;
    j["command"] = ctx.command;
    j["exit_code"] = code;
    j["error"] = e.what();
    std::string type = "error";
    if (dynamic_cast<const ConvergenceError*>(&e)) {
        type = "convergence";
        j["residuals"] = static_cast<const ConvergenceError&>(e).residuals();
    } else if (dynamic_cast<const NumericalError*>(&e)) {
        type = "numerical";
    }
    j["type"] = type;
    try {
        std::filesystem::create_directories(ctx.out_dir);
        write_file(ctx.out_dir / "error.json", j.dump(2) + "\n");
    } catch (...) {
        // the message on stderr is all we can do
    }
}

}  // namespace

const RunConfig& Context::cfg() const {
    if (!config) throw ConfigError(command + " needs --config");
    return *config;
}

void Context::write(const std::string& name, const std::string& content) {
    for (const auto& f : outputs) {
        if (f.name == name) throw Error("output '" + name + "' written twice");
    }
    write_file(out_dir / name, content);
    outputs.push_back(OutputFile{name, sha256_hex(content), content.size()});
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"vortexlab: vortex-qubit modelling and analysis", "vortexlab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "vortexlab 0.1.0");

    std::string config_path;
    std::string out_dir = "out";
    std::string format = "json";
    std::string input;
    std::string dir;
    unsigned workers = default_workers();
    double f_q_GHz = 0.0;
    bool joint = false;

    for (const auto& c : commands()) {
        auto* sub = app.add_subcommand(c.name, c.help);
        auto* copt = sub->add_option("-c,--config", config_path, "configuration file");
        if (c.needs_config) copt->required();
        sub->add_option("-o,--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("-w,--workers", workers, "worker threads")->check(CLI::Range(1u, 1024u));
        if (c.takes_input) sub->add_option("-i,--input", input, "input CSV")->required();
        if (c.analysis) {
            sub->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
        }
        if (std::string_view(c.name) == "fit-spectrum" || std::string_view(c.name) == "batch-fit") {
            sub->add_flag("--joint", joint, "also fit the Rabi model (needs resonator points)");
        }
        if (std::string_view(c.name) == "batch-fit") {
            sub->add_option("-d,--dir", dir, "directory of spectrum CSVs")->required();
        }
        if (std::string_view(c.name) == "analyze-jumps") {
            sub->add_option("--f-q-GHz", f_q_GHz, "qubit frequency for the effective temperature");
        }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    const Command* chosen = nullptr;
    for (const auto& c : commands()) {
        if (app.got_subcommand(c.name)) chosen = &c;
    }

    Context ctx;
    ctx.command = chosen->name;
    ctx.out_dir = out_dir;
    ctx.format = format;
    ctx.workers = workers;
    ctx.log = &err;
    ctx.joint = joint;
    if (!input.empty()) ctx.input = input;
    if (!dir.empty()) ctx.input = dir;
    if (f_q_GHz > 0.0) ctx.f_q = f_q_GHz * 1e9;

    try {
        if (!config_path.empty()) ctx.config = load_config(config_path);
        ctx.seed = ctx.config ? resolve_seed(*ctx.config) : 1;
        std::filesystem::create_directories(ctx.out_dir);
        chosen->run(ctx);
        write_manifest(ctx);
    } catch (const NumericalError& e) {
        err << "vortexlab " << ctx.command << ": numerical failure: " << e.what() << "\n";
        write_error(ctx, e, kNumericalFailure);
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "vortexlab " << ctx.command << ": " << e.what() << "\n";
        return kUsageError;
    }
    return kSuccess;
}

}  // namespace vortexlab::cli
