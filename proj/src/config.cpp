#include "vortexlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vortexlab/errors.hpp"

namespace vortexlab {

namespace {

enum class Kind { Number, Integer, List };

struct KeySpec {
    std::string_view key;
    Kind kind;
};

struct SectionSpec {
    std::string_view name;
    bool repeatable;
    std::vector<KeySpec> keys;
};

// Count and dimensionless keys are the only ones without a unit suffix.
const std::vector<SectionSpec>& schema() {
    static const std::vector<SectionSpec> s{
        {"device", false,
         {{"w_um", Kind::Number}, {"t_nm", Kind::Number}, {"length_um", Kind::Number},
          {"xi_nm", Kind::Number}, {"lambda_L_um", Kind::Number}, {"f_r_GHz", Kind::Number},
          {"Z_r_ohm", Kind::Number}, {"eps0_GHz", Kind::Number}}},
        {"qrm", false,
         {{"f_r_GHz", Kind::Number}, {"g_MHz", Kind::Number}, {"gamma_GHz_per_mT", Kind::Number},
          {"B0_uT", Kind::Number}, {"f_q0_GHz", Kind::Number}, {"theta_deg", Kind::Number},
          {"phi_deg", Kind::Number}, {"n_fock", Kind::Integer}}},
        {"pinning", true,
         {{"x_nm", Kind::Number}, {"y_nm", Kind::Number}, {"V_GHz", Kind::Number},
          {"sigma_nm", Kind::Number}}},
        {"tunneling", false,
         {{"grid_points", Kind::Integer}, {"x_min_nm", Kind::Number}, {"x_max_nm", Kind::Number},
          {"y_zpf_nm", Kind::Number}, {"k_levels", Kind::Integer}}},
        {"jumps", false,
         {{"T_up_us", Kind::Number}, {"T_down_us", Kind::Number}, {"sigma_cloud", Kind::Number},
          {"separation_sigma", Kind::Number}, {"spacing_us", Kind::Number},
          {"tau_m_us", Kind::Number}, {"duration_s", Kind::Number}, {"seed", Kind::Integer}}},
        {"sweep", false,
         {{"B_list_uT", Kind::List}, {"B_start_uT", Kind::Number}, {"B_stop_uT", Kind::Number},
          {"points", Kind::Integer}, {"B_uT", Kind::Number}, {"x_points", Kind::Integer},
          {"y_min_nm", Kind::Number}, {"y_max_nm", Kind::Number}, {"y_points", Kind::Integer},
          {"delta_min_nm", Kind::Number}, {"delta_max_nm", Kind::Number},
          {"xbar_min_um", Kind::Number}, {"xbar_max_um", Kind::Number},
          {"map_points", Kind::Integer}}},
        {"pair", false,
         {{"x1_um", Kind::Number}, {"x2_um", Kind::Number}, {"delta_LR_nm", Kind::Number},
          {"sep_min_um", Kind::Number}, {"sep_max_um", Kind::Number}, {"points", Kind::Integer},
          {"alpha_x", Kind::Number}, {"alpha_y", Kind::Number}, {"beta_x", Kind::Number},
          {"beta_y", Kind::Number}}},
    };
    return s;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> to_integer(std::string_view s) {
    s = trim(s);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<double> to_list(std::string_view s, const std::string& where) {
    std::vector<double> out;
    s = trim(s);
    if (s.empty()) return out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const auto item = s.substr(pos, comma == std::string_view::npos ? s.size() - pos : comma - pos);
        const auto v = to_double(item);
        if (!v) throw ConfigError(where + ": bad list entry '" + std::string(trim(item)) + "'");
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

const SectionSpec* find_spec(std::string_view name) {
    for (const auto& s : schema()) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

const KeySpec* find_key(const SectionSpec& spec, std::string_view key) {
    for (const auto& k : spec.keys) {
        if (k.key == key) return &k;
    }
    return nullptr;
}

std::string where(const ConfigSection& s, std::string_view key) {
    return "[" + s.name + "] " + std::string(key);
}

constexpr double kPi = std::numbers::pi;

}  // namespace

bool ConfigSection::has(std::string_view key) const { return text(key).has_value(); }

std::optional<std::string> ConfigSection::text(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return v;
    }
    return std::nullopt;
}

double ConfigSection::number(std::string_view key) const {
    const auto t = text(key);
    if (!t) throw ConfigError(where(*this, key) + " is required");
    const auto v = to_double(*t);
    if (!v) throw ConfigError(where(*this, key) + ": not a number: '" + *t + "'");
    return *v;
}

double ConfigSection::number_or(std::string_view key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

long long ConfigSection::integer(std::string_view key) const {
    const auto t = text(key);
    if (!t) throw ConfigError(where(*this, key) + " is required");
    const auto v = to_integer(*t);
    if (!v) throw ConfigError(where(*this, key) + ": not an integer: '" + *t + "'");
    return *v;
}

long long ConfigSection::integer_or(std::string_view key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
}

std::vector<double> ConfigSection::list(std::string_view key) const {
    const auto t = text(key);
    if (!t) return {};
    return to_list(*t, where(*this, key));
}

const ConfigSection* RunConfig::find(std::string_view name) const {
    for (const auto& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

const ConfigSection& RunConfig::require(std::string_view name) const {
    const auto* s = find(name);
    if (!s) throw ConfigError(origin + ": missing section [" + std::string(name) + "]");
    return *s;
}

std::vector<const ConfigSection*> RunConfig::all(std::string_view name) const {
    std::vector<const ConfigSection*> out;
    for (const auto& s : sections) {
        if (s.name == name) out.push_back(&s);
    }
    return out;
}

RunConfig parse_config(std::string_view text, std::string_view origin) {
    RunConfig cfg;
    cfg.source = std::string(text);
    cfg.origin = std::string(origin);
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    const SectionSpec* spec = nullptr;
    const auto fail = [&](const std::string& msg) {
        throw ConfigError(cfg.origin + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header");
            const auto name = trim(line.substr(1, line.size() - 2));
            spec = find_spec(name);
            if (!spec) fail("unknown section [" + std::string(name) + "]");
            if (!spec->repeatable && cfg.find(name)) fail("section [" + std::string(name) + "] repeated");
            cfg.sections.push_back(ConfigSection{std::string(name), lineno, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected key = value");
        if (!spec) fail("key outside of any section");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const KeySpec* k = find_key(*spec, key);
        if (!k) {
            fail("unknown key '" + std::string(key) + "' in [" + std::string(spec->name) +
                 "] (numeric keys carry a unit suffix such as _um, _nm, _GHz, _MHz, _uT, _us)");
        }
        auto& section = cfg.sections.back();
        if (section.has(key)) fail("duplicate key '" + std::string(key) + "'");
        switch (k->kind) {
            case Kind::Number:
                if (!to_double(value)) fail("'" + std::string(key) + "' is not a number");
                break;
            case Kind::Integer:
                if (!to_integer(value)) fail("'" + std::string(key) + "' is not an integer");
                break;
            case Kind::List:
                to_list(value, cfg.origin + ":" + std::to_string(lineno));
                break;
        }
        section.entries.emplace_back(std::string(key), std::string(value));
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

std::uint64_t resolve_seed(const RunConfig& cfg) {
    if (const char* env = std::getenv("VORTEXLAB_SEED"); env && *env) {
        std::uint64_t v = 0;
        const std::string_view s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ConfigError("VORTEXLAB_SEED is not a non-negative integer");
        }
        return v;
    }
    if (const auto* j = cfg.find("jumps"); j && j->has("seed")) {
        const long long v = j->integer("seed");
        if (v < 0) throw ConfigError("[jumps] seed must be non-negative");
        return static_cast<std::uint64_t>(v);
    }
    return 1;
}

DeviceModel read_device(const RunConfig& cfg) {
    const auto* s = cfg.find("device");
    DeviceModel d = reference_device();
    if (!s) return d;
    d.w = s->number_or("w_um", d.w * 1e6) * 1e-6;
    d.t = s->number_or("t_nm", d.t * 1e9) * 1e-9;
    d.length = s->number_or("length_um", d.length * 1e6) * 1e-6;
    d.xi = s->number_or("xi_nm", d.xi * 1e9) * 1e-9;
    d.lambda_L = s->number_or("lambda_L_um", d.lambda_L * 1e6) * 1e-6;
    d.f_r = s->number_or("f_r_GHz", d.f_r * 1e-9) * 1e9;
    d.Z_r = s->number_or("Z_r_ohm", d.Z_r);
    validate(d);
    return d;
}

std::optional<double> read_eps0_override(const RunConfig& cfg) {
    const auto* s = cfg.find("device");
    if (!s || !s->has("eps0_GHz")) return std::nullopt;
    return s->number("eps0_GHz") * 1e9 * kConstants.h;
}

QrmParams read_qrm(const RunConfig& cfg) {
    const auto& s = cfg.require("qrm");
    QrmParams p;
    p.f_r = s.number("f_r_GHz") * 1e9;
    p.g = s.number("g_MHz") * 1e6;
    p.gamma = s.number("gamma_GHz_per_mT") * 1e9 / 1e-3;
    p.B0 = s.number("B0_uT") * 1e-6;
    p.f_q0 = s.number("f_q0_GHz") * 1e9;
    p.theta = s.number_or("theta_deg", 90.0) * kPi / 180.0;
    p.phi = s.number_or("phi_deg", 90.0) * kPi / 180.0;
    // exact special angles so that the snapped orientation check applies
    for (double* a : {&p.theta, &p.phi}) {
        if (std::abs(*a - kPi / 2) < 1e-12) *a = kPi / 2;
    }
    validate(p);
    return p;
}

HilbertTruncation read_truncation(const RunConfig& cfg) {
    HilbertTruncation t;
    if (const auto* s = cfg.find("qrm")) t.n_fock = static_cast<int>(s->integer_or("n_fock", t.n_fock));
    validate(t);
    return t;
}

std::vector<PinningSite> read_sites(const RunConfig& cfg) {
    std::vector<PinningSite> sites;
    for (const auto* s : cfg.all("pinning")) {
        PinningSite p;
        p.x = s->number("x_nm") * 1e-9;
        p.y = s->number_or("y_nm", 0.0) * 1e-9;
        p.V = s->number("V_GHz") * 1e9 * kConstants.h;
        p.sigma = s->number("sigma_nm") * 1e-9;
        sites.push_back(p);
    }
    return sites;
}

TelegraphParams read_telegraph(const RunConfig& cfg) {
    const auto& s = cfg.require("jumps");
    TelegraphParams tg{s.number("T_up_us") * 1e-6, s.number("T_down_us") * 1e-6};
    validate(tg);
    return tg;
}

ReadoutModel read_readout(const RunConfig& cfg) {
    const auto& s = cfg.require("jumps");
    return readout_with_separation(s.number_or("sigma_cloud", 1.0), s.number_or("separation_sigma", 6.0),
                                   s.number_or("tau_m_us", 1.2) * 1e-6,
                                   s.number_or("spacing_us", 5.0) * 1e-6);
}

std::vector<double> read_field_sweep(const RunConfig& cfg) {
    const auto& s = cfg.require("sweep");
    std::vector<double> B;
    if (s.has("B_list_uT")) {
        for (double v : s.list("B_list_uT")) B.push_back(v * 1e-6);
    } else if (s.has("B_start_uT") || s.has("B_stop_uT") || s.has("points")) {
        const double a = s.number("B_start_uT"), b = s.number("B_stop_uT");
        const long long n = s.integer("points");
        if (n < 1) throw ConfigError("[sweep] points must be at least 1");
        for (long long i = 0; i < n; ++i) {
            const double u = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
            B.push_back((a + (b - a) * u) * 1e-6);
        }
    }
    if (B.empty()) throw ConfigError("[sweep] field list is empty");
    return B;
}

}  // namespace vortexlab
