#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <json.hpp>

#include "vortexlab/cli.hpp"
#include "vortexlab/csv.hpp"
#include "vortexlab/energetics.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/jumps.hpp"
#include "vortexlab/parallel.hpp"
#include "vortexlab/rabi.hpp"
#include "vortexlab/tunneling.hpp"

namespace vortexlab::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double opt(const std::optional<double>& v, double scale) { return v ? *v * scale : kNaN; }

DerivedScales scales_of(const RunConfig& cfg, const DeviceModel& device) {
    return derive_scales(device, kConstants, read_eps0_override(cfg));
}

const ConfigSection& section_or_empty(const RunConfig& cfg, std::string_view name) {
    static const ConfigSection empty{};
    const auto* s = cfg.find(name);
    return s ? *s : empty;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

/// Analysis output as a JSON object or a one-row CSV. Values are numbers,
/// booleans or text.
using Field = std::variant<double, long long, bool, std::string>;
using Record = std::vector<std::pair<std::string, Field>>;

void emit(Context& ctx, const std::string& stem, const Record& rec) {
    if (ctx.format == "csv") {
        std::vector<std::string> header;
        std::vector<CsvCell> cells;
        for (const auto& [k, v] : rec) {
            header.push_back(k);
            if (const auto* d = std::get_if<double>(&v)) cells.emplace_back(*d);
            else if (const auto* n = std::get_if<long long>(&v)) cells.emplace_back(*n);
            else if (const auto* b = std::get_if<bool>(&v)) cells.emplace_back(std::string(*b ? "true" : "false"));
            else cells.emplace_back(one_line(std::get<std::string>(v)));
        }
        CsvWriter w(header);
        w.row(cells);
        ctx.write(stem + ".csv", w.str());
        return;
    }
    Json j;
    for (const auto& [k, v] : rec) {
        std::visit([&j, &k](const auto& x) { j[k] = x; }, v);
    }
    ctx.write(stem + ".json", j.dump(2) + "\n");
}

void add_fit_status(Record& rec, const FitResult& fit) {
    rec.emplace_back("converged", fit.converged);
    rec.emplace_back("iterations", static_cast<long long>(fit.iterations));
    rec.emplace_back("residual_norm", fit.residual_norm);
    rec.emplace_back("message", fit.message);
}

}  // namespace

// --------------------------------------------------------------- readers

SpectrumDataset read_spectrum_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    const std::size_t cb = t.column("B_uT"), cf = t.column("f_GHz");
    const auto cs = t.find("sigma_MHz");
    const auto ck = t.find("kind");
    SpectrumDataset data;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        SpectrumPoint p;
        p.B = t.number(r, cb) * 1e-6;
        p.f = t.number(r, cf) * 1e9;
        p.sigma = cs ? t.number(r, *cs) * 1e6 : 1e6;
        if (!(p.sigma > 0.0)) throw InvalidArgument(path + ": sigma_MHz must be positive");
        const std::string kind = ck ? t.rows[r][*ck] : "qubit";
        if (kind == "qubit") {
            data.qubit_points.push_back(p);
        } else if (kind == "resonator") {
            data.resonator_points.push_back(p);
        } else {
            throw InvalidArgument(path + ": kind must be qubit or resonator, got '" + kind + "'");
        }
    }
    return data;
}

TimeTrace read_trace_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    const std::size_t ct = t.column("t_us"), cv = t.column("value");
    const auto cs = t.find("sigma");
    TimeTrace tr;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        tr.times.push_back(t.number(r, ct) * 1e-6);
        tr.values.push_back(t.number(r, cv));
        if (cs) tr.sigma.push_back(t.number(r, *cs));
    }
    validate(tr);
    return tr;
}

// ------------------------------------------------------------------ core

void cmd_scales(Context& ctx) {
    const DeviceModel d = read_device(ctx.cfg());
    const DerivedScales s = scales_of(ctx.cfg(), d);
    CsvWriter w({"Lambda_mm", "eps0_J", "eps0_GHz", "phi_S", "B_S_uT", "B_buckling_uT"});
    w.row({s.Lambda * 1e3, s.eps0, s.eps0 / kConstants.h * 1e-9, s.phi_S, s.B_S * 1e6,
           kBucklingRatio * s.B_S * 1e6});
    ctx.write("scales.csv", w.str());
}

// ------------------------------------------------------------------ rabi

void cmd_spectrum(Context& ctx) {
    const QrmParams p = read_qrm(ctx.cfg());
    const HilbertTruncation trunc = read_truncation(ctx.cfg());
    const auto B = read_field_sweep(ctx.cfg());
    const auto sweep = sweep_field(p, B, trunc, ctx.workers);
    constexpr int kLevels = 6;
    std::vector<std::string> header{"B_uT", "f_q_GHz", "f_q_dressed_GHz", "f_r_g_GHz", "f_r_e_GHz"};
    for (int i = 0; i < kLevels; ++i) header.push_back("E" + std::to_string(i) + "_GHz");
    CsvWriter w(header);
    for (const auto& pt : sweep) {
        std::vector<CsvCell> row{pt.B * 1e6, qubit_frequency(p, pt.B) * 1e-9};
        if (pt.spectrum) {
            const auto& s = *pt.spectrum;
            row.insert(row.end(), {s.f_q_dressed * 1e-9, s.f_r_g * 1e-9, s.f_r_e * 1e-9});
            for (int i = 0; i < kLevels; ++i) row.emplace_back(s.energies[i] / kConstants.h * 1e-9);
        } else {
            *ctx.log << "B = " << pt.B * 1e6 << " uT: " << pt.error << "\n";
            for (int i = 0; i < 3 + kLevels; ++i) row.emplace_back(kNaN);
        }
        w.row(row);
    }
    ctx.write("spectrum.csv", w.str());
}

void cmd_chi(Context& ctx) {
    const QrmParams p = read_qrm(ctx.cfg());
    const HilbertTruncation trunc = read_truncation(ctx.cfg());
    const auto B = read_field_sweep(ctx.cfg());
    const auto pts = chi_sweep(p, B, trunc, ctx.workers);
    CsvWriter w({"B_uT", "f_q_GHz", "f_r_g_GHz", "f_r_e_GHz", "chi_MHz"});
    for (const auto& pt : pts) {
        if (!pt.error.empty()) *ctx.log << "B = " << pt.B * 1e6 << " uT: " << pt.error << "\n";
        w.row({pt.B * 1e6, pt.f_q * 1e-9, opt(pt.f_r_g, 1e-9), opt(pt.f_r_e, 1e-9), opt(pt.chi, 1e-6)});
    }
    ctx.write("chi.csv", w.str());
}

// --------------------------------------------------------------- fitting

void cmd_fit_spectrum(Context& ctx) {
    const SpectrumDataset data = read_spectrum_csv(*ctx.input);
    Record rec;
    if (ctx.joint) {
        const JointFit jf = fit_joint_aqrm(data);
        const auto& f = jf.fit;
        rec = {{"f_r_GHz", jf.params.f_r * 1e-9},     {"f_r_se_GHz", f.error("f_r")},
               {"g_MHz", jf.params.g * 1e-6},         {"g_se_MHz", f.error("g")},
               {"gamma_GHz_per_mT", jf.params.gamma * 1e-12}, {"gamma_se_GHz_per_mT", f.error("gamma")},
               {"B0_uT", jf.params.B0 * 1e6},         {"B0_se_uT", f.error("B0")},
               {"f_q0_GHz", jf.params.f_q0 * 1e-9},   {"f_q0_se_GHz", f.error("f_q0")}};
        add_fit_status(rec, f);
    } else {
        const HyperbolaFit hf = fit_hyperbola(data.qubit_points);
        const auto& f = hf.fit;
        rec = {{"f_q0_GHz", hf.f_q0 * 1e-9},          {"f_q0_se_GHz", f.error("f_q0")},
               {"gamma_GHz_per_mT", hf.gamma * 1e-12}, {"gamma_se_GHz_per_mT", f.error("gamma")},
               {"B0_uT", hf.B0 * 1e6},                {"B0_se_uT", f.error("B0")}};
        add_fit_status(rec, f);
    }
    emit(ctx, "fit_spectrum", rec);
}

namespace {

void exponential_command(Context& ctx, const std::string& stem) {
    const TimeTrace tr = read_trace_csv(*ctx.input);
    const ExponentialFit ef = fit_exponential(tr);
    const double span = tr.times.back() - tr.times.front();
    Record rec{{"T_us", ef.T * 1e6},
               {"T_se_us", ef.fit.error("T") * span * 1e6},
               {"A", ef.A},
               {"c", ef.c}};
    add_fit_status(rec, ef.fit);
    emit(ctx, stem, rec);
}

}  // namespace

void cmd_fit_decay(Context& ctx) { exponential_command(ctx, "fit_decay"); }
void cmd_fit_echo(Context& ctx) { exponential_command(ctx, "fit_echo"); }

void cmd_fit_ramsey(Context& ctx) {
    const TimeTrace tr = read_trace_csv(*ctx.input);
    const RamseyFit rf = fit_ramsey_beat(tr);
    const double span = tr.times.back() - tr.times.front();
    const auto& f = rf.fit;
    Record rec{{"T2s_us", rf.T2s * 1e6},
               {"T2s_se_us", f.error("T2s") * span * 1e6},
               {"f1_MHz", rf.f1 * 1e-6},
               {"f2_MHz", rf.f2 * 1e-6},
               {"beat_MHz", rf.beat * 1e-6},
               {"beat_identifiable", rf.beat_identifiable},
               {"single_tone", rf.single_tone},
               {"a1", rf.a1},
               {"a2", rf.a2},
               {"c", rf.c}};
    add_fit_status(rec, f);
    emit(ctx, "fit_ramsey", rec);
}

void cmd_fit_rabi(Context& ctx) {
    const CsvTable t = read_csv(*ctx.input);
    const std::size_t ca = t.column("amplitude_V"), ct = t.column("t_us"), cv = t.column("value");
    std::vector<RabiScan> scans;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double a = t.number(r, ca);
        auto it = std::find_if(scans.begin(), scans.end(), [a](const RabiScan& s) { return s.amplitude == a; });
        if (it == scans.end()) {
            scans.push_back(RabiScan{a, {}});
            it = scans.end() - 1;
        }
        it->trace.times.push_back(t.number(r, ct) * 1e-6);
        it->trace.values.push_back(t.number(r, cv));
    }
    const RabiLinearFit lf = fit_rabi_linear(scans);
    Record rec{{"slope_MHz_per_V", lf.slope * 1e-6}, {"slope_se_MHz_per_V", lf.slope_se * 1e-6},
               {"traces", static_cast<long long>(lf.traces.size())}};
    std::size_t used = 0;
    for (const auto& tr : lf.traces) used += tr.included;
    rec.emplace_back("traces_used", static_cast<long long>(used));
    add_fit_status(rec, lf.fit);
    emit(ctx, "fit_rabi", rec);

    CsvWriter w({"amplitude_V", "f_MHz", "f_se_MHz", "included", "warning"});
    for (const auto& tr : lf.traces) {
        w.row({tr.amplitude, tr.frequency * 1e-6, tr.frequency_se * 1e-6,
               std::string(tr.included ? "true" : "false"), one_line(tr.warning)});
    }
    ctx.write("fit_rabi_traces.csv", w.str());
}

// ------------------------------------------------------------ energetics

void cmd_landscape(Context& ctx) {
    const DeviceModel d = read_device(ctx.cfg());
    const DerivedScales s = scales_of(ctx.cfg(), d);
    const auto sites = read_sites(ctx.cfg());
    for (const auto& site : sites) validate(site, d);
    const auto& sw = section_or_empty(ctx.cfg(), "sweep");
    const double B = sw.number_or("B_uT", 0.0) * 1e-6;
    const long long nx = sw.integer_or("x_points", 200);
    const long long ny = sw.integer_or("y_points", 1);
    const double y0 = sw.number_or("y_min_nm", 0.0) * 1e-9;
    const double y1 = sw.number_or("y_max_nm", y0 * 1e9) * 1e-9;
    if (nx < 2 || ny < 1) throw ConfigError("[sweep] x_points >= 2 and y_points >= 1 required");
    std::vector<std::vector<double>> V(static_cast<std::size_t>(ny), std::vector<double>(static_cast<std::size_t>(nx)));
    const auto x_at = [&](long long i) { return d.w * (static_cast<double>(i) + 0.5) / static_cast<double>(nx); };
    const auto y_at = [&](long long j) {
        return ny == 1 ? y0 : y0 + (y1 - y0) * static_cast<double>(j) / static_cast<double>(ny - 1);
    };
    parallel_for(static_cast<std::size_t>(ny), ctx.workers, [&](std::size_t j) {
        for (long long i = 0; i < nx; ++i) {
            V[j][static_cast<std::size_t>(i)] =
                total_potential(x_at(i), y_at(static_cast<long long>(j)), B, 0.0, sites, s, d);
        }
    });
    CsvWriter w({"x_nm", "y_nm", "V_over_eps0", "V_GHz"});
    for (long long j = 0; j < ny; ++j) {
        for (long long i = 0; i < nx; ++i) {
            const double v = V[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            w.row({x_at(i) * 1e9, y_at(j) * 1e9, v / s.eps0, v / kConstants.h * 1e-9});
        }
    }
    ctx.write("landscape.csv", w.str());
}

void cmd_gamma_map(Context& ctx) {
    const DeviceModel d = read_device(ctx.cfg());
    const DerivedScales s = scales_of(ctx.cfg(), d);
    const auto& sw = section_or_empty(ctx.cfg(), "sweep");
    const double dmin = sw.number_or("delta_min_nm", 5.0) * 1e-9;
    const double dmax = sw.number_or("delta_max_nm", 50.0) * 1e-9;
    const double xmin = sw.number_or("xbar_min_um", 0.5 * d.w * 1e6) * 1e-6;
    const double xmax = sw.number_or("xbar_max_um", 0.75 * d.w * 1e6) * 1e-6;
    const long long n = sw.integer_or("map_points", 200);
    if (n < 2) throw ConfigError("[sweep] map_points must be at least 2");
    CsvWriter w({"delta_LR_nm", "x_bar_um", "gamma_GHz_per_mT"});
    for (long long i = 0; i < n; ++i) {
        const double delta = dmin + (dmax - dmin) * static_cast<double>(i) / static_cast<double>(n - 1);
        for (long long j = 0; j < n; ++j) {
            const double xb = xmin + (xmax - xmin) * static_cast<double>(j) / static_cast<double>(n - 1);
            double g = kNaN;
            try {
                g = gamma_from_geometry(delta, xb, s, d) * 1e-12;
            } catch (const DomainError&) {
            }
            w.row({delta * 1e9, xb * 1e6, g});
        }
    }
    ctx.write("gamma_map.csv", w.str());
}

void cmd_pair(Context& ctx) {
    const DeviceModel d = read_device(ctx.cfg());
    const DerivedScales s = scales_of(ctx.cfg(), d);
    const auto& p = section_or_empty(ctx.cfg(), "pair");
    VortexPair pair;
    const double x1 = p.number_or("x1_um", 0.5 * d.w * 1e6) * 1e-6;
    const double x2 = p.number_or("x2_um", 0.5 * d.w * 1e6) * 1e-6;
    pair.delta_LR = p.number_or("delta_LR_nm", 10.0) * 1e-9;
    pair.alpha = {p.number_or("alpha_x", 1.0), p.number_or("alpha_y", 1.0)};
    pair.beta = {p.number_or("beta_x", 1.0), p.number_or("beta_y", 1.0)};
    const double smin = p.number_or("sep_min_um", d.w * 1e6) * 1e-6;
    const double smax = p.number_or("sep_max_um", 4.0 * d.w * 1e6) * 1e-6;
    const long long n = p.integer_or("points", 50);
    if (n < 1) throw ConfigError("[pair] points must be at least 1");
    const double unit = s.eps0 / 1e-12;  // eps0 per um^2
    CsvWriter w({"separation_um", "H_xx_eps0_per_um2", "H_xy_eps0_per_um2", "H_yx_eps0_per_um2",
                 "H_yy_eps0_per_um2", "coupling_over_eps0", "coupling_GHz"});
    for (long long i = 0; i < n; ++i) {
        const double sep = n == 1 ? smin : smin + (smax - smin) * static_cast<double>(i) / static_cast<double>(n - 1);
        pair.R1 = {x1, 0.0};
        pair.R2 = {x2, sep};
        const PairCoupling c = pair_coupling(pair, s, d);
        w.row({sep * 1e6, c.hessian(0, 0) / unit, c.hessian(0, 1) / unit, c.hessian(1, 0) / unit,
               c.hessian(1, 1) / unit, c.energy_over_eps0, c.energy / kConstants.h * 1e-9});
    }
    ctx.write("pair.csv", w.str());
}

// ------------------------------------------------------------- tunneling

void cmd_tunnel(Context& ctx) {
    const DeviceModel d = read_device(ctx.cfg());
    const DerivedScales s = scales_of(ctx.cfg(), d);
    const auto sites = read_sites(ctx.cfg());
    if (sites.size() < 2) throw ConfigError("tunnel needs at least two [pinning] sites");
    const auto& tn = ctx.cfg().require("tunneling");
    const auto window = site_window(sites);
    const double lo = tn.has("x_min_nm") ? tn.number("x_min_nm") * 1e-9 : window[0];
    const double hi = tn.has("x_max_nm") ? tn.number("x_max_nm") * 1e-9 : window[1];
    const int points = static_cast<int>(tn.integer_or("grid_points", 1024));
    const int k = static_cast<int>(tn.integer_or("k_levels", 2));
    if (k < 2 || k > kMaxLevels) throw ConfigError("[tunneling] k_levels must be in [2, 10]");
    const TunnelModel model = TunnelModel::from_site(sites.front(), tn.number("y_zpf_nm") * 1e-9);
    const auto B = read_field_sweep(ctx.cfg());
    const TunnelCurve curve = spectrum_vs_field(sites, {lo, hi}, B, model, s, d, points, ctx.workers);
    CsvWriter w({"B_uT", "f_q_GHz", "E0_GHz", "E1_GHz"});
    for (const auto& p : curve.points) {
        if (p.error) {
            *ctx.log << "B = " << p.B * 1e6 << " uT: " << *p.error << "\n";
            w.row({p.B * 1e6, kNaN, kNaN, kNaN});
            continue;
        }
        w.row({p.B * 1e6, p.f_q * 1e-9, p.E0 / kConstants.h * 1e-9, p.E1 / kConstants.h * 1e-9});
    }
    ctx.write("tunnel.csv", w.str());

    if (k > 2) {
        // higher levels along the same sweep, one solve per field
        const Grid grid = Grid::line(lo, hi, points);
        std::vector<std::vector<double>> levels(B.size());
        parallel_for(B.size(), ctx.workers, [&](std::size_t i) {
            try {
                const auto V = sample_potential(grid, sites, B[i], s, d);
                levels[i] = solve_schrodinger(grid, V, model, k).energies;
            } catch (const Error&) {
                levels[i].assign(static_cast<std::size_t>(k), kNaN);
            }
        });
        CsvWriter lw({"B_uT", "level", "E_GHz"});
        for (std::size_t i = 0; i < B.size(); ++i) {
            for (int n = 0; n < k; ++n) {
                lw.row({B[i] * 1e6, static_cast<long long>(n),
                        levels[i][static_cast<std::size_t>(n)] / kConstants.h * 1e-9});
            }
        }
        ctx.write("tunnel_levels.csv", lw.str());
    }
    Json j;
    j["sweet_spot_uT"] = curve.sweet_spot ? Json(*curve.sweet_spot * 1e6) : Json(nullptr);
    j["Omega_rad_per_s"] = model.Omega;
    j["y_zpf_nm"] = model.y_zpf * 1e9;
    j["grid_points"] = points;
    ctx.write("tunnel_summary.json", j.dump(2) + "\n");
}

// ----------------------------------------------------------------- jumps

void cmd_synth_jumps(Context& ctx) {
    const TelegraphParams tg = read_telegraph(ctx.cfg());
    const ReadoutModel ro = read_readout(ctx.cfg());
    const double duration = ctx.cfg().require("jumps").number_or("duration_s", 1.0);
    const Trajectory traj = simulate_trajectory(tg, ro, duration, ctx.seed);
    CsvWriter w({"t_us", "I", "Q", "true_state"});
    for (std::size_t i = 0; i < traj.size(); ++i) {
        w.row({traj.times[i] * 1e6, traj.iq[i].real(), traj.iq[i].imag(),
               static_cast<long long>(traj.true_states[i])});
    }
    ctx.write("trajectory.csv", w.str());
}

void cmd_analyze_jumps(Context& ctx) {
    const CsvTable t = read_csv(*ctx.input);
    const std::size_t ct = t.column("t_us"), ci = t.column("I"), cq = t.column("Q");
    Trajectory traj;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        traj.times.push_back(t.number(r, ct) * 1e-6);
        traj.iq.emplace_back(t.number(r, ci), t.number(r, cq));
    }
    if (traj.size() < 2) throw InvalidArgument("trajectory needs at least two points");
    std::vector<double> dt;
    for (std::size_t i = 1; i < traj.size(); ++i) dt.push_back(traj.times[i] - traj.times[i - 1]);
    std::nth_element(dt.begin(), dt.begin() + static_cast<long>(dt.size() / 2), dt.end());
    const double spacing = dt[dt.size() / 2];
    if (!(spacing > 0.0)) throw InvalidArgument("trajectory times must increase");

    const ClusterResult cl = iq_cluster(traj.iq);
    ReadoutModel ro;
    ro.center_g = cl.center_g;
    ro.center_e = cl.center_e;
    ro.sigma_cloud = cl.sigma_cloud;
    ro.spacing = spacing;
    ro.tau_m = spacing;
    const auto states = latching_filter(traj, ro);
    const DwellStats ds = dwell_statistics(states, spacing);

    std::optional<double> f_q = ctx.f_q;
    if (!f_q && ctx.config) {
        if (const auto* q = ctx.config->find("qrm"); q && q->has("f_q0_GHz")) f_q = q->number("f_q0_GHz") * 1e9;
    }
    Record rec{{"T_up_us", ds.T_up_hat * 1e6},     {"T_down_us", ds.T_down_hat * 1e6},
               {"T1_us", ds.T1_hat * 1e6},         {"P_e", cl.P_e},
               {"T_up_se_us", ds.T_up_se * 1e6},   {"T_down_se_us", ds.T_down_se * 1e6},
               {"ground_dwells", static_cast<long long>(ds.ground_dwells)},
               {"excited_dwells", static_cast<long long>(ds.excited_dwells)},
               {"P_e_assigned", ds.P_e}};
    double T_eff = kNaN;
    std::string note;
    if (!f_q) {
        note = "no qubit frequency given";
    } else {
        try {
            T_eff = effective_temperature(cl.P_e, *f_q) * 1e3;
        } catch (const NegativeTemperature& e) {
            note = e.what();
        }
    }
    rec.emplace_back("T_eff_mK", T_eff);
    rec.emplace_back("note", note);
    emit(ctx, "analysis", rec);
}

// ----------------------------------------------------------------- batch

std::vector<BatchRow> batch_fit(const std::filesystem::path& dir, bool joint, unsigned workers) {
    if (!std::filesystem::is_directory(dir)) {
        throw InvalidArgument("'" + dir.string() + "' is not a directory");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw InvalidArgument("no *.csv datasets in '" + dir.string() + "'");
    std::vector<BatchRow> rows(files.size());
    parallel_for(files.size(), workers, [&](std::size_t i) {
        BatchRow& row = rows[i];
        row.dataset = files[i].filename().string();
        try {
            const SpectrumDataset data = read_spectrum_csv(files[i].string());
            const HyperbolaFit hf = fit_hyperbola(data.qubit_points);
            row.f_q0 = hf.f_q0;
            row.B0 = hf.B0;
            row.gamma = hf.gamma;
            row.converged = hf.fit.converged;
            if (!hf.fit.converged) row.error = hf.fit.message;
            if (joint && !data.resonator_points.empty()) {
                QrmParams init = joint_initial_guess(data);
                init.f_q0 = hf.f_q0;
                init.B0 = hf.B0;
                init.gamma = hf.gamma;
                const JointFit jf = fit_joint_aqrm(data, init);
                row.f_q0 = jf.params.f_q0;
                row.B0 = jf.params.B0;
                row.gamma = jf.params.gamma;
                row.g = jf.params.g;
                row.converged = jf.fit.converged;
                row.error = jf.fit.converged ? "" : jf.fit.message;
            }
        } catch (const std::exception& e) {
            row.converged = false;
            row.error = e.what();
        }
    });
    return rows;
}

void cmd_batch_fit(Context& ctx) {
    const auto rows = batch_fit(*ctx.input, ctx.joint, ctx.workers);
    CsvWriter w({"dataset", "converged", "f_q0_GHz", "B0_uT", "gamma_GHz_per_mT", "g_MHz", "error"});
    Json arr = Json::array();
    for (const auto& r : rows) {
        w.row({r.dataset, std::string(r.converged ? "true" : "false"), r.f_q0 * 1e-9, r.B0 * 1e6,
               r.gamma * 1e-12, r.g * 1e-6, one_line(r.error)});
        Json j;
        j["dataset"] = r.dataset;
        j["converged"] = r.converged;
        j["f_q0_GHz"] = r.f_q0 * 1e-9;
        j["B0_uT"] = r.B0 * 1e6;
        j["gamma_GHz_per_mT"] = r.gamma * 1e-12;
        j["g_MHz"] = r.g * 1e-6;
        j["error"] = r.error;
        arr.push_back(j);
    }
    if (ctx.format == "csv") {
        ctx.write("batch.csv", w.str());
    } else {
        ctx.write("batch.json", arr.dump(2) + "\n");
    }
}

}  // namespace vortexlab::cli
