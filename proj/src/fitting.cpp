#include "vortexlab/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>

#include "vortexlab/errors.hpp"

namespace vortexlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kUnlabeledPenalty = 1e3;

double wrap_phase(double x) { return std::remainder(x, kTwoPi); }

struct SpectralPeak {
    double f;                     // cycles per unit time
    std::complex<double> amp;     // sum of (y - mean) exp(-2 pi i f t)
    double power;
};

// Local maxima of the discrete-time Fourier transform of the mean-free
// signal, strongest first. Times may be non-uniform.
std::vector<SpectralPeak> spectral_peaks(std::span<const double> t, std::span<const double> y) {
    const std::size_t n = t.size();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    const double span = t.back() - t.front();
    const double fmax = 0.5 * static_cast<double>(n - 1) / span;
    const double df = 1.0 / (16.0 * span);
    std::vector<SpectralPeak> grid;
    for (double f = df; f <= fmax; f += df) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            acc += (y[i] - mean) * std::polar(1.0, -kTwoPi * f * (t[i] - t.front()));
        }
        grid.push_back({f, acc, std::norm(acc)});
    }
    std::vector<SpectralPeak> peaks;
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        if (grid[k].power > grid[k - 1].power && grid[k].power >= grid[k + 1].power) {
            peaks.push_back(grid[k]);
        }
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const SpectralPeak& a, const SpectralPeak& b) { return a.power > b.power; });
    return peaks;
}

double tail_mean(std::span<const double> y) {
    const std::size_t k = std::max<std::size_t>(1, y.size() / 10);
    double s = 0.0;
    for (std::size_t i = y.size() - k; i < y.size(); ++i) s += y[i];
    return s / static_cast<double>(k);
}

// Trace with times shifted to start at zero and scaled to unit span.
struct ScaledTrace {
    std::vector<double> t;
    std::vector<double> y;
    std::vector<double> w;  // 1/sigma
    double t0 = 0.0;
    double span = 1.0;
};

ScaledTrace scale(const TimeTrace& trace) {
    ScaledTrace s;
    s.t0 = trace.times.front();
    s.span = trace.times.back() - trace.times.front();
    for (std::size_t i = 0; i < trace.size(); ++i) {
        s.t.push_back((trace.times[i] - s.t0) / s.span);
        s.y.push_back(trace.values[i]);
        s.w.push_back(1.0 / trace.sigma_at(i));
    }
    return s;
}

}  // namespace

void validate(const TimeTrace& trace) {
    if (trace.values.size() != trace.times.size() ||
        (!trace.sigma.empty() && trace.sigma.size() != trace.times.size())) {
        throw InvalidArgument("time trace columns differ in length");
    }
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (!std::isfinite(trace.times[i]) || !std::isfinite(trace.values[i])) {
            throw InvalidArgument("time trace contains non-finite values");
        }
        if (i > 0 && !(trace.times[i] > trace.times[i - 1])) {
            throw InvalidArgument("time trace times must be strictly ascending");
        }
        if (!trace.sigma.empty() && !(trace.sigma[i] > 0.0)) {
            throw InvalidArgument("time trace sigma must be positive");
        }
    }
}

// ---------------------------------------------------------------- hyperbola

HyperbolaFit fit_hyperbola(std::span<const SpectrumPoint> points) {
    if (points.size() < 3) throw DegenerateFit("fit_hyperbola: need at least 3 points");
    double bmin = points[0].B, bmax = points[0].B;
    std::size_t lowest = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (!std::isfinite(p.B) || !std::isfinite(p.f) || !(p.sigma > 0.0)) {
            throw InvalidArgument("fit_hyperbola: invalid point");
        }
        bmin = std::min(bmin, p.B);
        bmax = std::max(bmax, p.B);
        if (p.f < points[lowest].f ||
            (p.f == points[lowest].f && p.B < points[lowest].B)) {
            lowest = i;
        }
    }
    if (!(bmax > bmin)) throw DegenerateFit("fit_hyperbola: all fields identical");

    // internal units: GHz, GHz/mT, uT
    const double B0_init = points[lowest].B * 1e6;
    const double fq0_init = points[lowest].f * 1e-9;
    std::size_t far = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (std::abs(points[i].B * 1e6 - B0_init) > std::abs(points[far].B * 1e6 - B0_init)) {
            far = i;
        }
    }
    const double dB_far = std::abs(points[far].B * 1e6 - B0_init) * 1e-3;  // mT
    const double ff = points[far].f * 1e-9;
    double gamma_init = std::sqrt(std::max(ff * ff - fq0_init * fq0_init, 0.0)) / dB_far;
    if (!(gamma_init > 0.0)) gamma_init = 1.0;

    const auto residuals = [points](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double d = x(1) * (points[i].B * 1e6 - x(2)) * 1e-3;
            const double model = std::sqrt(x(0) * x(0) + d * d);
            r(static_cast<Eigen::Index>(i)) = (model - points[i].f * 1e-9) / (points[i].sigma * 1e-9);
        }
        return r;
    };
    Eigen::Vector3d init(fq0_init, gamma_init, B0_init);
    HyperbolaFit out;
    out.fit = least_squares(residuals, {"f_q0", "gamma", "B0"}, init);
    out.f_q0 = std::abs(out.fit.params(0)) * 1e9;
    out.gamma = std::abs(out.fit.params(1)) * 1e9 / 1e-3;
    out.B0 = out.fit.params(2) * 1e-6;
    return out;
}

// ---------------------------------------------------------- joint spectrum

QrmParams joint_initial_guess(const SpectrumDataset& data, Orientation orientation) {
    if (data.qubit_points.empty()) {
        throw DegenerateFit("joint fit needs qubit points for the initial guess");
    }
    QrmParams p;
    p.theta = orientation.theta;
    p.phi = orientation.phi;
    const auto lowest = std::min_element(
        data.qubit_points.begin(), data.qubit_points.end(),
        [](const SpectrumPoint& a, const SpectrumPoint& b) { return a.f < b.f; });
    p.B0 = lowest->B;
    p.f_q0 = lowest->f;
    const auto far = std::max_element(
        data.qubit_points.begin(), data.qubit_points.end(),
        [&](const SpectrumPoint& a, const SpectrumPoint& b) {
            return std::abs(a.B - p.B0) < std::abs(b.B - p.B0);
        });
    const double dB = std::abs(far->B - p.B0);
    p.gamma = dB > 0.0 ? std::sqrt(std::max(far->f * far->f - p.f_q0 * p.f_q0, 0.0)) / dB : 0.0;
    if (!(p.gamma > 0.0)) p.gamma = 1e13;
    if (!data.resonator_points.empty()) {
        std::vector<double> fr;
        for (const auto& pt : data.resonator_points) fr.push_back(pt.f);
        std::nth_element(fr.begin(), fr.begin() + static_cast<long>(fr.size() / 2), fr.end());
        p.f_r = fr[fr.size() / 2];
    } else {
        throw DegenerateFit("joint fit needs resonator points to fix f_r");
    }
    p.g = 0.01 * p.f_r;
    return p;
}

JointFit fit_joint_aqrm(const SpectrumDataset& data, std::optional<QrmParams> init,
                        const HilbertTruncation& trunc) {
    const std::size_t total = data.qubit_points.size() + data.resonator_points.size();
    if (total < 4) throw DegenerateFit("joint fit needs at least 4 points");
    for (const auto* set : {&data.qubit_points, &data.resonator_points}) {
        for (const auto& p : *set) {
            if (!std::isfinite(p.B) || !std::isfinite(p.f) || !(p.sigma > 0.0)) {
                throw InvalidArgument("joint fit: invalid spectrum point");
            }
        }
    }
    const QrmParams start = init ? *init : joint_initial_guess(data);
    validate(start);
    validate(trunc);

    std::vector<double> fields;
    for (const auto* set : {&data.qubit_points, &data.resonator_points}) {
        for (const auto& p : *set) fields.push_back(p.B);
    }
    std::sort(fields.begin(), fields.end());
    fields.erase(std::unique(fields.begin(), fields.end()), fields.end());

    const auto to_params = [start](const Eigen::VectorXd& x) {
        QrmParams p = start;
        p.f_r = std::abs(x(0)) * 1e9;
        p.g = std::abs(x(1)) * 1e6;
        p.gamma = std::abs(x(2)) * 1e9 / 1e-3;
        p.B0 = x(3) * 1e-6;
        p.f_q0 = std::abs(x(4)) * 1e9;
        return p;
    };

    const auto residuals = [&](const Eigen::VectorXd& x) {
        const QrmParams p = to_params(x);
        std::map<double, std::optional<LabeledSpectrum>> spectra;
        for (double B : fields) {
            try {
                spectra[B] = solve_qrm(p, B, trunc);
            } catch (const Error&) {
                spectra[B] = std::nullopt;
            }
        }
        Eigen::VectorXd r(static_cast<Eigen::Index>(total));
        Eigen::Index k = 0;
        for (const auto& pt : data.qubit_points) {
            const auto& s = spectra[pt.B];
            r(k++) = s ? (s->f_q_dressed - pt.f) / pt.sigma
                       : (qubit_frequency(p, pt.B) - pt.f) / pt.sigma + kUnlabeledPenalty;
        }
        for (const auto& pt : data.resonator_points) {
            const auto& s = spectra[pt.B];
            r(k++) = s ? (s->f_r_g - pt.f) / pt.sigma : (p.f_r - pt.f) / pt.sigma + kUnlabeledPenalty;
        }
        return r;
    };

    Eigen::VectorXd x0(5);
    x0 << start.f_r * 1e-9, start.g * 1e-6, start.gamma * 1e-12, start.B0 * 1e6, start.f_q0 * 1e-9;
    JointFit out;
    out.fit = least_squares(residuals, {"f_r", "g", "gamma", "B0", "f_q0"}, x0);
    out.params = to_params(out.fit.params);
    return out;
}

// ------------------------------------------------------------ decay/echo

ExponentialFit fit_exponential(const TimeTrace& trace) {
    validate(trace);
    if (trace.size() < 4) throw DegenerateFit("fit_exponential: need at least 4 points");
    const ScaledTrace s = scale(trace);
    const double c0 = tail_mean(s.y);
    const double A0 = s.y.front() - c0;
    double T0 = 1.0 / 3.0;
    if (A0 != 0.0) {
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            if (std::abs(s.y[i] - c0) <= std::abs(A0) / std::numbers::e) {
                T0 = std::max(s.t[i], 1e-3);
                break;
            }
        }
    }
    const auto residuals = [&s](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(s.t.size()));
        const double T = std::abs(x(0));
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            const double model = x(1) * std::exp(-s.t[i] / T) + x(2);
            r(static_cast<Eigen::Index>(i)) = (model - s.y[i]) * s.w[i];
        }
        return r;
    };
    ExponentialFit out;
    out.fit = least_squares(residuals, {"T", "A", "c"}, Eigen::Vector3d(T0, A0, c0));
    out.T = std::abs(out.fit.params(0)) * s.span;
    // shift the amplitude back to the original time origin
    out.A = out.fit.params(1) * std::exp(s.t0 / out.T);
    out.c = out.fit.params(2);
    return out;
}

// ------------------------------------------------------------------ Ramsey

namespace {

double envelope_sum(std::span<const double> t, double T) {
    double s = 0.0;
    for (double v : t) s += std::exp(-v / T);
    return s;
}

}  // namespace

RamseyFit fit_ramsey_beat(const TimeTrace& trace) {
    validate(trace);
    if (trace.size() < 10) throw DegenerateFit("fit_ramsey_beat: need at least 10 points");
    const ScaledTrace s = scale(trace);
    const auto peaks = spectral_peaks(s.t, s.y);
    RamseyFit out;
    const double T0 = 1.0 / 3.0;
    const double env = envelope_sum(s.t, T0);

    double mean = 0.0;
    for (double v : s.y) mean += v;
    mean /= static_cast<double>(s.y.size());

    // the second line must be resolved from the first and carry real weight
    const SpectralPeak* second = nullptr;
    if (!peaks.empty()) {
        for (std::size_t k = 1; k < peaks.size(); ++k) {
            if (std::abs(peaks[k].f - peaks[0].f) > 0.5 && peaks[k].power > 0.1 * peaks[0].power) {
                second = &peaks[k];
                break;
            }
        }
    }

    const auto single_residuals = [&s](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(s.t.size()));
        const double T = std::abs(x(0));
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            const double model =
                std::exp(-s.t[i] / T) * x(2) * std::cos(kTwoPi * x(1) * s.t[i] + x(3)) + x(4);
            r(static_cast<Eigen::Index>(i)) = (model - s.y[i]) * s.w[i];
        }
        return r;
    };
    const auto double_residuals = [&s](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(s.t.size()));
        const double T = std::abs(x(0));
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            const double model = std::exp(-s.t[i] / T) *
                                     (x(3) * std::cos(kTwoPi * x(1) * s.t[i] + x(5)) +
                                      x(4) * std::cos(kTwoPi * x(2) * s.t[i] + x(6))) +
                                 x(7);
            r(static_cast<Eigen::Index>(i)) = (model - s.y[i]) * s.w[i];
        }
        return r;
    };

    const double inf = std::numeric_limits<double>::infinity();
    if (second == nullptr) {
        const double f0 = peaks.empty() ? 1.0 : peaks[0].f;
        const double a0 = peaks.empty() ? 0.0 : 2.0 * std::abs(peaks[0].amp) / env;
        const double p0 = peaks.empty() ? 0.0 : std::arg(peaks[0].amp);
        Eigen::VectorXd x0(5);
        x0 << T0, f0, a0, p0, mean;
        const FitResult single =
            least_squares(single_residuals, {"T2s", "f1", "a1", "phi1", "c"}, x0);
        // expand to the two-tone table with an unidentifiable split
        FitResult fr = single;
        fr.names = {"T2s", "f1", "f2", "a1", "a2", "phi1", "phi2", "c"};
        const auto& p = single.params;
        fr.params.resize(8);
        fr.params << p(0), p(1), p(1), p(2), 0.0, p(3), p(3), p(4);
        fr.std_errors.resize(8);
        const auto& e = single.std_errors;
        fr.std_errors << e(0), e(1), inf, e(2), inf, e(3), inf, e(4);
        fr.unidentifiable = {single.unidentifiable[0], single.unidentifiable[1], true,
                             single.unidentifiable[2], true, single.unidentifiable[3], true,
                             single.unidentifiable[4]};
        fr.covariance = Eigen::MatrixXd::Constant(8, 8, inf);
        out.fit = std::move(fr);
        out.single_tone = true;
    } else {
        Eigen::VectorXd x0(8);
        x0 << T0, peaks[0].f, second->f, 2.0 * std::abs(peaks[0].amp) / env,
            2.0 * std::abs(second->amp) / env, std::arg(peaks[0].amp), std::arg(second->amp),
            mean;
        out.fit = least_squares(double_residuals,
                                {"T2s", "f1", "f2", "a1", "a2", "phi1", "phi2", "c"}, x0);
    }

    Eigen::VectorXd& x = out.fit.params;
    // canonical form: positive amplitudes, f1 <= f2, phases in (-pi, pi]
    for (int k = 0; k < 2; ++k) {
        if (x(3 + k) < 0.0) {
            x(3 + k) = -x(3 + k);
            x(5 + k) += std::numbers::pi;
        }
    }
    for (int k = 1; k <= 2; ++k) {
        if (x(k) < 0.0) {
            x(k) = -x(k);
            x(4 + k) = -x(4 + k);
        }
    }
    if (!out.single_tone && x(1) > x(2)) {
        std::swap(x(1), x(2));
        std::swap(x(3), x(4));
        std::swap(x(5), x(6));
        for (int a : {1, 3, 5}) {
            std::swap(out.fit.std_errors(a), out.fit.std_errors(a + 1));
            const bool tmp = out.fit.unidentifiable[a];
            out.fit.unidentifiable[a] = out.fit.unidentifiable[a + 1];
            out.fit.unidentifiable[a + 1] = tmp;
        }
    }
    x(5) = wrap_phase(x(5));
    x(6) = wrap_phase(x(6));

    out.T2s = std::abs(x(0)) * s.span;
    out.f1 = x(1) / s.span;
    out.f2 = x(2) / s.span;
    // amplitudes and phases refer to t measured from the first sample
    out.a1 = x(3);
    out.a2 = x(4);
    out.phi1 = x(5);
    out.phi2 = x(6);
    out.c = x(7);
    out.beat = std::abs(out.f2 - out.f1);
    out.beat_identifiable = !out.single_tone && out.beat * s.span >= 0.5 &&
                            !out.fit.unidentifiable[1] && !out.fit.unidentifiable[2];
    return out;
}

// -------------------------------------------------------------------- Rabi

DampedCosineFit fit_damped_cosine(const TimeTrace& trace) {
    validate(trace);
    if (trace.size() < 6) throw DegenerateFit("fit_damped_cosine: need at least 6 points");
    const ScaledTrace s = scale(trace);
    const auto peaks = spectral_peaks(s.t, s.y);
    double mean = 0.0;
    for (double v : s.y) mean += v;
    mean /= static_cast<double>(s.y.size());
    const double T0 = 1.0;
    const double env = envelope_sum(s.t, T0);
    Eigen::VectorXd x0(5);
    if (peaks.empty()) {
        x0 << T0, 1.0, 0.0, 0.0, mean;
    } else {
        x0 << T0, peaks[0].f, 2.0 * std::abs(peaks[0].amp) / env, std::arg(peaks[0].amp), mean;
    }
    const auto residuals = [&s](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(s.t.size()));
        const double T = std::abs(x(0));
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            const double model =
                std::exp(-s.t[i] / T) * x(2) * std::cos(kTwoPi * x(1) * s.t[i] + x(3)) + x(4);
            r(static_cast<Eigen::Index>(i)) = (model - s.y[i]) * s.w[i];
        }
        return r;
    };
    DampedCosineFit out;
    out.fit = least_squares(residuals, {"tau", "f", "A", "phase", "c"}, x0);
    Eigen::VectorXd& x = out.fit.params;
    if (x(2) < 0.0) {
        x(2) = -x(2);
        x(3) += std::numbers::pi;
    }
    if (x(1) < 0.0) {
        x(1) = -x(1);
        x(3) = -x(3);
    }
    x(3) = wrap_phase(x(3));
    out.decay = std::abs(x(0)) * s.span;
    out.frequency = x(1) / s.span;
    out.amplitude = x(2);
    out.phase = x(3);
    out.offset = x(4);
    return out;
}

RabiLinearFit fit_rabi_linear(std::span<const RabiScan> scans) {
    if (scans.empty()) throw DegenerateFit("fit_rabi_linear: no scans");
    RabiLinearFit out;
    for (const auto& scan : scans) {
        RabiTraceResult r;
        r.amplitude = scan.amplitude;
        if (scan.amplitude == 0.0) {
            r.included = true;
            r.frequency = 0.0;
            r.frequency_se = 0.0;
            out.traces.push_back(r);
            continue;
        }
        try {
            const auto fit = fit_damped_cosine(scan.trace);
            const double span = scan.trace.times.back() - scan.trace.times.front();
            const double f_se = fit.fit.std_errors(1) / span;
            const double a_se = fit.fit.std_errors(2);
            r.frequency = fit.frequency;
            r.frequency_se = f_se;
            if (fit.frequency * span < 1.0) {
                r.warning = "less than one oscillation period in the trace";
            } else if (!(std::isfinite(a_se) && fit.amplitude > 3.0 * a_se)) {
                r.warning = "oscillation amplitude not significant";
            } else {
                r.included = true;
            }
        } catch (const Error& err) {
            r.warning = err.what();
        }
        out.traces.push_back(r);
    }

    std::vector<const RabiTraceResult*> used;
    double a_scale = 0.0, w_scale = 0.0;
    for (const auto& r : out.traces) {
        if (!r.included) continue;
        used.push_back(&r);
        a_scale = std::max(a_scale, std::abs(r.amplitude));
        w_scale = std::max(w_scale, std::abs(r.frequency));
    }
    if (!(a_scale > 0.0) || !(w_scale > 0.0)) {
        throw DegenerateFit("fit_rabi_linear: no oscillating trace at non-zero amplitude");
    }
    bool weighted = true;
    for (const auto* r : used) {
        if (r->amplitude != 0.0 && !(std::isfinite(r->frequency_se) && r->frequency_se > 0.0)) {
            weighted = false;
        }
    }
    const auto residuals = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd res(static_cast<Eigen::Index>(used.size()));
        for (std::size_t i = 0; i < used.size(); ++i) {
            const auto& r = *used[i];
            double sigma = 1.0;
            if (weighted && r.amplitude != 0.0) sigma = r.frequency_se / w_scale;
            res(static_cast<Eigen::Index>(i)) =
                (x(0) * r.amplitude / a_scale - r.frequency / w_scale) / sigma;
        }
        return res;
    };
    out.fit = least_squares(residuals, {"slope"}, Eigen::VectorXd::Constant(1, 1.0));
    out.slope = out.fit.params(0) * w_scale / a_scale;
    out.slope_se = out.fit.std_errors(0) * w_scale / a_scale;
    return out;
}

// -------------------------------------------------------------- reflection

double reflection_phase(double f, double f_r, double kappa_int, double kappa_ext) {
    const std::complex<double> num(0.5 * (kappa_int - kappa_ext), f - f_r);
    const std::complex<double> den(0.5 * (kappa_int + kappa_ext), f - f_r);
    return std::arg(num / den);
}

DispersivePhaseFit fit_dispersive_phase(const PhaseCurve& ground, const PhaseCurve& excited) {
    for (const auto* c : {&ground, &excited}) {
        if (c->f.size() != c->phase.size() || c->f.size() < 4) {
            throw DegenerateFit("fit_dispersive_phase: need >= 4 samples per curve");
        }
    }
    const double f_ref = ground.f.front();
    // the resonance sits where |phase| is largest; the |phase| > pi/2
    // window is about one linewidth wide
    const auto centre = [&](const PhaseCurve& c) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < c.f.size(); ++i) {
            if (std::abs(c.phase[i]) > std::abs(c.phase[k])) k = i;
        }
        return (c.f[k] - f_ref) * 1e-6;
    };
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < ground.f.size(); ++i) {
        if (std::abs(ground.phase[i]) > std::numbers::pi / 2) {
            lo = std::min(lo, ground.f[i]);
            hi = std::max(hi, ground.f[i]);
        }
    }
    double width = (hi > lo) ? (hi - lo) * 1e-6 : 1.0;
    if (!(width > 0.0)) width = 1.0;
    const double fg0 = centre(ground);
    const double chi0 = centre(excited) - fg0;

    const auto residuals = [&](const Eigen::VectorXd& x) {
        const double fg = f_ref + x(0) * 1e6;
        const double fe = fg + x(1) * 1e6;
        const double ki = std::abs(x(2)) * 1e6, ke = std::abs(x(3)) * 1e6;
        Eigen::VectorXd r(static_cast<Eigen::Index>(ground.f.size() + excited.f.size()));
        Eigen::Index k = 0;
        for (std::size_t i = 0; i < ground.f.size(); ++i) {
            r(k++) = wrap_phase(ground.phase[i] - reflection_phase(ground.f[i], fg, ki, ke));
        }
        for (std::size_t i = 0; i < excited.f.size(); ++i) {
            r(k++) = wrap_phase(excited.phase[i] - reflection_phase(excited.f[i], fe, ki, ke));
        }
        return r;
    };
    Eigen::Vector4d x0(fg0, chi0, 0.1 * width, 0.9 * width);
    DispersivePhaseFit out;
    out.fit = least_squares(residuals, {"f_r_g", "chi", "kappa_int", "kappa_ext"}, x0);
    const auto& x = out.fit.params;
    out.f_r_g = f_ref + x(0) * 1e6;
    out.chi = x(1) * 1e6;
    out.f_r_e = out.f_r_g + out.chi;
    out.kappa_int = std::abs(x(2)) * 1e6;
    out.kappa_ext = std::abs(x(3)) * 1e6;
    return out;
}

}  // namespace vortexlab
