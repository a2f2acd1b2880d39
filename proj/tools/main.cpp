// wldecoh: decoherence, dissipation, and dispersion coefficients for a
// polarizable particle on stationary worldlines, plus a 1-D quantum Brownian
// motion evolver for its center-of-mass density matrix.
//
// All kernels run in internal units (hbar = c = eps0 = kB = 1, frequencies in
// units of omega_q); --unit-system si converts at this boundary only.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wldecoh/dispersion.hpp"
#include "wldecoh/qbm.hpp"
#include "wldecoh/rates.hpp"

namespace wd = wldecoh;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "wldecoh 0.1.0";

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

// ---------------------------------------------------------------------------
// shared option state

struct CommonOpts {
    std::string config_path;
    double e = 1.0, m = 1.0, omega_q = 1.0, M = 1.0;
    bool e_set = false, m_set = false, omega_q_set = false, M_set = false;
    std::string unit_system = "internal";
    bool unit_system_set = false;

    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    double uv_cutoff = 1e3;
    int max_subdivisions = 2000;
    bool check_cutoff = false;
    bool uv_cutoff_set = false;

    std::string trajectory; // "", inertial, hyperbolic, circular
    double accel = 0.0, radius = 0.0, omega_xi = 0.0;
};

void add_model_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path,
                    "key=value file with e, m, omega_q, M, unit_system");
    cmd->add_option("--e", o.e, "coupling charge (default 1 internal)");
    cmd->add_option("--m", o.m, "internal-oscillator mass (default 1)");
    cmd->add_option("--omega-q", o.omega_q,
                    "internal oscillator frequency; the SI frequency scale");
    cmd->add_option("--M", o.M, "particle rest mass (default 1)");
    cmd->add_option("--unit-system", o.unit_system,
                    "internal (default) or si")
        ->check(CLI::IsMember({"internal", "si"}));
}

void add_quad_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");
    cmd->add_option("--abs-tol", o.abs_tol, "quadrature absolute tolerance");
    cmd->add_option("--uv-cutoff", o.uv_cutoff,
                    "frequency cutoff of the rate integrals");
    cmd->add_option("--max-subdivisions", o.max_subdivisions,
                    "adaptive panel budget");
    cmd->add_flag("--check-cutoff", o.check_cutoff,
                  "recompute with doubled cutoff and report the drift");
}

void add_trajectory_options(CLI::App* cmd, CommonOpts& o, bool required) {
    auto* t = cmd->add_option("--trajectory", o.trajectory,
                              "inertial | hyperbolic | circular")
                  ->check(CLI::IsMember({"inertial", "hyperbolic", "circular"}));
    if (required) t->required();
    cmd->add_option("--accel", o.accel, "proper acceleration (hyperbolic)");
    cmd->add_option("--radius", o.radius, "orbit radius (circular)");
    cmd->add_option("--omega", o.omega_xi, "orbital angular frequency (circular)");
}

// Everything already converted to internal units.
struct RunContext {
    wd::UnitTag unit = wd::UnitTag::internal;
    std::optional<wd::UnitSystem> units; // engaged iff unit == si
    wd::ModelParams params{};
    wd::QuadConfig cfg;
    std::optional<wd::Worldline> worldline;

    double to_internal(double v, wd::Dimension d) const {
        return units ? units->to_internal(v, d) : v;
    }
    double from_internal(double v, wd::Dimension d) const {
        return units ? units->from_internal(v, d) : v;
    }
    std::string suffix() const {
        return unit == wd::UnitTag::si ? "_si" : "_internal";
    }
};

RunContext make_context(CLI::App* cmd, CommonOpts& o,
                        bool build_worldline = true) {
    o.e_set = cmd->count("--e") > 0;
    o.m_set = cmd->count("--m") > 0;
    o.omega_q_set = cmd->count("--omega-q") > 0;
    o.M_set = cmd->count("--M") > 0;
    o.unit_system_set = cmd->count("--unit-system") > 0;
    o.uv_cutoff_set = cmd->count("--uv-cutoff") > 0;

    if (!o.config_path.empty()) {
        const wd::ConfigValues cv = wd::load_config(o.config_path);
        if (cv.e && !o.e_set) o.e = *cv.e;
        if (cv.m && !o.m_set) o.m = *cv.m;
        if (cv.omega_q && !o.omega_q_set) o.omega_q = *cv.omega_q;
        if (cv.M && !o.M_set) o.M = *cv.M;
        if (cv.unit_system && !o.unit_system_set)
            o.unit_system = *cv.unit_system == wd::UnitTag::si ? "si" : "internal";
        o.e_set = o.e_set || cv.e.has_value();
        o.m_set = o.m_set || cv.m.has_value();
        o.omega_q_set = o.omega_q_set || cv.omega_q.has_value();
        o.M_set = o.M_set || cv.M.has_value();
    }

    RunContext ctx;
    if (o.unit_system == "si") {
        if (!(o.e_set && o.m_set && o.omega_q_set && o.M_set))
            throw wd::Error(wd::ErrorCode::invalid_argument,
                            "--unit-system si requires explicit --e --m "
                            "--omega-q --M (SI values)");
        ctx.unit = wd::UnitTag::si;
        ctx.units.emplace(o.omega_q);
        ctx.params = wd::build_params(
            ctx.to_internal(o.e, wd::Dimension::charge),
            ctx.to_internal(o.m, wd::Dimension::mass), 1.0,
            ctx.to_internal(o.M, wd::Dimension::mass));
    } else {
        ctx.params = wd::build_params(o.e, o.m, o.omega_q, o.M);
    }

    ctx.cfg.rel_tol = o.rel_tol;
    ctx.cfg.abs_tol = o.abs_tol;
    ctx.cfg.max_subdivisions = o.max_subdivisions;
    ctx.cfg.cutoff_doubling_check = o.check_cutoff;
    if (o.uv_cutoff_set)
        ctx.cfg.uv_cutoff = ctx.to_internal(o.uv_cutoff, wd::Dimension::frequency);
    ctx.cfg.validate();

    if (build_worldline && !o.trajectory.empty()) {
        if (o.trajectory == "inertial") {
            ctx.worldline = wd::Worldline::inertial();
        } else if (o.trajectory == "hyperbolic") {
            try {
                ctx.worldline = wd::Worldline::hyperbolic(
                    ctx.to_internal(o.accel, wd::Dimension::acceleration));
            } catch (const wd::Error& e) {
                throw wd::Error(e.code(), std::string("--accel: ") + e.what());
            }
        } else {
            try {
                ctx.worldline = wd::Worldline::circular(
                    ctx.to_internal(o.radius, wd::Dimension::length),
                    ctx.to_internal(o.omega_xi, wd::Dimension::frequency));
            } catch (const wd::Error& e) {
                throw wd::Error(e.code(), std::string("--radius/--omega: ") +
                                              e.what());
            }
        }
    }
    return ctx;
}

// ---------------------------------------------------------------------------
// output plumbing

class OutputSink {
public:
    void write_file(const std::string& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw wd::Error(wd::ErrorCode::invalid_argument,
                            "cannot open output file: " + path);
        out << content;
        if (!out.flush())
            throw wd::Error(wd::ErrorCode::invalid_argument,
                            "failed writing output file: " + path);
        written_.push_back(path);
    }

    void remove_partial() {
        for (const auto& p : written_) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
    }

    const std::vector<std::string>& written() const { return written_; }

private:
    std::vector<std::string> written_;
};

void write_manifest(OutputSink& sink, const std::string& base,
                    const std::string& command, const ordered_json& parameters,
                    const RunContext& ctx,
                    const ordered_json& quad_summary = {}) {
    ordered_json m;
    m["command"] = command;
    m["parameters"] = parameters;
    m["unit_system"] = wd::to_string(ctx.unit);
    m["outputs"] = sink.written();
    m["tool_version"] = kToolVersion;
    if (!quad_summary.empty()) m["quad"] = quad_summary;
    m["timestamp_utc"] = utc_timestamp();
    sink.write_file(base + ".manifest.json", m.dump(2) + "\n");
}

void require_finite(const ordered_json& j) {
    if (j.is_number_float() && !std::isfinite(j.get<double>()))
        throw wd::Error(wd::ErrorCode::not_finite,
                        "non-finite value in JSON output");
    if (j.is_structured())
        for (const auto& item : j) require_finite(item);
}

ordered_json flags_json(const CLI::App* cmd) {
    ordered_json j;
    for (const CLI::Option* opt : cmd->get_options()) {
        if (opt->count() == 0 || opt->get_name().empty()) continue;
        if (opt->get_name() == "--help") continue;
        const auto& results = opt->results();
        if (results.empty())
            j[opt->get_name()] = true;
        else if (results.size() == 1)
            j[opt->get_name()] = results.front();
        else
            j[opt->get_name()] = results;
    }
    return j;
}

// ---------------------------------------------------------------------------
// rates

struct RatesRow {
    double lambda_du = 0.0;
    double lambda_td = 0.0;
    double gamma = 0.0;
    bool has_gamma = false;
    double momentum_diffusion = 0.0;
    double t_du = 0.0;
    bool has_t_du = false;
    double err = 0.0;
    double drift = 0.0;
    bool has_drift = false;
    long evaluations = 0;
};

RatesRow compute_rates(const wd::Worldline& w, const RunContext& ctx,
                       std::optional<double> temperature_internal) {
    RatesRow row;
    const auto du = wd::lambda_du(w, ctx.params, ctx.cfg);
    const auto td = wd::lambda_td(w, ctx.params, ctx.cfg);
    const auto md = wd::momentum_diffusion(du);
    row.lambda_du = du.value;
    row.lambda_td = td.value;
    row.momentum_diffusion = md.value;
    row.err = du.quad.error_estimate + td.quad.error_estimate;
    row.evaluations = du.quad.evaluations + td.quad.evaluations;
    if (du.quad.cutoff_drift) {
        row.has_drift = true;
        row.drift = std::max(*du.quad.cutoff_drift,
                             td.quad.cutoff_drift.value_or(0.0));
    }
    switch (w.kind()) {
    case wd::WorldlineKind::inertial:
        row.t_du = 0.0;
        row.has_t_du = true;
        row.gamma = 0.0; // Lambda vanishes identically
        row.has_gamma = true;
        break;
    case wd::WorldlineKind::hyperbolic: {
        row.t_du = wd::davies_unruh_temperature(w.accel());
        row.has_t_du = true;
        const double T = temperature_internal.value_or(row.t_du);
        row.gamma = wd::gamma_from_fdt(du, T, ctx.params.M).value;
        row.has_gamma = true;
        break;
    }
    case wd::WorldlineKind::circular:
        if (temperature_internal) {
            row.gamma =
                wd::gamma_from_fdt(du, *temperature_internal, ctx.params.M)
                    .value;
            row.has_gamma = true;
        }
        break;
    }
    return row;
}

int cmd_rates(CLI::App* cmd, CommonOpts& o, double temperature,
              bool temperature_set) {
    RunContext ctx = make_context(cmd, o);
    const wd::Worldline& w = *ctx.worldline;
    std::optional<double> T;
    if (temperature_set)
        T = ctx.to_internal(temperature, wd::Dimension::temperature);

    const RatesRow row = compute_rates(w, ctx, T);

    ordered_json j;
    j["trajectory"] = wd::to_string(w.kind());
    j["unit_system"] = wd::to_string(ctx.unit);
    j["lambda_du"] = ctx.from_internal(row.lambda_du, wd::Dimension::rate_lambda);
    j["lambda_td_kernel"] =
        ctx.from_internal(row.lambda_td, wd::Dimension::rate_lambda);
    if (row.has_gamma)
        j["gamma"] = ctx.from_internal(row.gamma, wd::Dimension::rate_gamma);
    j["momentum_diffusion"] =
        ctx.from_internal(row.momentum_diffusion,
                          wd::Dimension::momentum_diffusion);
    if (row.has_t_du)
        j["t_du"] = ctx.from_internal(row.t_du, wd::Dimension::temperature);
    if (w.kind() == wd::WorldlineKind::circular) {
        j["t_eff_note"] =
            "circular motion has no constant temperature; the effective "
            "temperature is frequency dependent (see the spectrum command). "
            "Pass --temperature to evaluate gamma via the FDT at a chosen T.";
        const auto warn = wd::WightmanSpectrum(w).validity_warning();
        if (warn) j["validity_warning"] = *warn;
    }
    if (temperature_set) {
        const auto th = wd::lambda_thermal(*T, ctx.params, ctx.cfg);
        j["lambda_thermal"] =
            ctx.from_internal(th.value, wd::Dimension::rate_lambda);
    }
    ordered_json quad;
    quad["error_estimate"] =
        ctx.from_internal(row.err, wd::Dimension::rate_lambda);
    quad["evaluations"] = row.evaluations;
    if (row.has_drift) quad["cutoff_drift"] = row.drift;
    j["quad"] = quad;

    require_finite(j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// spectrum

int cmd_spectrum(CLI::App* cmd, CommonOpts& o, double omega_min,
                 double omega_max, long points, bool response_mode,
                 const std::string& out_path) {
    RunContext ctx = make_context(cmd, o);
    const wd::Worldline& w = *ctx.worldline;
    if (points < 1)
        throw wd::Error(wd::ErrorCode::invalid_argument,
                        "--points must be >= 1");
    if (!(omega_min <= omega_max))
        throw wd::Error(wd::ErrorCode::invalid_argument,
                        "--omega-min must not exceed --omega-max");
    const double lo = ctx.to_internal(omega_min, wd::Dimension::frequency);
    const double hi = ctx.to_internal(omega_max, wd::Dimension::frequency);

    const wd::WightmanSpectrum spec(w);
    const std::string sfx = ctx.suffix();
    std::string csv;
    if (response_mode)
        csv = "omega" + sfx + ",re_alpha0" + sfx + ",im_alpha0" + sfx +
              ",re_eta_dimensionless,im_eta_dimensionless,s_weight" + sfx + "\n";
    else
        csv = "omega" + sfx + ",d_plus" + sfx + ",d_minus" + sfx +
              ",ratio_dimensionless,t_eff" + sfx + "\n";
    for (long i = 0; i < points; ++i) {
        const double omega =
            points == 1 ? lo
                        : lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(points - 1);
        if (response_mode) {
            const wd::complexd a = wd::alpha0(omega, ctx.params);
            const wd::complexd h = wd::eta(omega, ctx.params);
            const double s = wd::s_weight(omega, ctx.params);
            csv += fmt_double(ctx.from_internal(omega, wd::Dimension::frequency));
            csv += ',';
            csv += fmt_double(
                ctx.from_internal(a.real(), wd::Dimension::polarizability));
            csv += ',';
            csv += fmt_double(
                ctx.from_internal(a.imag(), wd::Dimension::polarizability));
            csv += ',';
            csv += fmt_double(h.real());
            csv += ',';
            csv += fmt_double(h.imag());
            csv += ',';
            csv += fmt_double(
                ctx.from_internal(s, wd::Dimension::polarizability));
            csv += '\n';
        } else {
            const auto [dp, dm] = spec.d_pm(omega);
            csv += fmt_double(ctx.from_internal(omega, wd::Dimension::frequency));
            csv += ',';
            csv += fmt_double(ctx.from_internal(dp, wd::Dimension::wightman));
            csv += ',';
            csv += fmt_double(ctx.from_internal(dm, wd::Dimension::wightman));
            csv += ',';
            const double ratio = dp != 0.0
                                     ? dm / dp
                                     : std::numeric_limits<double>::infinity();
            csv += std::isfinite(ratio) ? fmt_double(ratio) : std::string{};
            csv += ',';
            if (omega > 0.0) {
                const double t_eff = spec.effective_temperature(omega);
                csv += fmt_double(
                    ctx.from_internal(t_eff, wd::Dimension::temperature));
            }
            csv += '\n';
        }
    }

    if (out_path.empty()) {
        std::cout << csv;
        return 0;
    }
    OutputSink sink;
    try {
        sink.write_file(out_path, csv);
        write_manifest(sink, out_path, "spectrum", flags_json(cmd), ctx);
    } catch (...) {
        sink.remove_partial();
        throw;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// dispersion

int cmd_dispersion(CLI::App* cmd, CommonOpts& o, const std::string& mode_str,
                   bool vacuum_subtract) {
    RunContext ctx = make_context(cmd, o);
    const wd::Worldline& w = *ctx.worldline;
    const wd::DispersionMode mode = mode_str == "full"
                                        ? wd::DispersionMode::full_with_cutoff
                                        : wd::DispersionMode::thermal_only;
    wd::QuadConfig c1_cfg = ctx.cfg;
    c1_cfg.cutoff_doubling_check = true; // always report drift here

    const auto c1 = wd::c1_td(w, ctx.params, c1_cfg, mode);
    const auto du = wd::c2_du(w, ctx.params, ctx.cfg, vacuum_subtract);
    const auto td = wd::c2_td(w, ctx.params, ctx.cfg, vacuum_subtract);

    auto entry = [&](const wd::DispersionResult& r, wd::Dimension dim) {
        ordered_json e;
        e["value"] = ctx.from_internal(r.value, dim);
        e["mode"] = wd::to_string(r.mode);
        e["uv_cutoff"] =
            ctx.from_internal(r.uv_cutoff_used, wd::Dimension::frequency);
        if (r.cutoff_drift) {
            e["cutoff_drift"] = *r.cutoff_drift;
            e["converged"] = *r.cutoff_drift < 1e-4;
        }
        return e;
    };

    ordered_json j;
    j["trajectory"] = wd::to_string(w.kind());
    j["unit_system"] = wd::to_string(ctx.unit);
    j["vacuum_subtract"] = vacuum_subtract;
    j["c1_td"] = entry(c1, wd::Dimension::force_c1);
    j["c2_du"] = entry(du, wd::Dimension::curvature_c2);
    j["c2_td"] = entry(td, wd::Dimension::curvature_c2);
    require_finite(j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// evolve

int cmd_evolve(CLI::App* cmd, CommonOpts& o, int grid_points, double x_max,
               double x0, double separation, double sigma, double dt,
               long steps, long snapshot_every, double lambda, double gamma,
               double c1, double c2, bool include_kinetic,
               const std::string& out_base, bool dump_rho) {
    RunContext ctx = make_context(cmd, o);

    wd::QbmCoefficients k;
    k.M = ctx.params.M;
    k.include_kinetic = include_kinetic;
    if (ctx.worldline) {
        const wd::Worldline& w = *ctx.worldline;
        const auto du = wd::lambda_du(w, ctx.params, ctx.cfg);
        const auto td = wd::lambda_td(w, ctx.params, ctx.cfg);
        k.lambda = du.value + td.value;
        k.a = w.proper_acceleration();
        if (w.kind() == wd::WorldlineKind::hyperbolic)
            k.gamma = wd::gamma_from_fdt(
                          du, wd::davies_unruh_temperature(w.accel()),
                          ctx.params.M)
                          .value;
        k.c1 = wd::c1_td(w, ctx.params, ctx.cfg).value;
    }
    if (cmd->count("--lambda"))
        k.lambda = ctx.to_internal(lambda, wd::Dimension::rate_lambda);
    if (cmd->count("--gamma"))
        k.gamma = ctx.to_internal(gamma, wd::Dimension::rate_gamma);
    if (cmd->count("--c1")) k.c1 = ctx.to_internal(c1, wd::Dimension::force_c1);
    if (cmd->count("--c2"))
        k.c2 = ctx.to_internal(c2, wd::Dimension::curvature_c2);

    const wd::Grid1D grid(grid_points,
                          ctx.to_internal(x_max, wd::Dimension::length));
    const auto state0 = wd::build_superposition(
        ctx.to_internal(x0, wd::Dimension::length),
        ctx.to_internal(separation, wd::Dimension::length),
        ctx.to_internal(sigma, wd::Dimension::length), grid);
    const double sep_internal =
        ctx.to_internal(separation, wd::Dimension::length);
    const double dt_internal = ctx.to_internal(dt, wd::Dimension::time);

    OutputSink sink;
    try {
        const std::string sfx = ctx.suffix();
        std::string csv = "t" + sfx +
                          ",trace_dimensionless,coherence_norm_dimensionless\n";
        wd::GridState state = state0;
        auto record = [&]() {
            csv += fmt_double(ctx.from_internal(state.time, wd::Dimension::time));
            csv += ',';
            csv += fmt_double(wd::trace(state));
            csv += ',';
            csv += fmt_double(wd::coherence_norm(state, sep_internal));
            csv += '\n';
        };
        auto dump_snapshot = [&](long step) {
            if (!dump_rho || out_base.empty()) return;
            const int n = grid.n_points;
            std::string rho_csv;
            rho_csv.reserve(static_cast<std::size_t>(n) * n * 10);
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    if (b) rho_csv += ',';
                    rho_csv += fmt_double(std::abs(state.rho[a * n + b]));
                }
                rho_csv += '\n';
            }
            char name[64];
            std::snprintf(name, sizeof name, "_rho_%08ld.csv", step);
            sink.write_file(out_base + name, rho_csv);
        };

        record();
        const long chunk = snapshot_every > 0 ? snapshot_every : steps;
        long done = 0;
        while (done < steps) {
            const long n_steps = std::min(chunk, steps - done);
            state = wd::evolve(state, k, dt_internal, n_steps).state;
            done += n_steps;
            record();
            dump_snapshot(done);
        }

        if (out_base.empty()) {
            std::cout << csv;
            return 0;
        }
        sink.write_file(out_base + "_series.csv", csv);
        write_manifest(sink, out_base, "evolve", flags_json(cmd), ctx);
    } catch (...) {
        sink.remove_partial();
        throw;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(CLI::App* cmd, CommonOpts& o, const std::string& param,
              double from, double to, long points, int jobs,
              const std::string& out_path, double temperature,
              bool temperature_set) {
    RunContext ctx = make_context(cmd, o, /*build_worldline=*/false);
    if (points < 1)
        throw wd::Error(wd::ErrorCode::invalid_argument, "--points must be >= 1");
    if (jobs < 1)
        throw wd::Error(wd::ErrorCode::invalid_argument, "--jobs must be >= 1");
    const std::string traj = o.trajectory;
    if (param == "accel" && traj != "hyperbolic")
        throw wd::Error(wd::ErrorCode::invalid_argument,
                        "--param accel needs --trajectory hyperbolic");
    if ((param == "omega" || param == "radius") && traj != "circular")
        throw wd::Error(wd::ErrorCode::invalid_argument,
                        "--param " + param + " needs --trajectory circular");

    std::optional<double> T;
    if (temperature_set)
        T = ctx.to_internal(temperature, wd::Dimension::temperature);

    const wd::Dimension param_dim =
        param == "accel" ? wd::Dimension::acceleration
        : param == "radius" ? wd::Dimension::length
                            : wd::Dimension::frequency;

    std::vector<double> values(points);
    for (long i = 0; i < points; ++i)
        values[i] = points == 1
                        ? from
                        : from + (to - from) * static_cast<double>(i) /
                              static_cast<double>(points - 1);

    auto point_worldline = [&](double value_internal) {
        if (param == "accel") return wd::Worldline::hyperbolic(value_internal);
        if (param == "radius")
            return wd::Worldline::circular(
                value_internal,
                ctx.to_internal(o.omega_xi, wd::Dimension::frequency));
        return wd::Worldline::circular(
            ctx.to_internal(o.radius, wd::Dimension::length), value_internal);
    };

    auto run_point = [&](double value) {
        const double vi = ctx.to_internal(value, param_dim);
        return compute_rates(point_worldline(vi), ctx, T);
    };

    std::vector<RatesRow> rows(points);
    for (long start = 0; start < points; start += jobs) {
        const long end = std::min<long>(points, start + jobs);
        std::vector<std::future<RatesRow>> futures;
        futures.reserve(end - start);
        for (long i = start; i < end; ++i)
            futures.push_back(
                std::async(std::launch::async, run_point, values[i]));
        for (long i = start; i < end; ++i)
            rows[i] = futures[i - start].get();
    }

    const std::string sfx = ctx.suffix();
    std::string csv = param + sfx + ",lambda_du" + sfx + ",lambda_td_kernel" +
                      sfx + ",gamma" + sfx + ",momentum_diffusion" + sfx +
                      ",t_du" + sfx + ",quad_error" + sfx + ",evaluations\n";
    for (long i = 0; i < points; ++i) {
        const RatesRow& r = rows[i];
        csv += fmt_double(values[i]);
        csv += ',';
        csv += fmt_double(
            ctx.from_internal(r.lambda_du, wd::Dimension::rate_lambda));
        csv += ',';
        csv += fmt_double(
            ctx.from_internal(r.lambda_td, wd::Dimension::rate_lambda));
        csv += ',';
        if (r.has_gamma)
            csv += fmt_double(
                ctx.from_internal(r.gamma, wd::Dimension::rate_gamma));
        csv += ',';
        csv += fmt_double(ctx.from_internal(
            r.momentum_diffusion, wd::Dimension::momentum_diffusion));
        csv += ',';
        if (r.has_t_du)
            csv += fmt_double(
                ctx.from_internal(r.t_du, wd::Dimension::temperature));
        csv += ',';
        csv += fmt_double(
            ctx.from_internal(r.err, wd::Dimension::rate_lambda));
        csv += ',';
        csv += std::to_string(r.evaluations);
        csv += '\n';
    }

    if (out_path.empty()) {
        std::cout << csv;
        return 0;
    }
    OutputSink sink;
    try {
        sink.write_file(out_path, csv);
        write_manifest(sink, out_path, "sweep", flags_json(cmd), ctx);
    } catch (...) {
        sink.remove_partial();
        throw;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Decoherence, dissipation and dispersion coefficients for a "
        "polarizable particle on stationary worldlines (inertial, hyperbolic, "
        "circular), plus a 1-D QBM density-matrix evolver.\n"
        "Defaults are internal units: hbar = c = eps0 = kB = 1 and "
        "e = m = omega_q = M = 1 (the model fixes no numeric magnitudes, so "
        "these defaults are a documented convention)."};
    app.require_subcommand(1);

    CommonOpts rates_o, spectrum_o, dispersion_o, evolve_o, sweep_o;

    // rates
    auto* rates = app.add_subcommand(
        "rates", "decoherence/dissipation coefficients as JSON on stdout");
    add_model_options(rates, rates_o);
    add_quad_options(rates, rates_o);
    add_trajectory_options(rates, rates_o, true);
    double rates_T = 0.0;
    rates->add_option("--temperature", rates_T,
                      "reference temperature: adds lambda_thermal and, for "
                      "circular motion, enables gamma via the FDT");

    // spectrum
    auto* spectrum = app.add_subcommand(
        "spectrum", "Wightman spectra D+-(omega) (or --response: alpha0, eta, "
                    "S) as CSV");
    add_model_options(spectrum, spectrum_o);
    add_quad_options(spectrum, spectrum_o);
    add_trajectory_options(spectrum, spectrum_o, true);
    double omega_min = 0.01, omega_max = 10.0;
    long spectrum_points = 100;
    bool response_mode = false;
    std::string spectrum_out;
    spectrum->add_option("--omega-min", omega_min, "lowest frequency");
    spectrum->add_option("--omega-max", omega_max, "highest frequency");
    spectrum->add_option("--points", spectrum_points, "number of rows");
    spectrum->add_flag("--response", response_mode,
                       "dump the response functions instead of D+-");
    spectrum->add_option("--out", spectrum_out,
                         "write CSV (plus manifest) here instead of stdout");

    // dispersion
    auto* dispersion = app.add_subcommand(
        "dispersion", "dispersion-potential coefficients C1/C2 as JSON");
    add_model_options(dispersion, dispersion_o);
    add_quad_options(dispersion, dispersion_o);
    add_trajectory_options(dispersion, dispersion_o, true);
    std::string disp_mode = "thermal-only";
    bool vacuum_subtract = false;
    dispersion->add_option("--mode", disp_mode, "thermal-only | full")
        ->check(CLI::IsMember({"thermal-only", "full"}));
    dispersion->add_flag("--vacuum-subtract", vacuum_subtract,
                         "subtract the inertial integrand from C2 pointwise");

    // evolve
    auto* evolve = app.add_subcommand(
        "evolve", "evolve a spatial superposition under the QBM master "
                  "equation; series CSV (t, trace, coherence_norm)");
    add_model_options(evolve, evolve_o);
    add_quad_options(evolve, evolve_o);
    add_trajectory_options(evolve, evolve_o, false);
    int grid_points = 256;
    double x_max = 1.0, ev_x0 = 0.0, separation = 0.4, sigma = 0.05;
    double ev_dt = 1e-3;
    long ev_steps = 1000, snapshot_every = 100;
    double ev_lambda = 0.0, ev_gamma = 0.0, ev_c1 = 0.0, ev_c2 = 0.0;
    bool include_kinetic = false, dump_rho = false;
    std::string evolve_out;
    evolve->add_option("--grid-points", grid_points, "even, >= 64");
    evolve->add_option("--x-max", x_max, "grid half-width");
    evolve->add_option("--x0", ev_x0, "superposition center");
    evolve->add_option("--separation", separation, "cat separation");
    evolve->add_option("--sigma", sigma, "Gaussian width");
    evolve->add_option("--dt", ev_dt, "time step");
    evolve->add_option("--steps", ev_steps, "number of steps");
    evolve->add_option("--snapshot-every", snapshot_every,
                       "series sampling stride");
    evolve->add_option("--lambda", ev_lambda,
                       "decoherence coefficient (overrides trajectory)");
    evolve->add_option("--gamma", ev_gamma, "dissipation coefficient");
    evolve->add_option("--c1", ev_c1, "linear Hamiltonian shift");
    evolve->add_option("--c2", ev_c2, "quadratic Hamiltonian shift");
    evolve->add_flag("--include-kinetic", include_kinetic,
                     "add the free kinetic term and the M a X potential");
    evolve->add_flag("--dump-rho", dump_rho,
                     "also write the final |rho| matrix as CSV");
    evolve->add_option("--out", evolve_out, "output base path");

    // sweep
    auto* sweep = app.add_subcommand(
        "sweep", "rates over a parameter range as CSV rows");
    add_model_options(sweep, sweep_o);
    add_quad_options(sweep, sweep_o);
    add_trajectory_options(sweep, sweep_o, true);
    std::string sweep_param = "accel";
    double sweep_from = 1.0, sweep_to = 10.0, sweep_T = 0.0;
    long sweep_points = 10;
    int sweep_jobs = 1;
    std::string sweep_out;
    sweep->add_option("--param", sweep_param, "accel | omega | radius")
        ->check(CLI::IsMember({"accel", "omega", "radius"}));
    sweep->add_option("--from", sweep_from, "first parameter value");
    sweep->add_option("--to", sweep_to, "last parameter value");
    sweep->add_option("--points", sweep_points, "number of points");
    sweep->add_option("--jobs", sweep_jobs, "worker pool size");
    sweep->add_option("--temperature", sweep_T,
                      "FDT temperature for circular gamma");
    sweep->add_option("--out", sweep_out, "write CSV (plus manifest) here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (rates->parsed())
            return cmd_rates(rates, rates_o, rates_T,
                             rates->count("--temperature") > 0);
        if (spectrum->parsed())
            return cmd_spectrum(spectrum, spectrum_o, omega_min, omega_max,
                                spectrum_points, response_mode, spectrum_out);
        if (dispersion->parsed())
            return cmd_dispersion(dispersion, dispersion_o, disp_mode,
                                  vacuum_subtract);
        if (evolve->parsed())
            return cmd_evolve(evolve, evolve_o, grid_points, x_max, ev_x0,
                              separation, sigma, ev_dt, ev_steps,
                              snapshot_every, ev_lambda, ev_gamma, ev_c1,
                              ev_c2, include_kinetic, evolve_out, dump_rho);
        if (sweep->parsed())
            return cmd_sweep(sweep, sweep_o, sweep_param, sweep_from, sweep_to,
                             sweep_points, sweep_jobs, sweep_out, sweep_T,
                             sweep->count("--temperature") > 0);
    } catch (const wd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_validation() ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
