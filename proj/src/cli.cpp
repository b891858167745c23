#include "kerrpair/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>

#include "kerrpair/classical.hpp"
#include "kerrpair/config.hpp"
#include "kerrpair/csv.hpp"
#include "kerrpair/dynamics.hpp"
#include "kerrpair/errors.hpp"
#include "kerrpair/parallel.hpp"
#include "kerrpair/pt.hpp"
#include "kerrpair/selfenergy.hpp"
#include "kerrpair/spectral.hpp"
#include "kerrpair/symmetry.hpp"

namespace kerrpair::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
    std::string name;
    Json config;
    fs::path out_dir;
    Execution exec = Execution::parallel;
    std::ostream* out = nullptr;
    Json resolved = Json::object();
    Json outputs = Json::array();
    Json diagnostics = Json::object();
    bool failed = false;  // a verification reported FAIL

    CsvWriter csv(const std::string& file, std::vector<std::string> header) {
        outputs.push_back(file);
        return CsvWriter(out_dir / file, std::move(header));
    }
};

using Handler = std::function<void(Context&)>;

ModelParams resolve_model(Context& ctx) {
    const Json& model = require(ctx.config, "model");
    ModelParams p = model_from_json(model);
    if (ctx.config.contains("g_over_gcrit")) {
        if (model.contains("g")) throw ConfigError("give either model.g or g_over_gcrit, not both");
        const double frac = get_real(ctx.config, "g_over_gcrit");
        if (frac < 0.0) throw ConfigError("g_over_gcrit must be >= 0");
        const double gc = g_crit(p);
        p.g = frac * gc;
        ctx.resolved["g_crit"] = gc;
    }
    ctx.resolved["model"] = model_to_json(p);
    return p;
}

long long as_ll(int v) { return static_cast<long long>(v); }

std::string target_column(int n) { return "p_n" + std::to_string(n); }

void write_spectrum(Context& ctx, const SweepResult& sweep) {
    auto w = ctx.csv("spectrum.csv", {"grid_value", "level_index", "eigenvalue", "dimensionless_eigenvalue"});
    for (const auto& pt : sweep.points) {
        for (std::size_t l = 0; l < pt.eigenvalues.size(); ++l) {
            w.row({pt.grid_value, static_cast<long long>(l), pt.eigenvalues[l], pt.dimensionless[l]});
        }
    }
}

EnergyOffset offset_flag(const Json& cfg) {
    return get_bool(cfg, "offset", false) ? EnergyOffset::included : EnergyOffset::excluded;
}

void cmd_spectrum_sweep(Context& ctx) {
    check_keys(ctx.config, {"model", "g_over_gcrit", "mu_grid", "offset", "anticrossings", "isolation"},
               "spectrum-sweep config");
    const ModelParams p = resolve_model(ctx);
    const GridSpec grid = grid_from_json(require(ctx.config, "mu_grid"));
    ctx.resolved["mu_grid"] = grid_to_json(grid);
    const auto mu = grid.values();
    SweepOptions so;
    so.offset = offset_flag(ctx.config);
    so.exec = ctx.exec;
    const SweepResult sweep = sweep_mu(p, mu, so);
    write_spectrum(ctx, sweep);

    if (get_bool(ctx.config, "anticrossings", true) && sweep.points.size() >= 3) {
        AnticrossingOptions ao;
        ao.max_isolation = get_real(ctx.config, "isolation", ao.max_isolation);
        ao.exec = ctx.exec;
        const auto records = detect_anticrossings(sweep, ao);
        auto w = ctx.csv("anticrossings.csv", {"level_lo", "level_hi", "mu_star", "gap_min", "fock_n",
                                               "fock_partner", "isolation", "distance_to_integer"});
        double worst = 0.0;
        for (const auto& r : records) {
            const double d = std::abs(r.mu_star - std::round(r.mu_star));
            worst = std::max(worst, d);
            w.row({as_ll(r.level_lo), as_ll(r.level_hi), r.mu_star, r.gap_min, as_ll(r.fock_n),
                   as_ll(r.fock_partner), r.isolation, d});
        }
        ctx.diagnostics["anticrossing_count"] = records.size();
        ctx.diagnostics["max_distance_to_integer"] = worst;
    }
}

void cmd_coupling_sweep(Context& ctx) {
    check_keys(ctx.config, {"model", "g_grid", "g_units", "offset"}, "coupling-sweep config");
    ModelParams p = resolve_model(ctx);
    const GridSpec grid = grid_from_json(require(ctx.config, "g_grid"));
    ctx.resolved["g_grid"] = grid_to_json(grid);
    const std::string units = get_string(ctx.config, "g_units", "absolute");
    auto g = grid.values();
    if (units == "gcrit") {
        const double gc = g_crit(p);
        ctx.resolved["g_crit"] = gc;
        for (auto& v : g) v *= gc;
    } else if (units != "absolute") {
        throw ConfigError("g_units must be 'absolute' or 'gcrit'");
    }
    ctx.resolved["g_units"] = units;
    SweepOptions so;
    so.offset = offset_flag(ctx.config);
    so.exec = ctx.exec;
    write_spectrum(ctx, sweep_g(p, g, so));
}

void cmd_eigenstate_map(Context& ctx) {
    check_keys(ctx.config, {"model", "mu_values", "offset"}, "eigenstate-map config");
    const ModelParams p = resolve_model(ctx);
    std::vector<double> mus;
    if (ctx.config.contains("mu_values")) {
        const Json& arr = ctx.config.at("mu_values");
        if (!arr.is_array() || arr.empty()) throw ConfigError("mu_values must be a non-empty array");
        for (const auto& v : arr) {
            if (!v.is_number()) throw ConfigError("mu_values entries must be numbers");
            mus.push_back(v.get<double>());
        }
    } else {
        mus.push_back(derived_mu(p));
    }
    ctx.resolved["mu_values"] = mus;
    auto w = ctx.csv("coefficients.csv",
                     {"mu", "level_index", "n", "eigenvalue", "dimensionless_eigenvalue", "coefficient"});
    for (double mu : mus) {
        const ModelParams pm = p.with_mu(mu);
        const Spectrum s = eigendecompose(build_subspace_hamiltonian(pm, offset_flag(ctx.config)));
        const auto dimless = dimensionless_energies(s, pm);
        for (int l = 0; l < s.dim; ++l) {
            const auto li = static_cast<std::size_t>(l);
            for (int n = 0; n < s.dim; ++n) {
                w.row({mu, as_ll(l), as_ll(n), s.eigenvalues[li], dimless[li], s.coefficient(l, n)});
            }
        }
    }
}

void cmd_rabi(Context& ctx) {
    check_keys(ctx.config, {"model", "g_over_gcrit", "panels", "time_grid", "time_units"}, "rabi config");
    const ModelParams p = resolve_model(ctx);
    const int m = integer_mu(p);
    const GridSpec tg = grid_from_json(require(ctx.config, "time_grid"));
    ctx.resolved["time_grid"] = grid_to_json(tg);
    const std::string units = get_string(ctx.config, "time_units", "rabi_period");
    if (units != "rabi_period" && units != "absolute") {
        throw ConfigError("time_units must be 'rabi_period' or 'absolute'");
    }
    const Json& panels = require(ctx.config, "panels");
    if (!panels.is_array() || panels.empty()) throw ConfigError("panels must be a non-empty array");

    Json resolved_panels = Json::array();
    Json diag = Json::array();
    for (std::size_t k = 0; k < panels.size(); ++k) {
        const Json& pj = panels[k];
        check_keys(pj, {"n", "delta_mu", "detuning_rabi_units"}, "rabi panel");
        const int n = get_int(pj, "n");
        const ResonantPair pair = make_resonant_pair(n, m, p.big_n);
        const double omega_r = rabi_frequency(pair, p);
        if (pj.contains("delta_mu") && pj.contains("detuning_rabi_units")) {
            throw ConfigError("panel: give delta_mu or detuning_rabi_units, not both");
        }
        // (a1 + a2) delta_mu = D omega_R
        const double dmu = pj.contains("detuning_rabi_units")
                               ? get_real(pj, "detuning_rabi_units") * omega_r / p.alpha_sum()
                               : get_real(pj, "delta_mu", 0.0);
        const ModelParams pk = p.with_mu(m + dmu);
        auto times = tg.values();
        if (units == "rabi_period") {
            if (!(omega_r > 0.0)) throw DomainError("rabi_period units need g > 0");
            for (auto& t : times) t *= std::numbers::pi / omega_r;
        }
        const std::vector<int> targets{n, m - n};
        const auto psi0 = WaveFunction::fock(p.big_n, n);
        const TraceTable exact = projection_traces(pk, psi0, targets, times, ctx.exec);
        const TwoLevelTraces approx = two_level_approximation(p, n, times);

        const std::string tag = "panel" + std::to_string(k);
        auto we = ctx.csv("rabi_" + tag + ".csv", {"time", target_column(n), target_column(m - n)});
        auto wa = ctx.csv("two_level_" + tag + ".csv", {"time", target_column(n), target_column(m - n)});
        double max_transfer = 0.0;
        double peak_time = 0.0;  // argmax of the transfer within the first Rabi period
        const double first_period = omega_r > 0.0 ? std::numbers::pi / omega_r : 0.0;
        double peak = -1.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            we.row({times[i], exact.at(i, 0), exact.at(i, 1)});
            wa.row({times[i], approx.stay[i], approx.transfer[i]});
            max_transfer = std::max(max_transfer, exact.at(i, 1));
            if (times[i] <= first_period && exact.at(i, 1) > peak) {
                peak = exact.at(i, 1);
                peak_time = times[i];
            }
        }
        resolved_panels.push_back({{"n", n}, {"m", m}, {"delta_mu", dmu}});
        diag.push_back({{"panel", k},
                        {"omega_r", omega_r},
                        {"t_star", approx.t_star},
                        {"max_transfer", max_transfer},
                        {"peak_time", peak_time}});
    }
    ctx.resolved["panels"] = resolved_panels;
    ctx.diagnostics["panels"] = diag;
}

void cmd_pt_check(Context& ctx) {
    check_keys(ctx.config, {"model", "cases", "max_order"}, "pt-check config");
    const ModelParams p = resolve_model(ctx);
    const int max_order = get_int(ctx.config, "max_order", 4);
    if (max_order < 4) throw ConfigError("pt-check needs max_order >= 4");
    const Json& cases = require(ctx.config, "cases");
    if (!cases.is_array() || cases.empty()) throw ConfigError("cases must be a non-empty array");

    struct Case {
        int n;
        double mu;
    };
    std::vector<Case> parsed;
    for (const auto& c : cases) {
        check_keys(c, {"n", "mu"}, "pt-check case");
        parsed.push_back({get_int(c, "n"), get_real(c, "mu", derived_mu(p))});
    }
    std::vector<std::vector<PTCorrection>> extracted(parsed.size());
    for_each_index(parsed.size(), ctx.exec, [&](std::size_t i) {
        extracted[i] = extract_series_coefficients(p.with_mu(parsed[i].mu), parsed[i].n, max_order);
    });
    auto w = ctx.csv("pt.csv", {"k", "n", "mu", "closed_form", "extracted", "abs_diff"});
    double worst_sym = 0.0;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        const auto [n, mu] = parsed[i];
        for (int k : {2, 4}) {
            const double closed = k == 2 ? epsilon2_closed(n, mu, p.big_n, p.alpha_sum())
                                         : epsilon4_closed(n, mu, p.big_n, p.alpha_sum());
            const double ext = extracted[i][static_cast<std::size_t>(k / 2)].value;
            w.row({as_ll(k), as_ll(n), mu, closed, ext, std::abs(closed - ext)});
            worst_sym = std::max(worst_sym, check_pt_symmetry(k, n, mu, p.big_n, p.alpha_sum()));
        }
    }
    ctx.diagnostics["max_symmetry_residual"] = worst_sym;
}

void cmd_rabi_freq(Context& ctx) {
    check_keys(ctx.config, {"model", "g_over_gcrit", "g_values"}, "rabi-freq config");
    const ModelParams p = resolve_model(ctx);
    const int m = integer_mu(p);
    std::vector<double> gs;
    if (ctx.config.contains("g_values")) {
        for (const auto& v : ctx.config.at("g_values")) {
            if (!v.is_number() || v.get<double>() < 0.0) throw ConfigError("g_values must be numbers >= 0");
            gs.push_back(v.get<double>());
        }
    } else {
        gs.push_back(p.g);
    }
    auto w = ctx.csv("rabi_freq.csv", {"n", "m", "N", "g", "omega_R", "predicted_splitting"});
    for (double g : gs) {
        const ModelParams pg = p.with_g(g);
        for (int n = 0; 2 * n < m; ++n) {
            if (m - n > p.big_n) continue;
            const double wr = rabi_frequency(make_resonant_pair(n, m, p.big_n), pg);
            w.row({as_ll(n), as_ll(m), as_ll(p.big_n), g, wr, 2.0 * wr});
        }
    }
}

RadiusConvention radius_flag(const Json& cfg, const std::string& fallback) {
    const std::string r = get_string(cfg, "radius", fallback);
    if (r == "quantum") return RadiusConvention::quantum;
    if (r == "large_n") return RadiusConvention::large_n;
    throw ConfigError("radius must be 'quantum' or 'large_n'");
}

void write_trajectory(Context& ctx, const std::string& file, const Trajectory& t) {
    auto w = ctx.csv(file, {"t", "Lx", "Ly", "Lz", "H", "L2"});
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        const auto& s = t.states[i];
        w.row({t.times[i], s.lx, s.ly, s.lz, t.energy[i], s.l2()});
    }
}

// One phase portrait: trajectories, equilibria and the separatrix, files prefixed
// with `prefix`. Returns the per-trajectory diagnostics.
Json portrait_panel(Context& ctx, const ModelParams& p, const std::vector<double>& thetas,
                    const std::string& prefix) {
    const RadiusConvention conv = radius_flag(ctx.config, "quantum");
    const double radius = sphere_radius(p.big_n, conv);
    const double periods = get_real(ctx.config, "periods", 1.0);
    const int samples = get_int(ctx.config, "samples", 400);
    if (!(periods > 0.0)) throw ConfigError("periods must be > 0");
    if (samples < 2) throw ConfigError("samples must be >= 2");
    TrajectoryOptions to;
    to.rtol = get_real(ctx.config, "rtol", to.rtol);
    to.samples = samples;
    PeriodOptions po;
    po.rtol = to.rtol;

    std::vector<Trajectory> trajs(thetas.size());
    std::vector<double> period(thetas.size());
    for_each_index(thetas.size(), ctx.exec, [&](std::size_t i) {
        const ClassicalState s0 = state_on_circle(thetas[i], radius);
        period[i] = period_average(s0, p, po).period;
        const double span = period[i] > 0.0 ? periods * period[i] : 1.0;
        trajs[i] = integrate_trajectory(s0, p, span, to);
    });
    Json tdiag = Json::array();
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "trajectory_%03zu.csv", i);
        write_trajectory(ctx, prefix + name, trajs[i]);
        tdiag.push_back({{"theta0", thetas[i]},
                         {"period", period[i]},
                         {"l2_drift", trajs[i].l2_drift},
                         {"h_drift", trajs[i].h_drift},
                         {"completed", trajs[i].completed},
                         {"diagnostic", trajs[i].diagnostic}});
    }

    if (p.g > 0.0) {
        EquilibriumOptions eo;
        eo.radius = conv;
        const auto eq = find_equilibria(p, eo);
        auto w = ctx.csv(prefix + "equilibria.csv", {"label", "theta", "Lx", "Ly", "Lz", "stability", "H"});
        std::optional<EquilibriumPoint> saddle;
        for (const auto& e : eq) {
            w.row({std::string(label_name(e.label)), e.theta, e.state.lx, e.state.ly, e.state.lz,
                   std::string(e.stability == Stability::stable ? "stable" : "unstable"),
                   classical_hamiltonian(e.state, p)});
            if (e.stability == Stability::unstable) saddle = e;
        }
        if (saddle && get_bool(ctx.config, "separatrix", true)) {
            // Leave the saddle along the circle; the orbit traces the separatrix
            // until it returns close to S (the return time grows like log(1/eps)).
            const double longest = period.empty() ? 1.0 : *std::max_element(period.begin(), period.end());
            TrajectoryOptions so = to;
            so.samples = 4 * samples;
            const ClassicalState s0 = state_on_circle(saddle->theta + 1e-7, radius);
            const double span = std::max(longest, 1.0) * 4.0;
            write_trajectory(ctx, prefix + "separatrix.csv", integrate_trajectory(s0, p, span, so));
        }
    }
    return tdiag;
}

void cmd_classical_portrait(Context& ctx) {
    check_keys(ctx.config, {"model", "g_over_gcrit", "panels", "thetas", "trajectory_count", "periods",
                            "samples", "rtol", "radius", "separatrix"},
               "classical-portrait config");
    const ModelParams p = resolve_model(ctx);
    std::vector<double> thetas;
    if (ctx.config.contains("thetas")) {
        for (const auto& v : ctx.config.at("thetas")) {
            if (!v.is_number()) throw ConfigError("thetas must be numbers");
            thetas.push_back(v.get<double>());
        }
    } else {
        const int count = get_int(ctx.config, "trajectory_count", 12);
        if (count < 1) throw ConfigError("trajectory_count must be >= 1");
        for (int i = 0; i < count; ++i) thetas.push_back(-std::numbers::pi + 2.0 * std::numbers::pi * (i + 0.5) / count);
    }
    ctx.resolved["thetas"] = thetas;
    ctx.resolved["radius"] = sphere_radius(p.big_n, radius_flag(ctx.config, "quantum"));

    if (!ctx.config.contains("panels")) {
        ctx.diagnostics["trajectories"] = portrait_panel(ctx, p, thetas, "");
        return;
    }
    // Several couplings on the same oscillators, one file set per panel.
    const Json& panels = ctx.config.at("panels");
    if (!panels.is_array() || panels.empty()) throw ConfigError("panels must be a non-empty array");
    Json resolved = Json::array();
    Json diag = Json::array();
    for (std::size_t k = 0; k < panels.size(); ++k) {
        const Json& panel = panels[k];
        check_keys(panel, {"g", "g_over_gcrit"}, "classical-portrait panel");
        if (panel.contains("g") == panel.contains("g_over_gcrit")) {
            throw ConfigError("each panel needs exactly one of g / g_over_gcrit");
        }
        const double g = panel.contains("g") ? get_real(panel, "g") : get_real(panel, "g_over_gcrit") * g_crit(p);
        if (!(g >= 0.0)) throw ConfigError("panel coupling must be >= 0");
        const ModelParams pk = p.with_g(g);
        const std::string prefix = "panel" + std::to_string(k) + "_";
        diag.push_back({{"g", g}, {"sqrt_beta", std::sqrt(beta(pk))}, {"trajectories", portrait_panel(ctx, pk, thetas, prefix)}});
        resolved.push_back({{"g", g}, {"prefix", prefix}});
    }
    ctx.resolved["panels"] = resolved;
    ctx.diagnostics["panels"] = diag;
}

void cmd_branches(Context& ctx) {
    check_keys(ctx.config, {"model", "sqrt_beta_grid", "radius"}, "branches config");
    const ModelParams p = resolve_model(ctx);
    const GridSpec grid = grid_from_json(require(ctx.config, "sqrt_beta_grid"));
    ctx.resolved["sqrt_beta_grid"] = grid_to_json(grid);
    EquilibriumOptions eo;
    eo.radius = radius_flag(ctx.config, "large_n");
    const auto sb = grid.values();
    std::vector<BranchRow> rows(sb.size());
    for_each_index(sb.size(), ctx.exec, [&](std::size_t i) {
        rows[i] = equilibrium_branches(p, std::span<const double>(&sb[i], 1), eo).front();
    });
    auto w = ctx.csv("branches.csv", {"sqrt_beta", "theta_P1", "theta_P2", "theta_P3", "theta_S", "stable_P1",
                                      "stable_P2", "stable_P3", "stable_S"});
    for (const auto& r : rows) {
        std::vector<CsvCell> cells{r.sqrt_beta};
        for (const auto& pt : r.points) {
            cells.push_back(pt ? CsvCell(branch_angle(pt->state)) : CsvCell(std::monostate{}));
        }
        for (const auto& pt : r.points) {
            cells.push_back(pt ? CsvCell(static_cast<long long>(pt->stability == Stability::stable))
                               : CsvCell(std::monostate{}));
        }
        w.row(cells);
    }
    const double mu = derived_mu(p);
    const double gamma = p.big_n / mu;
    ctx.diagnostics["gamma"] = gamma;
    if (gamma >= 1.0) {
        ctx.diagnostics["beta_crit"] = beta_crit(gamma);
        ctx.diagnostics["sqrt_beta_crit"] = std::sqrt(beta_crit(gamma));
    }
}

void cmd_compare_averages(Context& ctx) {
    check_keys(ctx.config, {"model", "g_over_gcrit", "scan_count", "separatrix_band", "doublet_ratio", "radius"},
               "compare-averages config");
    const ModelParams p = resolve_model(ctx);
    ComparisonOptions co;
    co.radius = radius_flag(ctx.config, "quantum");
    co.separatrix_band = get_real(ctx.config, "separatrix_band", co.separatrix_band);
    co.doublet_ratio = get_real(ctx.config, "doublet_ratio", co.doublet_ratio);
    if (co.doublet_ratio < 0.0) throw ConfigError("doublet_ratio must be >= 0");
    co.exec = ctx.exec;
    const auto records = compare_averages(p, co);
    auto wq = ctx.csv("quantum_averages.csv", {"level", "energy", "eps_tilde", "qm_lx", "qm_lz", "doublet",
                                               "loc_lx", "loc_lz", "cl_lx", "cl_lz", "lz_abs_diff",
                                               "near_separatrix", "candidates"});
    double worst = 0.0;
    for (const auto& r : records) {
        auto opt = [](double v) { return std::isnan(v) ? CsvCell(std::monostate{}) : CsvCell(v); };
        wq.row({as_ll(r.quantum.level), r.quantum.energy, r.quantum.dimensionless, r.quantum.lx, r.quantum.lz,
                static_cast<long long>(r.doublet), r.local_lx, r.local_lz, opt(r.classical_lx), opt(r.classical_lz), opt(r.lz_difference),
                static_cast<long long>(r.near_separatrix), as_ll(r.candidates)});
        if (!r.near_separatrix && !std::isnan(r.lz_difference)) worst = std::max(worst, r.lz_difference);
    }
    ctx.diagnostics["max_lz_difference"] = worst;
    ctx.diagnostics["tolerance"] = 0.05 * p.big_n;

    const int count = get_int(ctx.config, "scan_count", 200);
    const auto scan = classical_energy_scan(p, count, co);
    auto wc = ctx.csv("classical_averages.csv", {"energy", "eps_tilde", "orbit", "theta0", "period", "lx", "lz"});
    for (const auto& s : scan) {
        for (std::size_t k = 0; k < s.orbits.size(); ++k) {
            const auto& o = s.orbits[k];
            wc.row({s.energy, s.dimensionless, static_cast<long long>(k), o.theta0, o.average.period,
                    o.average.lx, o.average.lz});
        }
    }
}

void cmd_symmetry_check(Context& ctx) {
    check_keys(ctx.config, {"N", "mu", "kmax", "x", "margin"}, "symmetry-check config");
    const int big_n = get_int(ctx.config, "N");
    const int mu = get_int(ctx.config, "mu");
    const int kmax = get_int(ctx.config, "kmax", 12);
    if (kmax < 1) throw ConfigError("kmax must be >= 1");
    const int margin = get_int(ctx.config, "margin", kmax + 2);
    std::vector<mpq_class> xs;
    const Json& xj = require(ctx.config, "x");
    if (xj.is_string()) {
        xs.push_back(parse_rational(xj.get<std::string>()));
    } else if (xj.is_array() && !xj.empty()) {
        for (const auto& v : xj) {
            if (!v.is_string()) throw ConfigError("x entries must be strings like \"3/7\"");
            xs.push_back(parse_rational(v.get<std::string>()));
        }
    } else {
        throw ConfigError("x must be a rational string or a non-empty array of them");
    }
    const LatticeWindow w = default_window(big_n, mu);
    ctx.resolved["window"] = {w.lo, w.hi};
    ctx.resolved["margin"] = margin;

    auto out = ctx.csv("symmetry.csv", {"identity", "x", "residual", "status"});
    std::ostream& os = *ctx.out;
    auto report = [&](const std::string& identity, const std::string& x, const std::string& residual, bool ok) {
        os << (ok ? "PASS " : "FAIL ") << identity << " x=" << x << " residual=" << residual << '\n';
        out.row({identity, x, residual, std::string(ok ? "PASS" : "FAIL")});
        if (!ok) ctx.failed = true;
    };
    const mpq_class rec = verify_recurrence(w, kmax);
    report("recurrence", "-", rec.get_str(), rec == 0);
    for (const auto& x : xs) {
        const std::string xs_str = x.get_str();
        const auto res = verify_intertwining(w, x, margin);
        report("intertwining", xs_str, res.interior.get_str(), res.interior == 0);
        const mpq_class inv = verify_T_inverse(w, x);
        report("T_inverse", xs_str, inv.get_str(), inv == 0);
        const bool graded = check_T_grading(build_T(w, x));
        report("T_grading", xs_str, graded ? "0" : "1", graded);
        if (mu >= 0 && x != 0) {
            const auto sim = similarity_check(big_n, mu, x);
            report("similarity_H1", xs_str, format_real(sim.h1), sim.h1 <= 1e-12);
            report("similarity_H2", xs_str, format_real(sim.h2), sim.h2 <= 1e-12);
        }
        ctx.diagnostics["boundary_residual_" + xs_str] = res.boundary.get_str();
    }
}

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> table{
        {"spectrum-sweep", cmd_spectrum_sweep},
        {"coupling-sweep", cmd_coupling_sweep},
        {"eigenstate-map", cmd_eigenstate_map},
        {"rabi", cmd_rabi},
        {"pt-check", cmd_pt_check},
        {"symmetry-check", cmd_symmetry_check},
        {"rabi-freq", cmd_rabi_freq},
        {"classical-portrait", cmd_classical_portrait},
        {"branches", cmd_branches},
        {"compare-averages", cmd_compare_averages},
    };
    return table;
}

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
}

}  // namespace

std::vector<std::string> subcommands() {
    std::vector<std::string> out;
    for (const auto& [name, h] : handlers()) {
        (void)h;
        out.push_back(name);
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"kerrpair: two coupled Kerr oscillators"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    // symmetry-check can also be driven from flags
    int sym_n = -1;
    int sym_mu = -1;
    int sym_kmax = 12;
    std::vector<std::string> sym_x;

    for (const auto& [name, h] : handlers()) {
        (void)h;
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads (default: hardware)");
        if (name == "symmetry-check") {
            sub->add_option("--N", sym_n, "total quanta");
            sub->add_option("--mu", sym_mu, "integer resonance parameter");
            sub->add_option("--kmax", sym_kmax, "highest Taylor order");
            sub->add_option("--x", sym_x, "coupling x = 2g/(a1+a2) as p/q (repeatable)");
        }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "kerrpair: " << e.what() << '\n';
        return kExitConfig;
    }

    const auto subs = app.get_subcommands();
    Context ctx;
    ctx.name = subs.front()->get_name();
    ctx.out = &out;
    try {
        if (!config_path.empty()) {
            ctx.config = load_config(config_path);
            if (!ctx.config.is_object()) throw ConfigError("config must be a JSON object");
        } else if (ctx.name == "symmetry-check" && sym_n >= 0) {
            ctx.config = Json{{"N", sym_n}, {"mu", sym_mu}, {"kmax", sym_kmax}};
            ctx.config["x"] = sym_x.empty() ? std::vector<std::string>{"1/3"} : sym_x;
        } else {
            throw ConfigError("--config is required for " + ctx.name);
        }
        if (threads < 0) throw ConfigError("--threads must be >= 1 (0 keeps the default)");
        if (threads > 0) set_thread_count(threads);
        ctx.exec = threads == 1 ? Execution::serial : Execution::parallel;
        ctx.out_dir = out_dir;
        std::error_code ec;
        fs::create_directories(ctx.out_dir, ec);
        if (ec) throw ConfigError("cannot create output directory " + out_dir + ": " + ec.message());

        handlers().at(ctx.name)(ctx);

        Json sidecar{{"subcommand", ctx.name},
                     {"config", ctx.config},
                     {"resolved", ctx.resolved},
                     {"outputs", ctx.outputs},
                     {"diagnostics", ctx.diagnostics}};
        std::ofstream side(ctx.out_dir / (ctx.name + ".json"), std::ios::binary);
        side << sidecar.dump(2) << '\n';
        if (!side) throw ConfigError("cannot write sidecar JSON");
    } catch (const ConfigError& e) {
        err << "kerrpair " << ctx.name << ": config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "kerrpair " << ctx.name << ": numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DomainError& e) {
        err << "kerrpair " << ctx.name << ": invalid parameters: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Json::exception& e) {
        err << "kerrpair " << ctx.name << ": config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "kerrpair " << ctx.name << ": " << e.what() << '\n';
        return kExitNumerical;
    }
    if (ctx.failed) {
        err << "kerrpair " << ctx.name << ": verification failed\n";
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace kerrpair::cli
