#pragma once

// Scenario runner: flat key=value configs, validation, CSV-producing named
// experiments, parameter sweeps with per-run files plus a summary, and the
// selftest invariant suite backing the CLI.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gapdyn/closed.hpp"
#include "gapdyn/csv.hpp"
#include "gapdyn/ensemble.hpp"
#include "gapdyn/errors.hpp"
#include "gapdyn/lattice.hpp"
#include "gapdyn/open.hpp"
#include "gapdyn/swt.hpp"

namespace gapdyn {

struct ScenarioConfig {
    std::string scenario;
    std::map<std::string, std::string> params;
    std::string output_path;
};

inline std::string trim_ws(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

/// Parses "key = value" lines; blank lines and lines starting with '#' are
/// skipped. Keys "scenario" and "output" are lifted into dedicated fields.
inline ScenarioConfig parse_config(std::istream& in) {
    ScenarioConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim_ws(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim_ws(t.substr(0, eq));
        std::string val = trim_ws(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (key == "scenario")
            cfg.scenario = val;
        else if (key == "output")
            cfg.output_path = val;
        else
            cfg.params[key] = val;
    }
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_config(in);
}

namespace detail {

inline std::optional<double> get_num(const ScenarioConfig& cfg, const std::string& key) {
    auto it = cfg.params.find(key);
    if (it == cfg.params.end()) return std::nullopt;
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline double need_num(const ScenarioConfig& cfg, const std::string& key) {
    auto v = get_num(cfg, key);
    if (!v) throw ConfigError("missing or non-numeric parameter: " + key);
    return *v;
}

inline double num_or(const ScenarioConfig& cfg, const std::string& key, double dflt) {
    auto v = get_num(cfg, key);
    return v ? *v : dflt;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw InvalidParamError("linspace: need at least one point");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        out.push_back(lo);
        return out;
    }
    for (int k = 0; k < n; ++k) out.push_back(lo + (hi - lo) * k / (n - 1));
    return out;
}

/// Applies the output-directory override from the environment, if any.
inline std::string resolve_output(const std::string& path) {
    const char* dir = std::getenv("GAPDYN_OUTPUT_DIR");
    if (!dir || !*dir) return path;
    std::filesystem::path p(path);
    return (std::filesystem::path(dir) / p.filename()).string();
}

inline std::string with_suffix(const std::string& path, const std::string& tag) {
    std::filesystem::path p(path);
    std::filesystem::path stem = p.stem();
    std::filesystem::path ext = p.extension();
    return (p.parent_path() / (stem.string() + tag + ext.string())).string();
}

}  // namespace detail

/// Per-scenario parameter requirements: key plus whether it must be positive.
inline const std::map<std::string, std::vector<std::pair<std::string, bool>>>&
scenario_requirements() {
    static const std::map<std::string, std::vector<std::pair<std::string, bool>>> reqs = {
        {"closed-bound",
         {{"dim", true}, {"band_rank", true}, {"ratio", true}, {"seed", false},
          {"t_max", true}, {"num_times", true}}},
        {"single-state", {{"delta0", true}, {"omega", true}, {"t_max", true}, {"num_times", true}}},
        {"pxp-lightcone",
         {{"N", true}, {"delta0", true}, {"omega", true}, {"t_max", true}, {"dt", true},
          {"threshold", true}}},
        {"pxp-collapse",
         {{"N", true}, {"delta0", true}, {"omega", true}, {"s_max", true}, {"num_times", true}}},
        {"zeno-example1", {{"delta0", true}, {"omega", true}, {"t_max", true}, {"num_times", true}}},
        {"zeno-example2", {{"delta0", true}, {"omega", true}, {"t_max", true}, {"num_times", true}}},
        {"bound-tables", {{"x_min", false}, {"x_max", true}, {"num_points", true}}},
    };
    return reqs;
}

/// Lists everything that would make run_scenario reject the config; empty
/// result means the config is runnable.
inline std::vector<std::string> validate_config(const ScenarioConfig& cfg) {
    std::vector<std::string> issues;
    const auto& reqs = scenario_requirements();
    auto it = reqs.find(cfg.scenario);
    if (it == reqs.end()) {
        issues.push_back("unknown scenario: '" + cfg.scenario + "'");
        return issues;
    }
    if (cfg.output_path.empty()) issues.push_back("missing output path (key 'output')");
    for (const auto& [key, positive] : it->second) {
        auto v = detail::get_num(cfg, key);
        if (!v) {
            issues.push_back("missing or non-numeric parameter: " + key);
            continue;
        }
        if (positive && *v <= 0) issues.push_back("parameter must be positive: " + key);
    }
    if (cfg.scenario == "closed-bound") {
        auto r = detail::get_num(cfg, "ratio");
        if (r && *r >= 0.5) issues.push_back("ratio must be below 0.5 for the b2 column");
        auto d = detail::get_num(cfg, "dim");
        auto b = detail::get_num(cfg, "band_rank");
        if (d && b && *b >= *d) issues.push_back("band_rank must be smaller than dim");
    }
    if (cfg.scenario == "bound-tables") {
        auto lo = detail::get_num(cfg, "x_min");
        auto hi = detail::get_num(cfg, "x_max");
        if (lo && *lo < 0) issues.push_back("x_min must be >= 0");
        if (hi && *hi >= 0.5) issues.push_back("x_max must be below 0.5");
        if (lo && hi && *lo >= *hi) issues.push_back("x_min must be below x_max");
    }
    if (cfg.scenario == "pxp-lightcone") {
        auto th = detail::get_num(cfg, "threshold");
        if (th && (*th <= 0 || *th >= 2)) issues.push_back("threshold must lie in (0, 2)");
    }
    return issues;
}

/// Result of one scenario run: every file written, plus scenario-specific
/// scalar summaries (e.g. the extracted velocity).
struct ScenarioResult {
    std::vector<std::string> written;
    std::map<std::string, double> summary;
    CsvTrace main_trace;
};

inline ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    std::vector<std::string> issues = validate_config(cfg);
    if (!issues.empty()) throw ConfigError("invalid config: " + issues.front());
    std::string out_path = detail::resolve_output(cfg.output_path);
    ScenarioResult result;
    CsvTrace trace;

    if (cfg.scenario == "closed-bound") {
        SplitMix64 rng(static_cast<std::uint64_t>(detail::num_or(cfg, "seed", 1.0)));
        RandomInstance inst = random_gapped_instance(
            rng, static_cast<int>(detail::need_num(cfg, "dim")),
            static_cast<int>(detail::need_num(cfg, "band_rank")), detail::need_num(cfg, "ratio"));
        Operator o = random_hermitian(rng, inst.h0.rows());
        o /= op_norm(o);
        auto times = detail::linspace(0.0, detail::need_num(cfg, "t_max"),
                                      static_cast<int>(detail::need_num(cfg, "num_times")));
        ErrorTrace et = epsilon_closed(inst.h0, inst.v, inst.split, o, times);
        trace.header = {"t", "epsilon", "b1", "b2", "asymptotic"};
        for (std::size_t k = 0; k < et.times.size(); ++k)
            trace.rows.push_back({et.times[k], et.epsilon[k], et.bounds["b1"][k],
                                  et.bounds["b2"][k], et.bounds["asymptotic"][k]});
        result.summary["max_epsilon"] =
            *std::max_element(et.epsilon.begin(), et.epsilon.end());
    } else if (cfg.scenario == "single-state") {
        double delta0 = detail::need_num(cfg, "delta0");
        double omega = detail::need_num(cfg, "omega");
        Operator h0 = Operator::Zero(2, 2);
        h0(1, 1) = delta0;
        Operator v = (omega / 2.0) * pauli_x();
        auto times = detail::linspace(0.0, detail::need_num(cfg, "t_max"),
                                      static_cast<int>(detail::need_num(cfg, "num_times")));
        ErrorTrace et = epsilon_single_state(h0, v, 0, pauli_x(), times);
        trace.header = {"t", "epsilon", "const_bound"};
        for (std::size_t k = 0; k < et.times.size(); ++k)
            trace.rows.push_back({et.times[k], et.epsilon[k], et.bounds["const_bound"][k]});
        result.summary["max_epsilon"] =
            *std::max_element(et.epsilon.begin(), et.epsilon.end());
    } else if (cfg.scenario == "pxp-lightcone") {
        int n = static_cast<int>(detail::need_num(cfg, "N"));
        auto [h0s, vs] = build_pxp(n, detail::need_num(cfg, "delta0"),
                                   detail::need_num(cfg, "omega"));
        Operator h = h0s.total() + vs.total();
        LocalTerm ox(SupportSet{1}, embed_site(pauli_y(), 1, n));
        double t_max = detail::need_num(cfg, "t_max");
        double dt = detail::need_num(cfg, "dt");
        int steps = static_cast<int>(std::floor(t_max / dt + 1e-9)) + 1;
        LightConeGrid grid = light_cone(h, ox, n, detail::linspace(0.0, dt * (steps - 1), steps));
        trace.header = {"t", "site", "commutator_norm"};
        for (std::size_t i = 0; i < grid.times.size(); ++i)
            for (std::size_t j = 0; j < grid.sites.size(); ++j)
                trace.rows.push_back({grid.times[i], static_cast<double>(grid.sites[j]),
                                      grid.norms(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(j))});
        VelocityFit fit = velocity_extract(grid, detail::need_num(cfg, "threshold"));
        CsvTrace crossings;
        crossings.header = {"site", "crossing_time"};
        for (auto [site, t] : fit.crossings)
            crossings.rows.push_back({static_cast<double>(site), t});
        std::string cross_path = detail::with_suffix(out_path, ".crossings");
        write_csv(cross_path, crossings);
        result.written.push_back(cross_path);
        result.summary["velocity"] = fit.velocity;
        result.summary["r_squared"] = fit.r_squared;
    } else if (cfg.scenario == "pxp-collapse") {
        int n = static_cast<int>(detail::need_num(cfg, "N"));
        double omega = detail::need_num(cfg, "omega");
        auto [h0s, vs] = build_pxp(n, detail::need_num(cfg, "delta0"), omega);
        Operator h = h0s.total() + vs.total();
        LocalTerm ox(SupportSet{1}, embed_site(pauli_y(), 1, n));
        LocalTerm oy(SupportSet{6}, embed_site(pauli_y(), 6, n));
        double v_star = interaction_norm(vs);  // Omega/2 for this model
        auto s_grid = detail::linspace(0.0, detail::need_num(cfg, "s_max"),
                                       static_cast<int>(detail::need_num(cfg, "num_times")));
        std::vector<double> times;
        for (double s : s_grid) times.push_back(s / v_star);
        std::vector<double> norms = commutator_growth(h, ox, oy, times);
        trace.header = {"t", "vstar_t", "commutator_norm"};
        double peak = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            trace.rows.push_back({times[k], s_grid[k], norms[k]});
            peak = std::max(peak, norms[k]);
        }
        result.summary["peak_norm"] = peak;
    } else if (cfg.scenario == "zeno-example1" || cfg.scenario == "zeno-example2") {
        double delta0 = detail::need_num(cfg, "delta0");
        double omega = detail::need_num(cfg, "omega");
        auto [model, o] = (cfg.scenario == "zeno-example1") ? build_example1(delta0, omega)
                                                            : build_example2(delta0, omega);
        auto times = detail::linspace(0.0, detail::need_num(cfg, "t_max"),
                                      static_cast<int>(detail::need_num(cfg, "num_times")));
        ErrorTrace et = epsilon_open(model, o, times, detail::num_or(cfg, "step", 0.0));
        trace.header = {"t", "epsilon", "bound_exact", "bound_asymptotic"};
        for (std::size_t k = 0; k < et.times.size(); ++k)
            trace.rows.push_back({et.times[k], et.epsilon[k], et.bounds["exact"][k],
                                  et.bounds["asymptotic"][k]});
        result.summary["final_epsilon"] = et.epsilon.back();
    } else if (cfg.scenario == "bound-tables") {
        auto xs = detail::linspace(detail::num_or(cfg, "x_min", 0.01),
                                   detail::need_num(cfg, "x_max"),
                                   static_cast<int>(detail::need_num(cfg, "num_points")));
        trace.header = {"x", "slope_b1", "slope_b2", "intercept_b1", "intercept_b2"};
        for (double x : xs) {
            // Units Delta0 = 1, ||V|| = x.
            BoundParams p;
            p.v_norm = x;
            p.gap = 1.0;
            trace.rows.push_back({x, slope_b1_reduced(x) * x, slope_b2_reduced(x) * x,
                                  4.0 * x, 4.0 * x / (1.0 - 2.0 * x)});
        }
        result.summary["crossover"] = slope_crossover();
    } else {
        throw ConfigError("unknown scenario: " + cfg.scenario);
    }

    write_csv(out_path, trace);
    result.written.insert(result.written.begin(), out_path);
    result.main_trace = std::move(trace);
    return result;
}

/// Runs the template once per axis value (axis key overridden), writing one
/// CSV per run plus a summary CSV. Failed members are recorded with status 0
/// and NaN summary; the sweep continues.
inline std::vector<std::string> sweep(const ScenarioConfig& tmpl, const std::string& axis,
                                      const std::vector<std::string>& values) {
    std::vector<std::string> written;
    CsvTrace summary;
    summary.header = {axis, "summary", "status"};
    std::vector<std::vector<double>> first_curve;  // reference for collapse deviation
    for (const std::string& val : values) {
        ScenarioConfig cfg = tmpl;
        cfg.params[axis] = val;
        cfg.output_path = detail::with_suffix(tmpl.output_path, "_" + axis + "=" + val);
        double axis_num = std::strtod(val.c_str(), nullptr);
        try {
            ScenarioResult res = run_scenario(cfg);
            written.insert(written.end(), res.written.begin(), res.written.end());
            double scalar = std::numeric_limits<double>::quiet_NaN();
            if (cfg.scenario == "pxp-lightcone") {
                scalar = res.summary.at("velocity");
            } else if (cfg.scenario == "pxp-collapse") {
                // Sup-norm deviation of the rescaled curve from the first run.
                if (first_curve.empty()) {
                    first_curve = res.main_trace.rows;
                    scalar = 0.0;
                } else {
                    double dev = 0.0;
                    std::size_t m = std::min(first_curve.size(), res.main_trace.rows.size());
                    for (std::size_t k = 0; k < m; ++k)
                        dev = std::max(dev,
                                       std::abs(first_curve[k][2] - res.main_trace.rows[k][2]));
                    scalar = dev;
                }
            } else if (!res.summary.empty()) {
                scalar = res.summary.begin()->second;
            }
            summary.rows.push_back({axis_num, scalar, 1.0});
        } catch (const Error&) {
            summary.rows.push_back({axis_num, std::numeric_limits<double>::quiet_NaN(), 0.0});
        }
    }
    std::string summary_path =
        detail::resolve_output(detail::with_suffix(tmpl.output_path, "_summary"));
    write_csv(summary_path, summary);
    written.push_back(summary_path);
    return written;
}

/// Compact invariant suite behind `selftest`: one line per check, returns
/// true iff everything passed. Kept to a few seconds of runtime.
inline bool selftest(std::ostream& out) {
    int failed = 0;
    auto check = [&](const std::string& name, bool ok) {
        out << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        if (!ok) ++failed;
    };

    try {
        double xc = slope_crossover();
        check("slope crossover in [0.1882, 0.1892]", xc >= 0.1882 && xc <= 0.1892);

        check("f_slope(1) = 1", std::abs(f_slope(1.0) - 1.0) < 1e-12);

        // p_kappa dual route at a few points.
        bool pk_ok = true;
        for (double kappa : {0.3, 0.5, 1.0})
            for (double r : {0.0, 2.5, 10.0}) {
                double a = detail::p_kappa_1d(r, kappa);
                double b = 2.0 * (2.0 * r + 1.0) + 4.0 * std::exp(kappa) / std::expm1(kappa);
                if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b))) pk_ok = false;
            }
        check("1D light-cone polynomial dual route", pk_ok);

        // Small random closed-system ensemble.
        SplitMix64 rng(42);
        bool bounds_ok = true, resid_ok = true;
        for (int k = 0; k < 5; ++k) {
            int dim = 4 + static_cast<int>(rng.next_u64() % 5);
            double ratio = rng.uniform(0.05, 0.4);
            RandomInstance inst = random_gapped_instance(rng, dim, 1, ratio);
            Operator o = random_hermitian(rng, dim);
            o /= op_norm(o);
            double v_norm = op_norm(inst.v);
            auto times = detail::linspace(0.0, 10.0 / v_norm, 8);
            ErrorTrace et = epsilon_closed(inst.h0, inst.v, inst.split, o, times);
            BoundParams bp;
            bp.v_norm = v_norm;
            bp.gap = inst.split.gap;
            for (std::size_t i = 0; i < et.times.size(); ++i) {
                if (et.epsilon[i] > et.bounds["b1"][i] + 1e-12) bounds_ok = false;
                if (et.epsilon[i] > et.bounds["b2"][i] + 1e-12) bounds_ok = false;
            }
            SwtResult res =
                v_prime(swt_generator(inst.h0, inst.v, inst.split, SwtVariant::ClosedH0),
                        inst.v, inst.split);
            auto [vd, voff] = block_split(inst.v, inst.split);
            if (op_norm(inst.h0 * res.T - res.T * inst.h0 - voff) > 1e-10 * v_norm)
                resid_ok = false;
            if (op_norm(res.T) > v_norm / inst.split.gap + 1e-12) resid_ok = false;
        }
        check("random ensemble: epsilon within both universal bounds", bounds_ok);
        check("random ensemble: generator residual and ||T|| bound", resid_ok);

        // Open-system sanity: unitality and the unitary limit.
        auto [m1, o1] = build_example1(1.0, 0.05);
        Operator id = identity_op(2);
        OpenTrajectory unital = evolve_open(m1, id, {0.0, 1.0, 3.0});
        check("adjoint map is unital", op_norm(unital.observables.back() - id) < 1e-8);
        LindbladModel no_jumps(m1.V, {});
        OpenTrajectory free = evolve_open(no_jumps, o1, {2.0}, 2e-3);
        Operator uni = evolve_conjugate(m1.V, o1, 2.0);
        check("jump-free evolution matches the unitary channel",
              op_norm(free.observables[0] - uni) < 1e-8);

        // Example-1 saturation plateau.
        auto times = detail::linspace(0.0, 40.0, 400);
        ErrorTrace zeno = epsilon_open(m1, o1, times);
        double sat = saturation_value(zeno);
        double target = 2.0 * 0.05 * 1.0 / (2.0 + 0.05 * 0.05);
        check("driven-atom plateau matches the analytic value",
              std::abs(sat - target) <= 0.02 * target);
    } catch (const std::exception& e) {
        out << "[FAIL] selftest aborted: " << e.what() << "\n";
        ++failed;
    }
    out << (failed == 0 ? "selftest: all checks passed\n"
                        : "selftest: " + std::to_string(failed) + " check(s) failed\n");
    return failed == 0;
}

}  // namespace gapdyn
