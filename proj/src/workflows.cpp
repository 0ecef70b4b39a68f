#include "etesc/workflows.hpp"

#include "etesc/csv_io.hpp"
#include "etesc/lyapunov.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>

namespace etesc {

void Report::add(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
}

void Report::add(const std::string& key, double value) {
    entries.emplace_back(key, format_number(value));
}

void Report::add(const std::string& key, long long value) {
    entries.emplace_back(key, std::to_string(value));
}

void Report::check(const std::string& name, bool pass) {
    entries.emplace_back("check_" + name, pass ? "pass" : "fail");
    if (!pass) {
        failed_checks.push_back(name);
    }
}

std::string Report::render() const {
    std::string out;
    for (const auto& [key, value] : entries) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

namespace {

std::string join_path(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) {
            throw ConfigError(fmt::format("cannot create output directory '{}': {}", dir, ec.message()));
        }
    }
}

void add_common(Report& rep, const Scenario& sc) {
    rep.add("scenario", sc.name);
    rep.add("mode", std::string(to_string(sc.sim.mode)));
    rep.add("trigger", std::string(to_string(sc.sim.trigger.kind)));
    rep.add("config_hash", fmt::format("{:016x}", sc.sim.hash()));
    for (std::size_t i = 0; i < sc.notes.size(); ++i) {
        rep.add(fmt::format("note_{}", i), sc.notes[i]);
    }
}

}  // namespace

Report simulate_scenario(const Scenario& sc, const std::string& out_dir) {
    Report rep;
    add_common(rep, sc);
    RunOptions opts;
    opts.keep_trajectory = true;
    const RunResult res = run(sc.sim, opts);
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        const std::string traj_path = join_path(out_dir, sc.trajectory_file);
        const std::string ev_path = join_path(out_dir, sc.events_file);
        write_file(traj_path, [&](std::ostream& o) { write_trajectory_csv(o, res.trajectory); });
        write_file(ev_path, [&](std::ostream& o) { write_event_csv(o, res.events); });
        rep.add("trajectory_file", traj_path);
        rep.add("events_file", ev_path);
    }
    rep.add("dt", sc.sim.dt);
    rep.add("grid_resolution", sc.sim.dt);
    rep.add("steps", res.steps);
    rep.add("records", static_cast<long long>(res.trajectory.size()));
    rep.add("event_count", static_cast<long long>(res.events.size()));
    const auto intervals = res.events.intervals();
    if (!intervals.empty()) {
        const IntervalStats st = interval_stats(intervals);
        rep.add("min_interval", st.min_interval);
        rep.add("mean_interval", st.mean);
        rep.add("max_interval", st.max_interval);
    } else {
        rep.add("min_interval", std::string("nan"));
        rep.add("mean_interval", std::string("nan"));
        rep.add("max_interval", std::string("nan"));
    }
    rep.add("max_events_per_window", max_events_in_window(res.events, sc.checks.max_events_window));
    rep.add("event_window", sc.checks.max_events_window);

    const ConvergenceSummary cs = convergence_metrics(res.trajectory, sc.sim.map, sc.checks.window, sc.checks.ball);
    rep.add("final_window_start", cs.window_start);
    rep.add("theta_hat_err_mean", cs.theta_hat_err_mean);
    rep.add("theta_hat_err_max", cs.theta_hat_err_max);
    rep.add("theta_err_mean", cs.theta_err_mean);
    rep.add("theta_err_max", cs.theta_err_max);
    rep.add("y_err_mean", cs.y_err_mean);
    rep.add("y_err_max", cs.y_err_max);
    rep.add("settling_time", cs.settling_time);
    rep.add("decay_rate", cs.decay_rate);
    const Vector& th = res.final_theta_hat;
    for (Eigen::Index i = 0; i < th.size(); ++i) {
        rep.add(fmt::format("final_theta_hat_{}", i), th(i));
    }

    if (sc.checks.theta_hat_tol) {
        rep.check("theta_hat_tol", cs.theta_hat_err_mean <= *sc.checks.theta_hat_tol);
    }
    if (sc.checks.y_tol) {
        rep.check("y_tol", cs.y_err_mean <= *sc.checks.y_tol);
    }
    if (sc.checks.residual_c && sc.sim.mode == SimMode::Full) {
        const CommonPeriod cp = sc.sim.dither.common_period();
        const BoundReport br = bound_check_residual(cs, *sc.checks.residual_c, sc.sim.dither.amplitude_norm(), cp.omega);
        rep.add("residual_bound_detail", br.detail);
        rep.check("residual_c", br.pass);
    }
    return rep;
}

Report certify_scenario(const Scenario& sc) {
    Report rep;
    add_common(rep, sc);
    const SimConfig& cfg = sc.sim;
    const Matrix& h = cfg.map.hessian();
    const Matrix& k = cfg.gain.matrix();
    const CertificateSet cert = build_certificate(h, k, sc.certificate_q, cfg.trigger.alpha, cfg.trigger.beta);
    const int n = cfg.map.dim();
    rep.add("n", static_cast<long long>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            rep.add(fmt::format("P_{}{}", i, j), cert.P(i, j));
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            rep.add(fmt::format("Q_{}{}", i, j), cert.Q(i, j));
        }
    }
    rep.add("lyapunov_residual", lyapunov_residual(h * k, cert.P, cert.Q));
    rep.add("lambda_min_P", cert.lambda_min_p);
    rep.add("lambda_max_P", cert.lambda_max_p);
    rep.add("lambda_min_Pbar", cert.lambda_min_pbar);
    rep.add("lambda_max_Pbar", cert.lambda_max_pbar);
    rep.add("hk_norm", cert.hk_norm);
    rep.add("alpha_tight", cert.alpha_tight);
    rep.add("beta_tight", cert.beta_tight);
    rep.add("alpha", cert.alpha);
    rep.add("beta", cert.beta);
    rep.add("sigma", cfg.trigger.sigma);

    const CommonPeriod cp = cfg.dither.common_period();
    const double a_norm = cfg.dither.amplitude_norm();
    rep.add("dither_period", cp.period);
    rep.add("dither_omega", cp.omega);
    rep.add("order_term_unit_constant", a_norm + 1.0 / cp.omega);

    const bool dynamic = is_dynamic(cfg.trigger.kind);
    Envelope env;
    DwellTime dwell;
    if (dynamic) {
        const Vector g0 = h * (cfg.theta_hat0 - cfg.map.optimizer());
        const double kappa = resolve_kappa(cert.P, g0, cfg.trigger.upsilon0, sc.kappa);
        rep.add("kappa", kappa);
        rep.add("kappa_source", std::string(sc.kappa ? "override" : "derived"));
        env = dynamic_envelope(cert, cfg.trigger.sigma, cfg.trigger.mu, kappa, cfg.theta_hat0, cfg.map.optimizer(),
                               a_norm, cp.omega);
        dwell = dwell_time_dynamic(cert, cfg.trigger.sigma, cfg.trigger.mu, cfg.trigger.gamma);
        rep.add("mu", cfg.trigger.mu);
        rep.add("gamma", cfg.trigger.gamma);
        rep.add("gamma_case_threshold", 2.0 * cert.hk_norm > cfg.trigger.mu
                                            ? 1.0 / (2.0 * cert.hk_norm - cfg.trigger.mu)
                                            : std::numeric_limits<double>::infinity());
    } else {
        env = static_envelope(cert, cfg.trigger.sigma, cfg.theta_hat0, cfg.map.optimizer(), a_norm, cp.omega);
        dwell = dwell_time_static(cert, cfg.trigger.sigma);
    }
    static const char* const kCases[] = {"static", "i", "ii", "iii"};
    rep.add("m", env.m);
    rep.add("M_theta", env.M_theta);
    rep.add("M_y", env.M_y);
    rep.add("tau_star", dwell.tau_star);
    rep.add("dwell_case", std::string(kCases[dwell.regime]));
    rep.add("b0", dwell.b0);
    rep.add("b1", dwell.b1);
    rep.add("b2", dwell.b2);
    rep.add("b3", dwell.b3);
    rep.check("alpha_admissible", cert.alpha <= cert.alpha_tight * (1.0 + 1e-12));
    rep.check("beta_admissible", cert.beta >= cert.beta_tight * (1.0 - 1e-12));
    rep.check("tau_star_positive", dwell.tau_star > 0.0);
    return rep;
}

Report sweep_scenario(const Scenario& sc, const std::string& out_dir, SweepResult* out_result) {
    if (!sc.campaign) {
        throw ConfigError("scenario has no campaign block (campaign.sigmas)");
    }
    Report rep;
    add_common(rep, sc);
    const Campaign& c = *sc.campaign;
    SweepResult result = sweep(c.sigmas, c.initial_conditions, sc.sim, c.jobs);
    rep.add("runs", result.total_runs);
    rep.add("diverged_runs", result.diverged_runs);
    rep.add("dt", result.dt);
    rep.add("grid_resolution", result.dt);
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        const std::string path = join_path(out_dir, sc.stats_file);
        write_file(path, [&](std::ostream& o) { write_stats_csv(o, result); });
        rep.add("stats_file", path);
    }
    rep.add("stats_rows", static_cast<long long>(result.rows.size()));
    for (const auto& row : result.rows) {
        const std::string prefix = fmt::format("sigma_{}_{}", format_number(row.sigma), to_string(row.kind));
        rep.add(prefix + "_mean", row.stats.mean);
        rep.add(prefix + "_n_intervals", row.stats.count);
    }
    // Rows come in (static, dynamic) pairs per sigma.
    double prev_static = -1.0;
    double prev_dynamic = -1.0;
    bool mono_static = true;
    bool mono_dynamic = true;
    for (std::size_t i = 0; i + 1 < result.rows.size(); i += 2) {
        const SweepRow& st = result.rows[i];
        const SweepRow& dy = result.rows[i + 1];
        const bool both = st.has_intervals && dy.has_intervals;
        rep.check(fmt::format("ordering_sigma_{}", format_number(st.sigma)), both && dy.stats.mean > st.stats.mean);
        if (both) {
            mono_static = mono_static && st.stats.mean > prev_static;
            mono_dynamic = mono_dynamic && dy.stats.mean > prev_dynamic;
            prev_static = st.stats.mean;
            prev_dynamic = dy.stats.mean;
        }
    }
    rep.check("monotone_static", mono_static);
    rep.check("monotone_dynamic", mono_dynamic);
    rep.check("no_divergence", result.diverged_runs == 0);
    if (out_result) {
        *out_result = std::move(result);
    }
    return rep;
}

Report validate_report(const Scenario& sc) {
    Report rep;
    add_common(rep, sc);
    const FrequencyReport fr = validate_frequencies(sc.sim.dither.ratios());
    rep.add("frequency_tuples_checked", fr.tuples_checked);
    rep.add("frequency_tuples_skipped", fr.tuples_skipped);
    const CommonPeriod cp = sc.sim.dither.common_period();
    rep.add("dither_period", cp.period);
    rep.add("dt", sc.sim.dt);
    rep.add("duration", sc.sim.duration);
    if (sc.campaign) {
        rep.add("campaign_sigmas", static_cast<long long>(sc.campaign->sigmas.size()));
        rep.add("campaign_initial_conditions", static_cast<long long>(sc.campaign->initial_conditions.size()));
        rep.add("campaign_runs",
                static_cast<long long>(2 * sc.campaign->sigmas.size() * sc.campaign->initial_conditions.size()));
    }
    rep.add("valid", std::string("true"));
    return rep;
}

}  // namespace etesc
