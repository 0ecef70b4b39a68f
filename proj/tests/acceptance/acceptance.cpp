#include "etesc/analysis.hpp"
#include "etesc/csv_io.hpp"
#include "etesc/linalg.hpp"
#include "etesc/lyapunov.hpp"
#include "etesc/scenario.hpp"
#include "etesc/sim_engine.hpp"
#include "etesc/workflows.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace etesc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Context {
    std::string scenario_dir;
    std::string work_dir;
};

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Scenario bundled(const Context& ctx, const std::string& name, const Overrides& ov = {}) {
    return load_scenario(ctx.scenario_dir + "/" + name, ov);
}

Matrix random_spd(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.2, 5.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = g(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr{a};
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) {
        d(i) = u(rng);
    }
    return Matrix(q * d.asDiagonal() * q.transpose());
}

// 1. Lyapunov certificates for random Hurwitz H*K and the two-parameter loop.
Outcome certificate_correctness(const Context& ctx) {
    Stopwatch sw;
    std::mt19937_64 rng(20240601);
    std::vector<std::pair<Matrix, Matrix>> cases;
    for (int i = 0; i < 50; ++i) {
        const int n = 1 + i % 5;
        cases.emplace_back(random_spd(n, rng), Matrix(-random_spd(n, rng)));
    }
    const Scenario sc = bundled(ctx, "paper_sec7_static.cfg");
    cases.emplace_back(sc.sim.map.hessian(), sc.sim.gain.matrix());
    double worst = 0.0;
    int failures = 0;
    for (const auto& [h, k] : cases) {
        const Matrix a = h * k;
        const Matrix q = Matrix::Identity(a.rows(), a.cols());
        try {
            const Matrix p = solve_lyapunov(a, q);
            const double rel = lyapunov_residual(a, p, q) / linalg::induced_norm(q);
            worst = std::max(worst, rel);
            if (rel > 1e-10 || !(linalg::symmetric_eigenvalues(linalg::symmetrized(p)).minCoeff() > 0.0)) {
                ++failures;
            }
        } catch (const std::exception&) {
            ++failures;
        }
    }
    const double elapsed = sw.seconds();
    return {failures == 0 && elapsed < 1.0,
            fmt::format("{} instances, worst residual/|Q| = {:.3g} (tol 1e-10), failures {}, {:.3f} s (limit 1 s)",
                        cases.size(), worst, failures, elapsed)};
}

// 2. One-period average of M(t) Q(theta_hat + S(t)) against H*(theta_hat - theta*).
Outcome averaging_oracle(const Context& ctx) {
    Stopwatch sw;
    const Scenario sc = bundled(ctx, "paper_sec7_static.cfg");
    const QuadraticMap& map = sc.sim.map;
    const DitherSpec& d = sc.sim.dither;
    const double T = d.common_period().period;
    const int panels = 8192;
    auto average = [&](const Vector& th) {
        Vector acc = Vector::Zero(map.dim());
        for (int i = 0; i < panels; ++i) {
            const double t = T * i / panels;
            acc += gradient_estimate(d, map.evaluate(th + d.s_vector(t)), t);
        }
        return Vector(acc / panels);
    };
    double worst_rel = 0.0;
    double worst_lin = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double ang = 2.0 * std::numbers::pi * k / 10.0;
        Vector dev(2);
        dev << 0.1 * std::cos(ang), 0.1 * std::sin(ang);
        const Vector truth = map.hessian() * dev;
        const Vector plus = average(map.optimizer() + dev);
        const Vector minus = average(map.optimizer() - dev);
        worst_rel = std::max(worst_rel, (plus - truth).norm() / truth.norm());
        worst_lin = std::max(worst_lin, (0.5 * (plus - minus) - truth).norm() / truth.norm());
    }
    const double elapsed = sw.seconds();
    return {worst_rel <= 0.10 && worst_lin <= 1e-8 && elapsed < 5.0,
            fmt::format("10 points at |dev| = 0.1: worst relative error {:.3g} (tol 0.10), linear part {:.3g} "
                        "(tol 1e-8), {:.2f} s (limit 5 s)",
                        worst_rel, worst_lin, elapsed)};
}

struct SingleRun {
    Scenario scenario;
    RunResult result;
    ConvergenceSummary summary;
    double seconds = 0.0;
};

// 3. 300 s static and dynamic runs from theta_hat(0) = [2.5, 6].
Outcome single_run_convergence(const Context& ctx, std::vector<SingleRun>& runs) {
    std::vector<std::string> parts;
    bool pass = true;
    for (const char* name : {"paper_sec7_static.cfg", "paper_sec7_dynamic.cfg"}) {
        SingleRun r{bundled(ctx, name), {}, {}, 0.0};
        Stopwatch sw;
        r.result = run(r.scenario.sim);
        r.seconds = sw.seconds();
        r.summary = convergence_metrics(r.result.trajectory, r.scenario.sim.map, 30.0);
        const bool ok = r.summary.theta_hat_err_mean <= 0.3 && r.summary.y_err_mean <= 2.0 && r.seconds < 10.0;
        pass = pass && ok;
        parts.push_back(fmt::format("{}: |th-th*| {:.3g} (tol 0.3), |y-Q*| {:.3g} (tol 2), {} events, {:.1f} s",
                                    to_string(r.scenario.sim.trigger.kind), r.summary.theta_hat_err_mean,
                                    r.summary.y_err_mean, r.result.events.size(), r.seconds));
        runs.push_back(std::move(r));
    }
    return {pass, fmt::format("{}; {}", parts[0], parts[1])};
}

// 4. Trigger invariants over 100 randomized short runs.
Outcome trigger_invariants(const Context& ctx) {
    const Scenario base = bundled(ctx, "paper_sec7_static.cfg");
    std::mt19937_64 rng(4444);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long long static_viol = 0;
    long long stale = 0;
    long long neg_upsilon = 0;
    long long implication = 0;
    long long off_grid = 0;
    long long steps = 0;
    double min_upsilon_avg = 0.0;
    double min_upsilon_full = 0.0;
    int dynamic_avg_runs = 0;
    const TriggerKind kinds[] = {TriggerKind::Static, TriggerKind::Dynamic, TriggerKind::PeriodicStatic,
                                 TriggerKind::PeriodicDynamic};
    for (int trial = 0; trial < 100; ++trial) {
        SimConfig cfg = base.sim;
        const TriggerKind kind = kinds[trial % 4];
        cfg.trigger.kind = kind;
        cfg.trigger.sigma = 0.05 + 0.9 * u(rng);
        cfg.trigger.beta = 1.1 + 3.0 * u(rng);
        cfg.trigger.mu = 0.1 + u(rng);
        cfg.trigger.gamma = 0.01 + 0.1 * u(rng);
        cfg.trigger.upsilon0 = u(rng) < 0.5 ? 0.0 : u(rng);
        cfg.trigger.h = 1e-3 * (1 + static_cast<int>(3 * u(rng)));
        const double ang = 2.0 * std::numbers::pi * u(rng);
        cfg.theta_hat0 = cfg.map.optimizer();
        cfg.theta_hat0(0) += 2.0 * std::cos(ang);
        cfg.theta_hat0(1) += 2.0 * std::sin(ang);
        cfg.duration = 2.0;
        cfg.dt = default_dt(cfg.dither);
        // Positivity of upsilon is a property of the averaged loop; alternate
        // dynamic runs between the averaged and the dithered loop.
        const bool average = kind == TriggerKind::Dynamic && (trial / 4) % 2 == 1;
        if (average) {
            cfg.mode = SimMode::Average;
            ++dynamic_avg_runs;
        }
        if (is_periodic(kind)) {
            cfg.dt = align_dt_to_period(cfg.dt, cfg.trigger.h);
        }
        RunOptions opts{false, [&](const StepInfo& s) {
                            ++steps;
                            if (kind == TriggerKind::Static) {
                                if (!s.fired && s.xi_before < 0.0) {
                                    ++static_viol;
                                }
                                if (s.fired && (*s.g_held - *s.g_hat).norm() != 0.0) {
                                    ++stale;
                                }
                            }
                            if (kind == TriggerKind::Dynamic) {
                                if (average) {
                                    min_upsilon_avg = std::min(min_upsilon_avg, s.upsilon);
                                    if (s.upsilon < -1e-9) {
                                        ++neg_upsilon;
                                    }
                                } else {
                                    min_upsilon_full = std::min(min_upsilon_full, s.upsilon);
                                }
                                if (s.fired && s.step > 0 && !(s.xi_before < 0.0)) {
                                    ++implication;
                                }
                            }
                        }};
        const RunResult r = run(cfg, opts);
        if (is_periodic(kind)) {
            for (double t : r.events.times()) {
                const double k = t / cfg.trigger.h;
                if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) {
                    ++off_grid;
                }
            }
        }
    }
    const bool pass = static_viol == 0 && stale == 0 && neg_upsilon == 0 && implication == 0 && off_grid == 0;
    return {pass, fmt::format("100 runs, {} steps: static Xi<0 without event {} (tol_fire 0), e!=0 after event {}, "
                              "min upsilon averaged loop {:.3g} over {} runs (tol -1e-9), dithered loop {:.3g} "
                              "(reported), dynamic fire without Xi<0 {}, off-grid PETC events {}",
                              steps, static_viol, stale, min_upsilon_avg, dynamic_avg_runs, min_upsilon_full,
                              implication, off_grid)};
}

// 5. Dwell time: average-mode minimum interval against tau*, full-mode grid bound.
Outcome dwell_time(const Context& ctx, const std::vector<SingleRun>& runs) {
    bool pass = true;
    std::vector<std::string> parts;
    for (const char* name : {"paper_sec7_static.cfg", "paper_sec7_dynamic.cfg"}) {
        const Scenario sc = bundled(ctx, name, Overrides{SimMode::Average, std::nullopt, std::nullopt});
        SimConfig cfg = sc.sim;
        cfg.duration = 30.0;
        const CertificateSet cert = build_certificate(cfg.map.hessian(), cfg.gain.matrix(), sc.certificate_q,
                                                      cfg.trigger.alpha, cfg.trigger.beta);
        const bool dyn = is_dynamic(cfg.trigger.kind);
        const DwellTime dw = dyn ? dwell_time_dynamic(cert, cfg.trigger.sigma, cfg.trigger.mu, cfg.trigger.gamma)
                                 : dwell_time_static(cert, cfg.trigger.sigma);
        const RunResult r = run(cfg, RunOptions{false, {}});
        const auto iv = r.events.intervals();
        const double min_iv = iv.empty() ? std::numeric_limits<double>::infinity() : interval_stats(iv).min_interval;
        const bool ok = !iv.empty() && min_iv >= dw.tau_star - cfg.dt;
        pass = pass && ok;
        parts.push_back(fmt::format("average {}: min interval {:.6g} s vs tau* {:.6g} s - dt {:.3g} ({} events)",
                                    to_string(cfg.trigger.kind), min_iv, dw.tau_star, cfg.dt, r.events.size()));
    }
    for (const auto& r : runs) {
        const auto iv = r.result.events.intervals();
        const double min_iv = iv.empty() ? 0.0 : interval_stats(iv).min_interval;
        const bool ok = iv.empty() || min_iv >= r.result.dt * (1.0 - 1e-9);
        pass = pass && ok;
        parts.push_back(fmt::format("full {}: min interval {:.6g} s >= dt {:.3g}, max events in 1 s window {}",
                                    to_string(r.scenario.sim.trigger.kind), min_iv, r.result.dt,
                                    max_events_in_window(r.result.events, 1.0)));
    }
    std::string detail;
    for (const auto& p : parts) {
        detail += (detail.empty() ? "" : "; ") + p;
    }
    return {pass, detail};
}

// 6. Lyapunov decay between consecutive events in average mode.
Outcome lyapunov_decay(const Context& ctx) {
    bool pass = true;
    std::vector<std::string> parts;
    for (const char* name : {"paper_sec7_static.cfg", "paper_sec7_dynamic.cfg"}) {
        const Scenario sc = bundled(ctx, name, Overrides{SimMode::Average, std::nullopt, std::nullopt});
        SimConfig cfg = sc.sim;
        cfg.duration = 30.0;
        cfg.dt = 1e-4;
        cfg.decimation = 1;
        cfg.lyapunov_q = sc.certificate_q;
        const CertificateSet cert = build_certificate(cfg.map.hessian(), cfg.gain.matrix(), sc.certificate_q,
                                                      cfg.trigger.alpha, cfg.trigger.beta);
        const bool dyn = is_dynamic(cfg.trigger.kind);
        const double static_rate = cert.alpha * (1.0 - cfg.trigger.sigma) / cert.lambda_max_p;
        const double rate = dyn ? std::min(static_rate, cfg.trigger.mu) : static_rate;
        const RunResult r = run(cfg);
        const BoundReport rep = decay_check(r.trajectory, r.events, cfg.decimation, rate, dyn);
        pass = pass && rep.pass && rep.checked > 0;
        parts.push_back(fmt::format("{} ({}rate {:.6g}): {}", to_string(cfg.trigger.kind), dyn ? "V+upsilon, " : "V, ",
                                    rate, rep.detail));
    }
    return {pass, fmt::format("{}; {}", parts[0], parts[1])};
}

// 7. Desk campaign: dynamic mean exceeds static per sigma, means increase with sigma.
Outcome table_trend(const Context& ctx, std::string& stats_csv) {
    Stopwatch sw;
    const Scenario sc = bundled(ctx, "campaign_table1_desk.cfg");
    SweepResult result;
    const Report rep = sweep_scenario(sc, ctx.work_dir + "/campaign_a", &result);
    const double elapsed = sw.seconds();
    std::ostringstream csv;
    write_stats_csv(csv, result);
    stats_csv = csv.str();
    std::string rows;
    for (const auto& row : result.rows) {
        rows += fmt::format(" [{} {}: {:.5g}]", format_number(row.sigma), to_string(row.kind), row.stats.mean);
    }
    const bool pass = rep.ok() && elapsed < 600.0 && result.total_runs == 120;
    std::string failed;
    for (const auto& f : rep.failed_checks) {
        failed += " " + f;
    }
    return {pass, fmt::format("{} runs, {} diverged, {:.0f} s (limit 600 s), means{}{}", result.total_runs,
                              result.diverged_runs, elapsed, rows, failed.empty() ? "" : "; failed:" + failed)};
}

// 8. Full versus average trajectories as the dither frequency doubles.
Outcome averaging_trend(const Context& ctx) {
    const Scenario sc = bundled(ctx, "paper_sec7_static.cfg");
    std::vector<double> gaps;
    std::string detail;
    for (int level = 0; level < 4; ++level) {
        const double base = sc.sim.dither.base_freq() * std::pow(2.0, level);
        SimConfig full = sc.sim;
        full.dither = DitherSpec(sc.sim.dither.amplitudes(), sc.sim.dither.ratios(), base);
        full.trigger.kind = TriggerKind::Continuous;
        full.frontend = FrontEnd{5.0, 0.0};
        full.duration = 5.0;
        full.dt = default_dt(full.dither);
        full.decimation = std::max(1, static_cast<int>(std::lround(1e-3 / full.dt)));
        SimConfig avg = full;
        avg.mode = SimMode::Average;
        const RunResult rf = run(full);
        const RunResult ra = run(avg);
        double gap = 0.0;
        const std::size_t rows = std::min(rf.trajectory.size(), ra.trajectory.size());
        for (std::size_t i = 0; i < rows; ++i) {
            gap = std::max(gap, (rf.trajectory.theta_hat(i) - ra.trajectory.theta_hat(i)).norm());
        }
        gaps.push_back(gap);
        detail += fmt::format("{}base {:g}: {:.4g}", detail.empty() ? "" : ", ", base, gap);
    }
    bool pass = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        pass = pass && gaps[i] < gaps[i - 1];
    }
    return {pass, "sup |th_full - th_avg| over 5 s: " + detail};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 9. Byte-identical outputs on repeated execution.
Outcome determinism(const Context& ctx, const std::string& first_stats) {
    bool pass = true;
    std::string detail;
    for (const char* name : {"paper_sec7_static.cfg", "paper_sec7_dynamic.cfg", "paper_sec7_petc.cfg"}) {
        const Scenario sc = bundled(ctx, name);
        const fs::path a = fs::path(ctx.work_dir) / "det_a";
        const fs::path b = fs::path(ctx.work_dir) / "det_b";
        (void)simulate_scenario(sc, a.string());
        (void)simulate_scenario(sc, b.string());
        const bool same = slurp(a / sc.trajectory_file) == slurp(b / sc.trajectory_file) &&
                          slurp(a / sc.events_file) == slurp(b / sc.events_file) &&
                          !slurp(a / sc.events_file).empty();
        pass = pass && same;
        detail += fmt::format("{}{}: {}", detail.empty() ? "" : ", ", sc.name, same ? "identical" : "DIFFERENT");
    }
    const Scenario camp = bundled(ctx, "campaign_table1_desk.cfg");
    SweepResult again;
    (void)sweep_scenario(camp, ctx.work_dir + "/campaign_b", &again);
    std::ostringstream csv;
    write_stats_csv(csv, again);
    const bool same = !first_stats.empty() && csv.str() == first_stats &&
                      slurp(fs::path(ctx.work_dir) / "campaign_a" / camp.stats_file) ==
                          slurp(fs::path(ctx.work_dir) / "campaign_b" / camp.stats_file);
    pass = pass && same;
    detail += fmt::format(", {} stats: {}", camp.name, same ? "identical" : "DIFFERENT");
    return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    Context ctx{ETESC_SCENARIO_DIR, (fs::temp_directory_path() / "etesc_acceptance").string()};
    std::set<int> only;
    app.add_option("--scenario-dir", ctx.scenario_dir, "Directory of bundled scenarios");
    app.add_option("--work-dir", ctx.work_dir, "Scratch directory for CSV outputs");
    app.add_option("--only", only, "Run only these criteria");
    CLI11_PARSE(app, argc, argv);
    fs::create_directories(ctx.work_dir);

    const char* titles[] = {"",
                            "certificate correctness",
                            "averaging oracle",
                            "single-run convergence",
                            "trigger invariants",
                            "dwell time",
                            "Lyapunov decay",
                            "inter-event trend",
                            "averaging convergence trend",
                            "determinism"};
    std::vector<SingleRun> runs;
    std::string stats_csv;
    const std::vector<std::function<Outcome()>> criteria = {
        [&] { return certificate_correctness(ctx); },
        [&] { return averaging_oracle(ctx); },
        [&] { return single_run_convergence(ctx, runs); },
        [&] { return trigger_invariants(ctx); },
        [&] {
            if (runs.empty()) {
                std::vector<SingleRun> tmp;
                (void)single_run_convergence(ctx, tmp);
                runs = std::move(tmp);
            }
            return dwell_time(ctx, runs);
        },
        [&] { return lyapunov_decay(ctx); },
        [&] { return table_trend(ctx, stats_csv); },
        [&] { return averaging_trend(ctx); },
        [&] {
            if (stats_csv.empty()) {
                (void)table_trend(ctx, stats_csv);
            }
            return determinism(ctx, stats_csv);
        },
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && only.count(id) == 0) {
            continue;
        }
        Outcome o;
        Stopwatch sw;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        if (!o.pass) {
            ++failed;
        }
        std::cout << fmt::format("criterion {} {}: {} ({}) [{:.1f} s]", id, titles[id], o.pass ? "PASS" : "FAIL",
                                 o.detail, sw.seconds())
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
