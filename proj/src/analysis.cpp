#include "etesc/analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace etesc {

namespace {

template <typename ForEach>
IntervalStats stats_from(long long count, ForEach&& for_each) {
    if (count == 0) {
        throw AnalysisError("interval statistics need at least one interval");
    }
    IntervalStats s;
    s.count = count;
    const auto n = static_cast<double>(count);
    double sum = 0.0;
    s.min_interval = std::numeric_limits<double>::infinity();
    s.max_interval = -std::numeric_limits<double>::infinity();
    for_each([&](double x, long long c) {
        sum += x * static_cast<double>(c);
        s.min_interval = std::min(s.min_interval, x);
        s.max_interval = std::max(s.max_interval, x);
    });
    s.mean = sum / n;
    double abs_dev = 0.0;
    double sq_dev = 0.0;
    for_each([&](double x, long long c) {
        const double d = x - s.mean;
        abs_dev += std::fabs(d) * static_cast<double>(c);
        sq_dev += d * d * static_cast<double>(c);
    });
    s.mean_deviation = abs_dev / n;
    s.variance = sq_dev / n;
    s.standard_deviation = std::sqrt(s.variance);
    return s;
}

}  // namespace

IntervalStats interval_stats(std::vector<double> intervals) {
    std::sort(intervals.begin(), intervals.end());
    return stats_from(static_cast<long long>(intervals.size()), [&](auto&& visit) {
        for (double x : intervals) {
            visit(x, 1);
        }
    });
}

IntervalStats interval_stats(const std::vector<EventLog>& logs) {
    std::vector<double> pool;
    for (const auto& log : logs) {
        const auto iv = log.intervals();
        pool.insert(pool.end(), iv.begin(), iv.end());
    }
    return interval_stats(std::move(pool));
}

void IntervalHistogram::add(const EventLog& log) {
    const auto& steps = log.steps();
    for (std::size_t i = 1; i < steps.size(); ++i) {
        add_steps(steps[i] - steps[i - 1]);
    }
}

void IntervalHistogram::add_steps(long long steps, long long count) {
    bins_[steps] += count;
    total_ += count;
}

void IntervalHistogram::merge(const IntervalHistogram& other) {
    for (const auto& [steps, count] : other.bins_) {
        add_steps(steps, count);
    }
}

IntervalStats IntervalHistogram::stats(double dt) const {
    return stats_from(total_, [&](auto&& visit) {
        for (const auto& [steps, count] : bins_) {
            visit(static_cast<double>(steps) * dt, count);
        }
    });
}

double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values, int n_windows) {
    if (times.size() != values.size() || times.size() < 2 || n_windows < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double t0 = times.front();
    const double span = times.back() - t0;
    if (!(span > 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::vector<double> peak_t;
    std::vector<double> peak_log;
    std::size_t idx = 0;
    for (int w = 0; w < n_windows; ++w) {
        const double end = t0 + span * (w + 1) / n_windows;
        double best = 0.0;
        double best_t = 0.0;
        bool any = false;
        while (idx < times.size() && (times[idx] < end || w == n_windows - 1)) {
            if (!any || values[idx] > best) {
                best = values[idx];
                best_t = times[idx];
                any = true;
            }
            ++idx;
        }
        if (any && best > 0.0 && std::isfinite(best)) {
            peak_t.push_back(best_t);
            peak_log.push_back(std::log(best));
        }
    }
    if (peak_t.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const auto m = static_cast<double>(peak_t.size());
    double st = 0.0;
    double sl = 0.0;
    for (std::size_t i = 0; i < peak_t.size(); ++i) {
        st += peak_t[i];
        sl += peak_log[i];
    }
    const double mt = st / m;
    const double ml = sl / m;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < peak_t.size(); ++i) {
        num += (peak_t[i] - mt) * (peak_log[i] - ml);
        den += (peak_t[i] - mt) * (peak_t[i] - mt);
    }
    if (!(den > 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return -num / den;
}

ConvergenceSummary convergence_metrics(const Trajectory& traj, const QuadraticMap& map, double window,
                                       double ball_radius, int fit_windows) {
    if (traj.empty()) {
        throw AnalysisError("convergence metrics need a nonempty trajectory");
    }
    ConvergenceSummary s;
    const std::size_t rows = traj.size();
    const double t_end = traj.t(rows - 1);
    s.window_start = std::max(traj.t(0), t_end - window);
    const Eigen::VectorXd theta_star = map.optimizer();
    long long in_window = 0;
    double last_outside = -1.0;
    bool ever_outside = false;
    std::vector<double> times;
    std::vector<double> held;
    times.reserve(rows);
    held.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const double t = traj.t(r);
        const double th_err = (traj.theta_hat(r) - theta_star).norm();
        if (th_err > ball_radius) {
            ever_outside = true;
            last_outside = t;
        }
        times.push_back(t);
        held.push_back(traj.g_held(r).norm());
        if (t >= s.window_start) {
            const double theta_err = (traj.theta(r) - theta_star).norm();
            const double y_err = std::fabs(traj.y(r) - map.extremum());
            s.theta_hat_err_mean += th_err;
            s.theta_err_mean += theta_err;
            s.y_err_mean += y_err;
            s.theta_hat_err_max = std::max(s.theta_hat_err_max, th_err);
            s.theta_err_max = std::max(s.theta_err_max, theta_err);
            s.y_err_max = std::max(s.y_err_max, y_err);
            ++in_window;
        }
    }
    const auto n = static_cast<double>(std::max<long long>(in_window, 1));
    s.theta_hat_err_mean /= n;
    s.theta_err_mean /= n;
    s.y_err_mean /= n;
    if (!ever_outside) {
        s.settling_time = traj.t(0);
    } else if (last_outside < t_end) {
        // The first record after the last excursion.
        for (std::size_t r = 0; r < rows; ++r) {
            if (traj.t(r) > last_outside) {
                s.settling_time = traj.t(r);
                break;
            }
        }
    }
    s.decay_rate = fit_decay_rate(times, held, fit_windows);
    return s;
}

BoundReport bound_check_average(const Trajectory& traj, const CertificateSet& cert, double m, double kappa,
                                double slack) {
    BoundReport rep;
    if (traj.empty()) {
        rep.detail = "empty trajectory";
        return rep;
    }
    const double g0 = traj.g_hat(0).norm();
    const double scale = std::sqrt((1.0 + kappa) * cert.lambda_max_p / cert.lambda_min_p) * g0 * (1.0 + slack);
    for (std::size_t r = 0; r < traj.size(); ++r) {
        const double t = traj.t(r);
        const double bound = scale * std::exp(-m * t);
        const double g = traj.g_hat(r).norm();
        ++rep.checked;
        const double ratio = bound > 0.0 ? g / bound : (g > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst_time = t;
        }
        if (g > bound) {
            rep.pass = false;
        }
    }
    rep.detail = fmt::format("envelope m={:.6g} slack={:.3g} worst_ratio={:.6g} at t={:.6g}", m, slack,
                             rep.worst_ratio, rep.worst_time);
    return rep;
}

BoundReport bound_check_residual(const ConvergenceSummary& summary, double c, double a_norm, double omega) {
    BoundReport rep;
    const double bound = c * (a_norm * a_norm + 1.0 / (omega * omega));
    rep.checked = 1;
    rep.worst_ratio = bound > 0.0 ? summary.y_err_mean / bound : std::numeric_limits<double>::infinity();
    rep.worst_time = summary.window_start;
    rep.pass = summary.y_err_mean <= bound;
    rep.detail = fmt::format("window mean |y-Q*|={:.6g} bound={:.6g}", summary.y_err_mean, bound);
    return rep;
}

BoundReport decay_check(const Trajectory& traj, const EventLog& events, int decimation, double rate,
                        bool include_upsilon, double rel_slack) {
    BoundReport rep;
    auto value_at = [&](long long step, double& v) {
        if (step % decimation != 0) {
            return false;
        }
        const auto row = static_cast<std::size_t>(step / decimation);
        if (row >= traj.size()) {
            return false;
        }
        v = traj.v_av(row) + (include_upsilon ? traj.upsilon(row) : 0.0);
        return true;
    };
    const auto& steps = events.steps();
    const auto& times = events.times();
    for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
        double v0 = 0.0;
        double v1 = 0.0;
        if (!value_at(steps[k], v0) || !value_at(steps[k + 1], v1)) {
            continue;
        }
        const double bound = v0 * std::exp(-rate * (times[k + 1] - times[k])) * (1.0 + rel_slack);
        ++rep.checked;
        const double ratio = bound > 0.0 ? v1 / bound : (v1 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst_time = times[k + 1];
        }
        if (v1 > bound) {
            rep.pass = false;
        }
    }
    rep.detail = fmt::format("pairs={} worst_ratio={:.9g} at t={:.6g}", rep.checked, rep.worst_ratio, rep.worst_time);
    return rep;
}

long long max_events_in_window(const EventLog& events, double window) {
    const auto& t = events.times();
    long long best = 0;
    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < t.size(); ++hi) {
        while (t[hi] - t[lo] >= window) {
            ++lo;
        }
        best = std::max(best, static_cast<long long>(hi - lo + 1));
    }
    return best;
}

SweepResult sweep(const std::vector<double>& sigmas, const std::vector<Vector>& initial_conditions,
                  const SimConfig& base, int jobs) {
    if (sigmas.empty() || initial_conditions.empty()) {
        throw ConfigError("sweep needs at least one sigma and one initial condition");
    }
    const TriggerKind kinds[2] = {TriggerKind::Static, TriggerKind::Dynamic};
    struct Job {
        std::size_t row;
        SimConfig cfg;
    };
    std::vector<Job> work;
    std::vector<SweepRow> rows;
    for (double sigma : sigmas) {
        for (TriggerKind kind : kinds) {
            SweepRow row;
            row.sigma = sigma;
            row.kind = kind;
            try {
                const CertificateSet cert = build_certificate(base.map.hessian(), base.gain.matrix(), base.lyapunov_q,
                                                              base.trigger.alpha, base.trigger.beta);
                row.tau_star_theory = kind == TriggerKind::Static
                                          ? dwell_time_static(cert, sigma).tau_star
                                          : dwell_time_dynamic(cert, sigma, base.trigger.mu, base.trigger.gamma).tau_star;
            } catch (const std::exception&) {
                row.tau_star_theory = std::numeric_limits<double>::quiet_NaN();
            }
            for (const Vector& ic : initial_conditions) {
                SimConfig cfg = base;
                cfg.trigger.kind = kind;
                cfg.trigger.sigma = sigma;
                cfg.theta_hat0 = ic;
                cfg.validate();
                work.push_back({rows.size(), std::move(cfg)});
            }
            rows.push_back(row);
        }
    }

    struct Outcome {
        IntervalHistogram hist;
        bool diverged = false;
    };
    std::vector<Outcome> outcomes(work.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        RunOptions opts;
        opts.keep_trajectory = false;
        for (std::size_t i = next.fetch_add(1); i < work.size(); i = next.fetch_add(1)) {
            try {
                const RunResult res = run(work[i].cfg, opts);
                outcomes[i].hist.add(res.events);
            } catch (const DivergenceError&) {
                outcomes[i].diverged = true;
            }
        }
    };
    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(work.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    SweepResult result;
    result.dt = base.dt;
    std::vector<IntervalHistogram> pooled(rows.size());
    for (std::size_t i = 0; i < work.size(); ++i) {
        SweepRow& row = rows[work[i].row];
        ++row.runs;
        ++result.total_runs;
        if (outcomes[i].diverged) {
            ++row.diverged;
            ++result.diverged_runs;
            continue;
        }
        pooled[work[i].row].merge(outcomes[i].hist);
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (pooled[r].count() > 0) {
            rows[r].stats = pooled[r].stats(base.dt);
            rows[r].has_intervals = true;
        }
    }
    result.rows = std::move(rows);
    return result;
}

}  // namespace etesc
