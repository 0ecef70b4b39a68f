#pragma once

#include "etesc/lyapunov.hpp"
#include "etesc/map_model.hpp"
#include "etesc/sim_engine.hpp"
#include "etesc/triggers.hpp"

#include <map>
#include <string>
#include <vector>

namespace etesc {

struct IntervalStats {
    long long count = 0;
    double mean = 0.0;
    double mean_deviation = 0.0;
    double variance = 0.0;
    double standard_deviation = 0.0;
    double min_interval = 0.0;
    double max_interval = 0.0;
};

/// Population statistics (divisor N) of a pool of intervals. Values are sorted
/// before summation so the result does not depend on input order.
/// Throws AnalysisError on an empty pool.
[[nodiscard]] IntervalStats interval_stats(std::vector<double> intervals);

/// Pools the inter-event intervals of every log.
[[nodiscard]] IntervalStats interval_stats(const std::vector<EventLog>& logs);

/// Exact pool of intervals measured in integration steps. Merging is
/// commutative, so sweep results do not depend on completion order.
class IntervalHistogram {
public:
    void add(const EventLog& log);
    void add_steps(long long steps, long long count = 1);
    void merge(const IntervalHistogram& other);

    [[nodiscard]] long long count() const noexcept { return total_; }
    [[nodiscard]] const std::map<long long, long long>& bins() const noexcept { return bins_; }

    /// Statistics with each interval equal to steps * dt.
    [[nodiscard]] IntervalStats stats(double dt) const;

private:
    std::map<long long, long long> bins_;
    long long total_ = 0;
};

struct ConvergenceSummary {
    double window_start = 0.0;
    double theta_hat_err_mean = 0.0;
    double theta_hat_err_max = 0.0;
    double theta_err_mean = 0.0;
    double theta_err_max = 0.0;
    double y_err_mean = 0.0;
    double y_err_max = 0.0;
    /// First time after which |theta_hat - theta*| stays within the ball; < 0 if never.
    double settling_time = -1.0;
    /// Fitted exponential decay rate of the |G_held| envelope; NaN if not fittable.
    double decay_rate = 0.0;
};

/// Final-window error statistics, settling time and envelope decay rate.
/// Throws AnalysisError on an empty trajectory.
[[nodiscard]] ConvergenceSummary convergence_metrics(const Trajectory& traj, const QuadraticMap& map,
                                                     double window = 30.0, double ball_radius = 0.3,
                                                     int fit_windows = 20);

/// Least-squares rate r of values ~ c*exp(-r t), using the maximum of each of
/// n_windows equal time windows. Non-positive maxima are skipped.
[[nodiscard]] double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                                    int n_windows);

struct BoundReport {
    bool pass = true;
    long long checked = 0;
    double worst_ratio = 0.0;  // observed / bound, maximized
    double worst_time = 0.0;
    std::string detail;
};

/// |G_av(t)| <= sqrt((1+kappa) lambda_max(P)/lambda_min(P)) |G_av(0)| exp(-m t) (1+slack).
[[nodiscard]] BoundReport bound_check_average(const Trajectory& traj, const CertificateSet& cert, double m,
                                              double kappa = 0.0, double slack = 0.05);

/// Final-window mean |y - Q*| <= c (a^2 + 1/omega^2).
[[nodiscard]] BoundReport bound_check_residual(const ConvergenceSummary& summary, double c, double a_norm,
                                               double omega);

/// V(t_{k+1}) <= V(t_k) exp(-rate (t_{k+1} - t_k)) (1 + rel_slack) over all
/// consecutive event pairs, V = v_av (+ upsilon when include_upsilon). The
/// trajectory must contain a record at every event step.
[[nodiscard]] BoundReport decay_check(const Trajectory& traj, const EventLog& events, int decimation, double rate,
                                      bool include_upsilon, double rel_slack = 1e-6);

/// Largest number of events inside any window of the given length.
[[nodiscard]] long long max_events_in_window(const EventLog& events, double window);

struct SweepRow {
    double sigma = 0.0;
    TriggerKind kind = TriggerKind::Static;
    IntervalStats stats;
    long long runs = 0;
    long long diverged = 0;
    double tau_star_theory = 0.0;
    bool has_intervals = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by sigma, then static before dynamic
    long long total_runs = 0;
    long long diverged_runs = 0;
    double dt = 0.0;
};

/// Full factorial sigma x initial condition x {static, dynamic}. The base
/// configuration supplies everything else, including mu and gamma. Runs
/// execute on up to `jobs` threads; diverged runs are excluded and counted.
[[nodiscard]] SweepResult sweep(const std::vector<double>& sigmas, const std::vector<Vector>& initial_conditions,
                                const SimConfig& base, int jobs = 1);

}  // namespace etesc
