#pragma once

#include "etesc/analysis.hpp"
#include "etesc/sim_engine.hpp"
#include "etesc/triggers.hpp"

#include <fstream>
#include <ostream>
#include <string>

namespace etesc {

/// t, theta_hat_i, theta_i, y, g_hat_i, g_held_i, u_i, xi, upsilon (+ v_av in average mode).
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// k, t_k, interval, xi_at_fire, upsilon_at_fire. The interval of k = 0 is 0.
void write_event_csv(std::ostream& out, const EventLog& events);

/// sigma, kind, n_intervals, mean, mean_deviation, variance, std_deviation, min_interval, tau_star_theory.
void write_stats_csv(std::ostream& out, const SweepResult& result);

void write_text_file(const std::string& path, const std::string& content);

[[nodiscard]] std::string format_number(double v);

/// Opens path for writing and hands the stream to writer. Throws ConfigError on I/O failure.
template <typename Writer>
void write_file(const std::string& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot open '" + path + "' for writing");
    }
    writer(out);
    out.flush();
    if (!out) {
        throw ConfigError("failed writing '" + path + "'");
    }
}

}  // namespace etesc
