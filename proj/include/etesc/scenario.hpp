#pragma once

#include "etesc/sim_engine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace etesc {

/// Regression thresholds evaluated by `simulate`; unset entries are not checked.
struct Checks {
    double window = 30.0;       // final window length (s)
    double ball = 0.3;          // settling ball radius for theta_hat
    std::optional<double> theta_hat_tol;  // final-window mean |theta_hat - theta*|
    std::optional<double> y_tol;          // final-window mean |y - Q*|
    std::optional<double> residual_c;     // mean |y - Q*| <= c (a^2 + 1/omega^2)
    double max_events_window = 1.0;       // window for the event-burst report (s)
};

struct Campaign {
    std::vector<double> sigmas;
    std::vector<Vector> initial_conditions;
    int jobs = 1;
};

struct Scenario {
    std::string name;
    SimConfig sim;
    Matrix certificate_q;
    std::optional<double> kappa;
    Checks checks;
    std::optional<Campaign> campaign;
    std::string trajectory_file = "trajectory.csv";
    std::string events_file = "events.csv";
    std::string stats_file = "stats.csv";
    /// Informational messages produced while loading, e.g. step adjustments.
    std::vector<std::string> notes;
};

/// Command-line overrides applied before validation.
struct Overrides {
    std::optional<SimMode> mode;
    std::optional<TriggerKind> trigger;
    std::optional<int> jobs;
};

/// Parses the flat `key = value` format. Values are numbers, bare words, or
/// JSON arrays (vectors `[..]`, matrices `[[..],[..]]`); `#` starts a comment.
/// Every problem is collected and reported in one ConfigError, parse errors
/// with their line number and validation errors with their field path.
[[nodiscard]] Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>",
                                      const Overrides& overrides = {});

[[nodiscard]] Scenario load_scenario(const std::string& path, const Overrides& overrides = {});

/// Points [cx - r cos(2 pi i/N), cy - r sin(2 pi i/N)] for i = stride, 2 stride, ..., N.
[[nodiscard]] std::vector<Vector> circle_initial_conditions(const Vector& center, double radius, int points,
                                                            int stride);

}  // namespace etesc
