#pragma once

#include "etesc/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace etesc {

enum class TriggerKind { Static, Dynamic, PeriodicStatic, PeriodicDynamic, Continuous };

[[nodiscard]] std::string_view to_string(TriggerKind kind) noexcept;
/// Accepts static, dynamic, periodic-static, periodic-dynamic, continuous.
[[nodiscard]] TriggerKind parse_trigger_kind(std::string_view name);

[[nodiscard]] constexpr bool is_dynamic(TriggerKind k) noexcept {
    return k == TriggerKind::Dynamic || k == TriggerKind::PeriodicDynamic;
}
[[nodiscard]] constexpr bool is_periodic(TriggerKind k) noexcept {
    return k == TriggerKind::PeriodicStatic || k == TriggerKind::PeriodicDynamic;
}

struct TriggerConfig {
    TriggerKind kind = TriggerKind::Static;
    double sigma = 0.5;
    double alpha = 1.0;
    double beta = 1.0;
    double mu = 0.0;
    double gamma = 0.0;
    double upsilon0 = 0.0;
    double h = 0.0;

    /// Every range violation, each prefixed with its field name. Empty when valid.
    [[nodiscard]] std::vector<std::string> problems() const;
    /// Throws ConfigError listing all problems.
    void validate() const;
};

/// sigma*alpha*|G|^2 - beta*|e|*|G|.
[[nodiscard]] double xi(const TriggerConfig& cfg, const Vector& g_hat, const Vector& e);
[[nodiscard]] double xi_from_norms(const TriggerConfig& cfg, double g_norm, double e_norm) noexcept;

[[nodiscard]] bool static_should_fire(const TriggerConfig& cfg, const Vector& g_hat, const Vector& e);

/// d(upsilon)/dt = -mu*upsilon + xi.
[[nodiscard]] double upsilon_derivative(const TriggerConfig& cfg, double upsilon, double xi_value) noexcept;

[[nodiscard]] bool dynamic_should_fire(const TriggerConfig& cfg, double upsilon, const Vector& g_hat,
                                       const Vector& e);
[[nodiscard]] bool dynamic_condition(const TriggerConfig& cfg, double upsilon, double xi_value) noexcept;

/// Decision at a sampling instant t = k*h. e is measured against the most
/// recently transmitted value. Transmits when the static (or dynamic, using
/// upsilon) condition is violated. Throws std::logic_error off the sampling grid.
[[nodiscard]] bool periodic_should_fire(const TriggerConfig& cfg, double t, const Vector& g_hat_sample,
                                        const Vector& g_hat_transmitted, double upsilon = 0.0);

/// Event instants with the trigger quantities at each firing. Entry 0 is t0.
class EventLog {
public:
    /// Throws std::logic_error unless t is strictly after the last event.
    void append(double t, long long step, double xi_value, double upsilon);

    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] bool empty() const noexcept { return times_.empty(); }
    [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
    [[nodiscard]] const std::vector<long long>& steps() const noexcept { return steps_; }
    [[nodiscard]] const std::vector<double>& xi_at_fire() const noexcept { return xi_; }
    [[nodiscard]] const std::vector<double>& upsilon_at_fire() const noexcept { return upsilon_; }

    /// t_{k+1} - t_k for every consecutive pair.
    [[nodiscard]] std::vector<double> intervals() const;

private:
    std::vector<double> times_;
    std::vector<long long> steps_;
    std::vector<double> xi_;
    std::vector<double> upsilon_;
};

}  // namespace etesc
