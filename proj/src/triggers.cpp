#include "etesc/triggers.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace etesc {

std::string_view to_string(TriggerKind kind) noexcept {
    switch (kind) {
        case TriggerKind::Static: return "static";
        case TriggerKind::Dynamic: return "dynamic";
        case TriggerKind::PeriodicStatic: return "periodic-static";
        case TriggerKind::PeriodicDynamic: return "periodic-dynamic";
        case TriggerKind::Continuous: return "continuous";
    }
    return "unknown";
}

TriggerKind parse_trigger_kind(std::string_view name) {
    for (auto kind : {TriggerKind::Static, TriggerKind::Dynamic, TriggerKind::PeriodicStatic,
                      TriggerKind::PeriodicDynamic, TriggerKind::Continuous}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    throw ConfigError(fmt::format("unknown trigger kind '{}'", name));
}

std::vector<std::string> TriggerConfig::problems() const {
    std::vector<std::string> out;
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(sigma > 0.0 && sigma < 1.0)) {
        out.push_back(fmt::format("trigger.sigma: {} is outside (0,1)", sigma));
    }
    if (!(alpha > 0.0) || !finite(alpha)) {
        out.push_back(fmt::format("trigger.alpha: {} must be positive", alpha));
    }
    if (!(beta > 0.0) || !finite(beta)) {
        out.push_back(fmt::format("trigger.beta: {} must be positive", beta));
    }
    if (is_dynamic(kind)) {
        if (!(mu > 0.0) || !finite(mu)) {
            out.push_back(fmt::format("trigger.mu: {} must be positive for dynamic triggers", mu));
        }
        if (!(gamma > 0.0) || !finite(gamma)) {
            out.push_back(fmt::format("trigger.gamma: {} must be positive for dynamic triggers", gamma));
        }
    }
    if (!(upsilon0 >= 0.0) || !finite(upsilon0)) {
        out.push_back(fmt::format("trigger.upsilon0: {} must be >= 0", upsilon0));
    }
    if (is_periodic(kind) && (!(h > 0.0) || !finite(h))) {
        out.push_back(fmt::format("trigger.h: {} must be positive for periodic triggers", h));
    }
    return out;
}

void TriggerConfig::validate() const {
    const auto list = problems();
    if (!list.empty()) {
        throw ConfigError(fmt::format("{}", fmt::join(list, "; ")));
    }
}

double xi_from_norms(const TriggerConfig& cfg, double g_norm, double e_norm) noexcept {
    return cfg.sigma * cfg.alpha * g_norm * g_norm - cfg.beta * e_norm * g_norm;
}

double xi(const TriggerConfig& cfg, const Vector& g_hat, const Vector& e) {
    return xi_from_norms(cfg, g_hat.norm(), e.norm());
}

bool static_should_fire(const TriggerConfig& cfg, const Vector& g_hat, const Vector& e) {
    return xi(cfg, g_hat, e) < 0.0;
}

double upsilon_derivative(const TriggerConfig& cfg, double upsilon, double xi_value) noexcept {
    return -cfg.mu * upsilon + xi_value;
}

bool dynamic_condition(const TriggerConfig& cfg, double upsilon, double xi_value) noexcept {
    return upsilon + cfg.gamma * xi_value < 0.0;
}

bool dynamic_should_fire(const TriggerConfig& cfg, double upsilon, const Vector& g_hat, const Vector& e) {
    return dynamic_condition(cfg, upsilon, xi(cfg, g_hat, e));
}

bool periodic_should_fire(const TriggerConfig& cfg, double t, const Vector& g_hat_sample,
                          const Vector& g_hat_transmitted, double upsilon) {
    if (!is_periodic(cfg.kind) || !(cfg.h > 0.0)) {
        throw std::logic_error("periodic_should_fire called for a non-periodic trigger");
    }
    const double ratio = t / cfg.h;
    if (std::fabs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, std::fabs(ratio))) {
        throw std::logic_error(fmt::format("periodic check at t={} is off the sampling grid h={}", t, cfg.h));
    }
    const double value = xi(cfg, g_hat_sample, g_hat_transmitted - g_hat_sample);
    if (cfg.kind == TriggerKind::PeriodicDynamic) {
        return dynamic_condition(cfg, upsilon, value);
    }
    return value < 0.0;
}

void EventLog::append(double t, long long step, double xi_value, double upsilon) {
    if (!times_.empty() && !(t > times_.back())) {
        throw std::logic_error(fmt::format("event at t={} does not follow t={}", t, times_.back()));
    }
    times_.push_back(t);
    steps_.push_back(step);
    xi_.push_back(xi_value);
    upsilon_.push_back(upsilon);
}

std::vector<double> EventLog::intervals() const {
    std::vector<double> out;
    if (times_.size() > 1) {
        out.reserve(times_.size() - 1);
        for (std::size_t i = 1; i < times_.size(); ++i) {
            out.push_back(times_[i] - times_[i - 1]);
        }
    }
    return out;
}

}  // namespace etesc
