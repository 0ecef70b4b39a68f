#include "etesc/sim_engine.hpp"

#include "etesc/linalg.hpp"
#include "etesc/lyapunov.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace etesc {

std::string_view to_string(SimMode mode) noexcept {
    return mode == SimMode::Full ? "full" : "average";
}

SimMode parse_sim_mode(std::string_view name) {
    if (name == "full") {
        return SimMode::Full;
    }
    if (name == "average") {
        return SimMode::Average;
    }
    throw ConfigError(fmt::format("unknown mode '{}' (expected full or average)", name));
}

double default_dt(const DitherSpec& dither) {
    return 2.0 * std::numbers::pi / dither.max_frequency() / 200.0;
}

double align_dt_to_period(double dt, double h) {
    const double steps = std::ceil(h / dt - 1e-9);
    return h / std::max(steps, 1.0);
}

std::vector<std::string> SimConfig::problems() const {
    std::vector<std::string> out = trigger.problems();
    const int n = map.dim();
    if (dither.dim() != n) {
        out.push_back(fmt::format("dither: dimension {} does not match map dimension {}", dither.dim(), n));
    }
    if (gain.dim() != n) {
        out.push_back(fmt::format("gain.K: dimension {} does not match map dimension {}", gain.dim(), n));
    }
    if (theta_hat0.size() != n) {
        out.push_back(fmt::format("sim.theta_hat0: {} entries, map expects {}", theta_hat0.size(), n));
    } else if (!theta_hat0.allFinite()) {
        out.push_back("sim.theta_hat0: entries must be finite");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        out.push_back(fmt::format("sim.dt: {} must be positive", dt));
    } else {
        if (mode == SimMode::Full) {
            const double limit = 2.0 * std::numbers::pi / dither.max_frequency() / 50.0;
            if (dt > limit * (1.0 + 1e-12)) {
                out.push_back(fmt::format("sim.dt: {} exceeds fastest dither period / 50 = {}", dt, limit));
            }
        }
        if (!(duration >= 0.0) || !std::isfinite(duration)) {
            out.push_back(fmt::format("sim.duration: {} must be >= 0", duration));
        } else if (duration > 0.0 && duration < 10.0 * dt * (1.0 - 1e-12)) {
            out.push_back(fmt::format("sim.duration: {} is shorter than 10 steps of {}", duration, dt));
        }
        if (is_periodic(trigger.kind) && trigger.h > 0.0) {
            const double ratio = trigger.h / dt;
            if (std::fabs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
                out.push_back(fmt::format("trigger.h: {} is not an integer multiple of sim.dt {}", trigger.h, dt));
            }
        }
    }
    if (decimation < 1) {
        out.push_back(fmt::format("output.decimation: {} must be >= 1", decimation));
    }
    if (!(frontend.washout >= 0.0) || !(frontend.lowpass >= 0.0)) {
        out.push_back("frontend: cutoffs must be >= 0");
    }
    if (lyapunov_q.rows() != n || lyapunov_q.cols() != n) {
        out.push_back(fmt::format("certificate.Q: must be {}x{}", n, n));
    }
    if (gain.dim() == n) {
        try {
            gain.require_hurwitz(map.hessian());
        } catch (const CertificateError& err) {
            out.push_back(fmt::format("gain.K: {}", err.what()));
        }
    }
    return out;
}

void SimConfig::validate() const {
    const auto list = problems();
    if (!list.empty()) {
        throw ConfigError(fmt::format("{}", fmt::join(list, "; ")));
    }
}

std::uint64_t SimConfig::hash() const {
    std::string text;
    auto add_vec = [&](const char* name, const auto& v) {
        text += name;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            text += fmt::format(",{:.17g}", v.data()[i]);
        }
        text += ';';
    };
    add_vec("H", map.hessian());
    add_vec("theta_star", map.optimizer());
    text += fmt::format("Q*={:.17g};", map.extremum());
    add_vec("a", dither.amplitudes());
    for (const auto& r : dither.ratios()) {
        text += r.to_string() + ",";
    }
    text += fmt::format("base={:.17g};", dither.base_freq());
    add_vec("K", gain.matrix());
    text += fmt::format("kind={};sigma={:.17g};alpha={:.17g};beta={:.17g};mu={:.17g};gamma={:.17g};ups0={:.17g};"
                        "h={:.17g};",
                        to_string(trigger.kind), trigger.sigma, trigger.alpha, trigger.beta, trigger.mu,
                        trigger.gamma, trigger.upsilon0, trigger.h);
    add_vec("theta_hat0", theta_hat0);
    text += fmt::format("T={:.17g};dt={:.17g};mode={};wh={:.17g};wl={:.17g};dec={};", duration, dt, to_string(mode),
                        frontend.washout, frontend.lowpass, decimation);
    add_vec("Qc", lyapunov_q);
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

Trajectory::Trajectory(int n, bool average)
    : n_(n), average_(average), width_(static_cast<std::size_t>(5 + 6 * n)) {}

void Trajectory::push(double t, const Vector& theta_hat, const Vector& theta, double y, const Vector& g_hat,
                      const Vector& g_held, const Vector& u, double xi, double upsilon, double v_av) {
    data_.push_back(t);
    auto append = [this](const Vector& v) { data_.insert(data_.end(), v.data(), v.data() + v.size()); };
    append(theta_hat);
    append(theta);
    data_.push_back(y);
    append(g_hat);
    append(g_held);
    append(u);
    const Vector e = g_held - g_hat;
    append(e);
    data_.push_back(xi);
    data_.push_back(upsilon);
    data_.push_back(v_av);
}

namespace {

constexpr int kMaxState = 2 * kMaxDim + 2;
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxState, 1>;

// Offsets of each block inside the integrated state.
struct Layout {
    int n = 0;
    int eta = -1;      // washout state
    int zeta = -1;     // low-pass state (n entries)
    int upsilon = -1;  // dynamic filter
    int size = 0;
};

Layout make_layout(const SimConfig& cfg) {
    Layout l;
    l.n = cfg.map.dim();
    l.size = l.n;
    if (cfg.mode == SimMode::Full) {
        if (cfg.frontend.washout > 0.0) {
            l.eta = l.size;
            l.size += 1;
        }
        if (cfg.frontend.lowpass > 0.0) {
            l.zeta = l.size;
            l.size += l.n;
        }
    }
    if (is_dynamic(cfg.trigger.kind)) {
        l.upsilon = l.size;
        l.size += 1;
    }
    return l;
}

[[noreturn]] void diverged(const SimConfig& cfg, double t) {
    throw DivergenceError(fmt::format("non-finite state at t={:.9g} (config hash {:016x})", t, cfg.hash()), t);
}

// Quantities observed at one instant of the full (dithered) loop.
struct FullOutputs {
    Vector theta;
    double y = 0.0;
    Vector g_raw;
    Vector g_hat;
};

class FullModel {
public:
    FullModel(const SimConfig& cfg, const Layout& layout)
        : cfg_(cfg),
          l_(layout),
          h_(cfg.map.hessian()),
          theta_star_(cfg.map.optimizer()),
          q_star_(cfg.map.extremum()),
          amp_(cfg.dither.amplitudes()),
          demod_(cfg.dither.demod_gains()),
          k_(cfg.gain.matrix()),
          continuous_(cfg.trigger.kind == TriggerKind::Continuous) {}

    void outputs(const State& x, const Vector& sines, FullOutputs& out) const {
        const auto th = x.head(l_.n);
        out.theta = th + amp_.cwiseProduct(sines);
        const Vector d = out.theta - theta_star_;
        out.y = q_star_ + 0.5 * d.dot(h_ * d);
        const double signal = l_.eta >= 0 ? out.y - x(l_.eta) : out.y;
        out.g_raw = demod_.cwiseProduct(sines) * signal;
        if (l_.zeta >= 0) {
            out.g_hat = x.segment(l_.zeta, l_.n);
        } else {
            out.g_hat = out.g_raw;
        }
    }

    void derivative(const State& x, const Vector& sines, const Vector& u_held, const Vector& g_held,
                    State& dx) {
        outputs(x, sines, scratch_);
        dx.resize(l_.size);
        if (continuous_) {
            dx.head(l_.n) = k_ * scratch_.g_hat;
        } else {
            dx.head(l_.n) = u_held;
        }
        if (l_.eta >= 0) {
            dx(l_.eta) = cfg_.frontend.washout * (scratch_.y - x(l_.eta));
        }
        if (l_.zeta >= 0) {
            dx.segment(l_.zeta, l_.n) = cfg_.frontend.lowpass * (scratch_.g_raw - x.segment(l_.zeta, l_.n));
        }
        if (l_.upsilon >= 0) {
            const double g_norm = scratch_.g_hat.norm();
            const double e_norm = (g_held - scratch_.g_hat).norm();
            dx(l_.upsilon) = upsilon_derivative(cfg_.trigger, x(l_.upsilon), xi_from_norms(cfg_.trigger, g_norm, e_norm));
        }
    }

private:
    const SimConfig& cfg_;
    Layout l_;
    Matrix h_;
    Vector theta_star_;
    double q_star_;
    Vector amp_;
    Vector demod_;
    Matrix k_;
    bool continuous_;
    FullOutputs scratch_;
};

class AverageModel {
public:
    AverageModel(const SimConfig& cfg, const Layout& layout)
        : cfg_(cfg), l_(layout), hk_(cfg.map.hessian() * cfg.gain.matrix()),
          continuous_(cfg.trigger.kind == TriggerKind::Continuous) {}

    void derivative(const State& x, const Vector& g_held, State& dx) const {
        dx.resize(l_.size);
        const auto g = x.head(l_.n);
        // H*K G + H*K (G_held - G) collapses to H*K G_held under event-triggered hold.
        if (continuous_) {
            dx.head(l_.n) = hk_ * g;
        } else {
            dx.head(l_.n) = hk_ * g_held;
        }
        if (l_.upsilon >= 0) {
            const double g_norm = g.norm();
            const double e_norm = (g_held - g).norm();
            dx(l_.upsilon) = upsilon_derivative(cfg_.trigger, x(l_.upsilon), xi_from_norms(cfg_.trigger, g_norm, e_norm));
        }
    }

private:
    const SimConfig& cfg_;
    Layout l_;
    Matrix hk_;
    bool continuous_;
};

struct Decision {
    bool sampling = true;
    bool fire = false;
};

Decision decide(const TriggerConfig& trig, long long step, long long period_steps, double xi_value,
                double upsilon) {
    Decision d;
    switch (trig.kind) {
        case TriggerKind::Static:
            d.fire = xi_value < 0.0;
            break;
        case TriggerKind::Dynamic:
            d.fire = dynamic_condition(trig, upsilon, xi_value);
            break;
        case TriggerKind::PeriodicStatic:
            d.sampling = step % period_steps == 0;
            d.fire = d.sampling && xi_value < 0.0;
            break;
        case TriggerKind::PeriodicDynamic:
            d.sampling = step % period_steps == 0;
            d.fire = d.sampling && dynamic_condition(trig, upsilon, xi_value);
            break;
        case TriggerKind::Continuous:
            d.sampling = false;
            break;
    }
    return d;
}

RunResult run_full(const SimConfig& cfg, const RunOptions& options) {
    const Layout l = make_layout(cfg);
    FullModel model(cfg, l);
    const int n = l.n;
    const double dt = cfg.dt;
    const auto steps = static_cast<long long>(std::floor(cfg.duration / dt + 1e-9));
    const long long period_steps =
        is_periodic(cfg.trigger.kind) ? std::max(1LL, std::llround(cfg.trigger.h / dt)) : 1LL;
    const Matrix& k = cfg.gain.matrix();

    RunResult result;
    result.dt = dt;
    result.steps = steps;
    if (options.keep_trajectory) {
        result.trajectory = Trajectory(n, false);
    }

    State x(l.size);
    x.head(n) = cfg.theta_hat0;
    Vector sines_now;
    cfg.dither.sines(0.0, sines_now);
    FullOutputs out;
    model.outputs(x, sines_now, out);
    if (l.eta >= 0) {
        x(l.eta) = out.y;
    }
    if (l.zeta >= 0) {
        x.segment(l.zeta, n).setZero();
    }
    if (l.upsilon >= 0) {
        x(l.upsilon) = cfg.trigger.upsilon0;
    }
    model.outputs(x, sines_now, out);

    Vector g_held = out.g_hat;
    Vector u_held = k * g_held;
    auto upsilon_of = [&](const State& s) { return l.upsilon >= 0 ? s(l.upsilon) : 0.0; };
    auto control_now = [&](const FullOutputs& o) -> Vector {
        return cfg.trigger.kind == TriggerKind::Continuous ? Vector(k * o.g_hat) : u_held;
    };

    const double xi0 = xi(cfg.trigger, out.g_hat, g_held - out.g_hat);
    result.events.append(0.0, 0, xi0, upsilon_of(x));
    if (options.keep_trajectory) {
        result.trajectory.push(0.0, x.head(n), out.theta, out.y, out.g_hat, g_held, control_now(out), xi0,
                               upsilon_of(x), 0.0);
    }

    State k1(l.size), k2(l.size), k3(l.size), k4(l.size), tmp(l.size);
    Vector sines_mid, sines_end;
    for (long long step = 1; step <= steps; ++step) {
        const double t0 = static_cast<double>(step - 1) * dt;
        const double t1 = static_cast<double>(step) * dt;
        cfg.dither.sines(t0 + 0.5 * dt, sines_mid);
        cfg.dither.sines(t1, sines_end);

        model.derivative(x, sines_now, u_held, g_held, k1);
        tmp = x + 0.5 * dt * k1;
        model.derivative(tmp, sines_mid, u_held, g_held, k2);
        tmp = x + 0.5 * dt * k2;
        model.derivative(tmp, sines_mid, u_held, g_held, k3);
        tmp = x + dt * k3;
        model.derivative(tmp, sines_end, u_held, g_held, k4);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        sines_now.swap(sines_end);

        model.outputs(x, sines_now, out);
        if (!x.allFinite() || !std::isfinite(out.y)) {
            diverged(cfg, t1);
        }
        const double ups = upsilon_of(x);
        const double e_norm = (g_held - out.g_hat).norm();
        const double xi_before = xi_from_norms(cfg.trigger, out.g_hat.norm(), e_norm);
        const Decision d = decide(cfg.trigger, step, period_steps, xi_before, ups);
        if (d.fire) {
            g_held = out.g_hat;
            u_held = k * g_held;
            result.events.append(t1, step, xi_before, ups);
        }
        if (options.probe) {
            StepInfo info;
            info.step = step;
            info.t = t1;
            const Vector th = x.head(n);
            info.theta_hat = &th;
            info.g_hat = &out.g_hat;
            info.g_held = &g_held;
            info.e_norm_before = e_norm;
            info.xi_before = xi_before;
            info.upsilon = ups;
            info.sampling_instant = d.sampling;
            info.fired = d.fire;
            options.probe(info);
        }
        if (options.keep_trajectory && step % cfg.decimation == 0) {
            const double xi_now = d.fire ? xi(cfg.trigger, out.g_hat, Vector::Zero(n)) : xi_before;
            result.trajectory.push(t1, x.head(n), out.theta, out.y, out.g_hat, g_held, control_now(out), xi_now,
                                   ups, 0.0);
        }
    }
    result.final_theta_hat = x.head(n);
    result.final_g_held = g_held;
    result.final_upsilon = upsilon_of(x);
    return result;
}

RunResult run_average(const SimConfig& cfg, const RunOptions& options) {
    const Layout l = make_layout(cfg);
    AverageModel model(cfg, l);
    const int n = l.n;
    const double dt = cfg.dt;
    const auto steps = static_cast<long long>(std::floor(cfg.duration / dt + 1e-9));
    const long long period_steps =
        is_periodic(cfg.trigger.kind) ? std::max(1LL, std::llround(cfg.trigger.h / dt)) : 1LL;
    const Matrix& k = cfg.gain.matrix();
    const Matrix& h = cfg.map.hessian();
    const Eigen::PartialPivLU<Eigen::MatrixXd> h_lu{Eigen::MatrixXd(h)};
    const Matrix p = solve_lyapunov(h * k, cfg.lyapunov_q);

    RunResult result;
    result.dt = dt;
    result.steps = steps;
    if (options.keep_trajectory) {
        result.trajectory = Trajectory(n, true);
    }

    State x(l.size);
    x.head(n) = h * (cfg.theta_hat0 - cfg.map.optimizer());
    if (l.upsilon >= 0) {
        x(l.upsilon) = cfg.trigger.upsilon0;
    }
    Vector g_held = x.head(n);
    auto upsilon_of = [&](const State& s) { return l.upsilon >= 0 ? s(l.upsilon) : 0.0; };

    auto record = [&](double t, const Vector& g, double xi_value) {
        const Vector theta_tilde = h_lu.solve(Eigen::VectorXd(g));
        const Vector theta_hat = cfg.map.optimizer() + theta_tilde;
        const Vector u = cfg.trigger.kind == TriggerKind::Continuous ? Vector(k * g) : Vector(k * g_held);
        result.trajectory.push(t, theta_hat, theta_hat, cfg.map.evaluate(theta_hat), g, g_held, u, xi_value,
                               upsilon_of(x), g.dot(p * g));
    };

    {
        const Vector g0 = x.head(n);
        const double xi0 = xi(cfg.trigger, g0, Vector::Zero(n));
        result.events.append(0.0, 0, xi0, upsilon_of(x));
        if (options.keep_trajectory) {
            record(0.0, g0, xi0);
        }
    }

    State k1(l.size), k2(l.size), k3(l.size), k4(l.size), tmp(l.size);
    for (long long step = 1; step <= steps; ++step) {
        const double t1 = static_cast<double>(step) * dt;
        model.derivative(x, g_held, k1);
        tmp = x + 0.5 * dt * k1;
        model.derivative(tmp, g_held, k2);
        tmp = x + 0.5 * dt * k2;
        model.derivative(tmp, g_held, k3);
        tmp = x + dt * k3;
        model.derivative(tmp, g_held, k4);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite()) {
            diverged(cfg, t1);
        }
        const Vector g = x.head(n);
        const double ups = upsilon_of(x);
        const double e_norm = (g_held - g).norm();
        const double xi_before = xi_from_norms(cfg.trigger, g.norm(), e_norm);
        const Decision d = decide(cfg.trigger, step, period_steps, xi_before, ups);
        if (d.fire) {
            g_held = g;
            result.events.append(t1, step, xi_before, ups);
        }
        if (options.probe) {
            StepInfo info;
            info.step = step;
            info.t = t1;
            const Vector th = cfg.map.optimizer() + Vector(h_lu.solve(Eigen::VectorXd(g)));
            info.theta_hat = &th;
            info.g_hat = &g;
            info.g_held = &g_held;
            info.e_norm_before = e_norm;
            info.xi_before = xi_before;
            info.upsilon = ups;
            info.sampling_instant = d.sampling;
            info.fired = d.fire;
            options.probe(info);
        }
        if (options.keep_trajectory && step % cfg.decimation == 0) {
            record(t1, g, d.fire ? xi(cfg.trigger, g, Vector::Zero(n)) : xi_before);
        }
    }
    result.final_theta_hat = cfg.map.optimizer() + Vector(h_lu.solve(Eigen::VectorXd(x.head(n))));
    result.final_g_held = g_held;
    result.final_upsilon = upsilon_of(x);
    return result;
}

}  // namespace

RunResult run(const SimConfig& cfg, const RunOptions& options) {
    cfg.validate();
    return cfg.mode == SimMode::Full ? run_full(cfg, options) : run_average(cfg, options);
}

}  // namespace etesc
