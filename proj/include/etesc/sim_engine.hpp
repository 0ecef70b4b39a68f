#pragma once

#include "etesc/dither.hpp"
#include "etesc/esc_core.hpp"
#include "etesc/map_model.hpp"
#include "etesc/triggers.hpp"
#include "etesc/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace etesc {

enum class SimMode { Full, Average };

[[nodiscard]] std::string_view to_string(SimMode mode) noexcept;
[[nodiscard]] SimMode parse_sim_mode(std::string_view name);

/// Optional washout (high-pass) on y and low-pass on the demodulated
/// gradient. A cutoff of 0 disables the stage. Ignored in average mode.
struct FrontEnd {
    double washout = 0.0;  // rad/s
    double lowpass = 0.0;  // rad/s
};

struct SimConfig {
    QuadraticMap map;
    DitherSpec dither;
    ControllerGain gain;
    TriggerConfig trigger;
    Vector theta_hat0;
    double duration = 0.0;
    double dt = 0.0;
    SimMode mode = SimMode::Full;
    FrontEnd frontend;
    int decimation = 1;
    /// Q used for V_av = G^T P G in average mode.
    Matrix lyapunov_q;

    /// Every violated constraint, prefixed with its field path.
    [[nodiscard]] std::vector<std::string> problems() const;
    void validate() const;

    /// FNV-1a over a canonical text rendering; identifies a run in diagnostics.
    [[nodiscard]] std::uint64_t hash() const;
};

/// Fastest dither period / 200.
[[nodiscard]] double default_dt(const DitherSpec& dither);

/// Largest step <= dt that divides h an integer number of times.
[[nodiscard]] double align_dt_to_period(double dt, double h);

/// Uniformly decimated records stored row-major in one flat buffer.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(int n, bool average);

    [[nodiscard]] int dim() const noexcept { return n_; }
    [[nodiscard]] bool average() const noexcept { return average_; }
    [[nodiscard]] std::size_t size() const noexcept { return width_ == 0 ? 0 : data_.size() / width_; }
    [[nodiscard]] bool empty() const noexcept { return size() == 0; }

    [[nodiscard]] double t(std::size_t r) const { return row(r)[0]; }
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> theta_hat(std::size_t r) const { return block(r, 1); }
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> theta(std::size_t r) const { return block(r, 1 + n_); }
    [[nodiscard]] double y(std::size_t r) const { return row(r)[1 + 2 * n_]; }
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> g_hat(std::size_t r) const { return block(r, 2 + 2 * n_); }
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> g_held(std::size_t r) const { return block(r, 2 + 3 * n_); }
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> u(std::size_t r) const { return block(r, 2 + 4 * n_); }
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> e(std::size_t r) const { return block(r, 2 + 5 * n_); }
    [[nodiscard]] double xi(std::size_t r) const { return row(r)[2 + 6 * n_]; }
    [[nodiscard]] double upsilon(std::size_t r) const { return row(r)[3 + 6 * n_]; }
    [[nodiscard]] double v_av(std::size_t r) const { return row(r)[4 + 6 * n_]; }

    void push(double t, const Vector& theta_hat, const Vector& theta, double y, const Vector& g_hat,
              const Vector& g_held, const Vector& u, double xi, double upsilon, double v_av);

private:
    [[nodiscard]] const double* row(std::size_t r) const { return data_.data() + r * width_; }
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> block(std::size_t r, int offset) const {
        return {row(r) + offset, n_};
    }

    int n_ = 0;
    bool average_ = false;
    std::size_t width_ = 0;
    std::vector<double> data_;
};

/// Per-step view handed to RunOptions::probe after the trigger decision.
/// The *_before fields are evaluated against the held value in force before
/// the decision; after a firing, the held value equals g_hat.
struct StepInfo {
    long long step = 0;
    double t = 0.0;
    const Vector* theta_hat = nullptr;
    const Vector* g_hat = nullptr;
    const Vector* g_held = nullptr;
    double e_norm_before = 0.0;
    double xi_before = 0.0;
    double upsilon = 0.0;
    bool sampling_instant = true;
    bool fired = false;
};

struct RunOptions {
    bool keep_trajectory = true;
    std::function<void(const StepInfo&)> probe;
};

struct RunResult {
    Trajectory trajectory;
    EventLog events;
    long long steps = 0;
    double dt = 0.0;
    Vector final_theta_hat;
    Vector final_g_held;
    double final_upsilon = 0.0;
};

/// Deterministic fixed-step RK4 integration of the closed loop. The trigger is
/// checked on the post-step state; the control applied during a step is the
/// value held at the step's start. Throws DivergenceError on non-finite state.
[[nodiscard]] RunResult run(const SimConfig& cfg, const RunOptions& options = {});

}  // namespace etesc
