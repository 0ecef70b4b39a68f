#pragma once

#include "etesc/dither.hpp"
#include "etesc/types.hpp"

namespace etesc {

class ControllerGain {
public:
    explicit ControllerGain(const Matrix& k);

    [[nodiscard]] const Matrix& matrix() const noexcept { return k_; }
    [[nodiscard]] int dim() const noexcept { return static_cast<int>(k_.rows()); }

    /// Throws CertificateError unless every eigenvalue of H*K has negative real part.
    void require_hurwitz(const Matrix& hessian) const;

private:
    Matrix k_;
};

/// True iff every eigenvalue of a has real part < 0.
[[nodiscard]] bool is_hurwitz(const Matrix& a);

struct LoopState {
    double t = 0.0;
    Vector theta_hat;
    Vector g_hat_held;
    double upsilon = 0.0;
    double last_event_time = 0.0;
};

/// M(t) * y.
[[nodiscard]] Vector gradient_estimate(const DitherSpec& spec, double map_output, double t);

/// u_k = K * G_hat(t_k).
[[nodiscard]] Vector control_value(const ControllerGain& k, const Vector& g_hat_held);

/// e(t) = G_hat(t_k) - G_hat(t).
[[nodiscard]] Vector deviation_error(const Vector& g_hat_held, const Vector& g_hat_now);

[[nodiscard]] inline Vector theta_hat_derivative(const Vector& u) { return u; }

}  // namespace etesc
