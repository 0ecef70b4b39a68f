#include "etesc/esc_core.hpp"

#include "etesc/linalg.hpp"

#include <fmt/format.h>

namespace etesc {

ControllerGain::ControllerGain(const Matrix& k) : k_(k) {
    if (k_.rows() != k_.cols() || k_.rows() == 0) {
        throw ConfigError(fmt::format("gain K must be square and nonempty, got {}x{}", k_.rows(), k_.cols()));
    }
    if (!k_.allFinite()) {
        throw ConfigError("gain K must be finite");
    }
}

bool is_hurwitz(const Matrix& a) {
    for (const auto& lambda : linalg::eigenvalues(a)) {
        if (!(lambda.real() < 0.0)) {
            return false;
        }
    }
    return true;
}

void ControllerGain::require_hurwitz(const Matrix& hessian) const {
    if (hessian.rows() != k_.rows()) {
        throw ConfigError(fmt::format("gain K is {}x{} but the map has dimension {}", k_.rows(), k_.cols(),
                                      hessian.rows()));
    }
    const Matrix hk = hessian * k_;
    for (const auto& lambda : linalg::eigenvalues(hk)) {
        if (!(lambda.real() < 0.0)) {
            throw CertificateError(
                fmt::format("H*K is not Hurwitz: eigenvalue {:.6g}{:+.6g}i", lambda.real(), lambda.imag()));
        }
    }
}

Vector gradient_estimate(const DitherSpec& spec, double map_output, double t) {
    return spec.m_vector(t) * map_output;
}

Vector control_value(const ControllerGain& k, const Vector& g_hat_held) {
    return k.matrix() * g_hat_held;
}

Vector deviation_error(const Vector& g_hat_held, const Vector& g_hat_now) {
    return g_hat_held - g_hat_now;
}

}  // namespace etesc
