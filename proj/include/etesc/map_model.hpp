#pragma once

#include "etesc/types.hpp"

namespace etesc {

/// Quadratic static map Q(theta) = Q* + 1/2 (theta - theta*)^T H* (theta - theta*).
///
/// The Hessian is symmetrized on construction; inputs whose asymmetry exceeds
/// 1e-9 per entry are rejected, as are singular or indefinite Hessians.
/// Instances are immutable and may be shared across simulation runs.
class QuadraticMap {
public:
    QuadraticMap(const Matrix& hessian, const Vector& optimizer, double extremum);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(optimizer_.size()); }
    [[nodiscard]] const Matrix& hessian() const noexcept { return hessian_; }
    [[nodiscard]] const Vector& optimizer() const noexcept { return optimizer_; }
    [[nodiscard]] double extremum() const noexcept { return extremum_; }

    /// +1 for a minimum (positive-definite H*), -1 for a maximum.
    [[nodiscard]] int curvature_sign() const noexcept { return sign_; }

    [[nodiscard]] double evaluate(const Vector& theta) const;

    /// H*(theta - theta*). Ground truth for tests; the controller never calls it.
    [[nodiscard]] Vector true_gradient(const Vector& theta) const;

private:
    void check_dim(const Vector& theta) const;

    Matrix hessian_;
    Vector optimizer_;
    double extremum_;
    int sign_ = 1;
};

}  // namespace etesc
