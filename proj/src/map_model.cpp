#include "etesc/map_model.hpp"

#include "etesc/linalg.hpp"

#include <fmt/format.h>

#include <cmath>

namespace etesc {

namespace {
constexpr double kMaxAsymmetry = 1e-9;
constexpr double kRankTolerance = 1e-10;
}  // namespace

QuadraticMap::QuadraticMap(const Matrix& hessian, const Vector& optimizer, double extremum)
    : optimizer_(optimizer), extremum_(extremum) {
    const auto n = optimizer.size();
    if (n == 0 || n > kMaxDim) {
        throw ConfigError(fmt::format("map dimension {} outside [1, {}]", n, kMaxDim));
    }
    if (hessian.rows() != n || hessian.cols() != n) {
        throw ConfigError(fmt::format("hessian is {}x{} but optimizer has {} entries",
                                      hessian.rows(), hessian.cols(), n));
    }
    if (!hessian.allFinite() || !optimizer.allFinite() || !std::isfinite(extremum)) {
        throw ConfigError("map parameters must be finite");
    }
    const double skew = linalg::asymmetry(hessian);
    if (skew > kMaxAsymmetry) {
        throw ConfigError(fmt::format("hessian asymmetry {:.3g} exceeds {:.0e}", skew, kMaxAsymmetry));
    }
    hessian_ = linalg::symmetrized(hessian);

    const Vector eig = linalg::symmetric_eigenvalues(hessian_);
    const double largest = eig.cwiseAbs().maxCoeff();
    if (largest == 0.0 || eig.cwiseAbs().minCoeff() <= kRankTolerance * largest) {
        throw ConfigError("hessian is singular");
    }
    if (eig.minCoeff() > 0.0) {
        sign_ = 1;
    } else if (eig.maxCoeff() < 0.0) {
        sign_ = -1;
    } else {
        throw ConfigError(fmt::format("hessian is indefinite (eigenvalues {:.4g} .. {:.4g})",
                                      eig.minCoeff(), eig.maxCoeff()));
    }
}

void QuadraticMap::check_dim(const Vector& theta) const {
    if (theta.size() != optimizer_.size()) {
        throw ConfigError(fmt::format("theta has {} entries, map expects {}", theta.size(), optimizer_.size()));
    }
}

double QuadraticMap::evaluate(const Vector& theta) const {
    check_dim(theta);
    const Vector d = theta - optimizer_;
    return extremum_ + 0.5 * d.dot(hessian_ * d);
}

Vector QuadraticMap::true_gradient(const Vector& theta) const {
    check_dim(theta);
    return hessian_ * (theta - optimizer_);
}

}  // namespace etesc
