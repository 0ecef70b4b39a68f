#pragma once

#include "etesc/types.hpp"

#include <initializer_list>
#include <random>

namespace etesc::test {

inline Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        out(i++) = x;
    }
    return out;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.begin()->size());
    Matrix out(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double x : row) {
            out(i, j++) = x;
        }
        ++i;
    }
    return out;
}

inline Matrix paper_hessian() { return mat({{100, 30}, {30, 20}}); }
inline Vector paper_optimizer() { return vec({2, 4}); }
inline Matrix paper_gain() { return mat({{-0.06, 0}, {0, -0.2}}); }

/// Random SPD matrix with eigenvalues in [lo, hi].
inline Matrix random_spd(int n, std::mt19937_64& rng, double lo = 0.5, double hi = 5.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = g(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(a)};
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) {
        d(i) = u(rng);
    }
    return Matrix(q * d.asDiagonal() * q.transpose());
}

}  // namespace etesc::test
