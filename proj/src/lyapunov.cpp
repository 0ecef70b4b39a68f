#include "etesc/lyapunov.hpp"

#include "etesc/linalg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

namespace etesc {

double lyapunov_residual(const Matrix& a, const Matrix& p, const Matrix& q) {
    return linalg::induced_norm(a.transpose() * p + p * a + q);
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
    const auto n = a.rows();
    if (a.cols() != n || q.rows() != n || q.cols() != n || n == 0) {
        throw ConfigError("solve_lyapunov: A and Q must be square of the same size");
    }
    for (const auto& lambda : linalg::eigenvalues(a)) {
        if (!(lambda.real() < 0.0)) {
            throw CertificateError(
                fmt::format("matrix is not Hurwitz: eigenvalue {:.6g}{:+.6g}i", lambda.real(), lambda.imag()));
        }
    }

    // vec(A^T P + P A) = (I kron A^T + A^T kron I) vec(P), column-major vec.
    const Eigen::Index nn = n * n;
    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(nn, nn);
    for (Eigen::Index col = 0; col < n; ++col) {
        for (Eigen::Index row = 0; row < n; ++row) {
            const Eigen::Index eq = col * n + row;
            for (Eigen::Index k = 0; k < n; ++k) {
                big(eq, col * n + k) += a(k, row);  // (A^T P)(row, col) = sum_k A(k,row) P(k,col)
                big(eq, k * n + row) += a(k, col);  // (P A)(row, col) = sum_k P(row,k) A(k,col)
            }
        }
    }
    Eigen::VectorXd rhs(nn);
    for (Eigen::Index col = 0; col < n; ++col) {
        for (Eigen::Index row = 0; row < n; ++row) {
            rhs(col * n + row) = -q(row, col);
        }
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(big);
    Eigen::VectorXd x = lu.solve(rhs);
    x += lu.solve(rhs - big * x);  // one step of iterative refinement

    Matrix p(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        for (Eigen::Index row = 0; row < n; ++row) {
            p(row, col) = x(col * n + row);
        }
    }
    p = linalg::symmetrized(p);

    const double q_norm = linalg::induced_norm(q);
    const double residual = lyapunov_residual(a, p, q);
    if (!(residual <= 1e-10 * q_norm)) {
        throw CertificateError(fmt::format("Lyapunov residual {:.3g} exceeds 1e-10*|Q| = {:.3g}", residual,
                                           1e-10 * q_norm));
    }
    if (!(linalg::symmetric_eigenvalues(p).minCoeff() > 0.0)) {
        throw CertificateError("Lyapunov solution P is not positive definite; is Q positive definite?");
    }
    return p;
}

AlphaBeta alpha_beta(const Matrix& h_star, const Matrix& k, const Matrix& p, const Matrix& q) {
    const Matrix hk = h_star * k;
    AlphaBeta out;
    out.alpha = linalg::symmetric_eigenvalues(q).minCoeff();
    out.beta = linalg::induced_norm(hk.transpose() * p) + linalg::induced_norm(p * hk);
    return out;
}

CertificateSet build_certificate(const Matrix& h_star, const Matrix& k, const Matrix& q,
                                 std::optional<double> alpha, std::optional<double> beta) {
    if (linalg::asymmetry(q) > 1e-9 || !(linalg::symmetric_eigenvalues(linalg::symmetrized(q)).minCoeff() > 0.0)) {
        throw ConfigError("certificate.Q must be symmetric positive definite");
    }
    CertificateSet cert;
    cert.Q = linalg::symmetrized(q);
    const Matrix hk = h_star * k;
    cert.P = solve_lyapunov(hk, cert.Q);
    const AlphaBeta tight = alpha_beta(h_star, k, cert.P, cert.Q);
    cert.alpha_tight = tight.alpha;
    cert.beta_tight = tight.beta;
    cert.alpha = alpha.value_or(tight.alpha);
    cert.beta = beta.value_or(tight.beta);
    cert.P_bar = linalg::symmetrized(h_star.transpose() * cert.P * h_star);

    const Vector eig_p = linalg::symmetric_eigenvalues(cert.P);
    cert.lambda_min_p = eig_p.minCoeff();
    cert.lambda_max_p = eig_p.maxCoeff();
    const Vector eig_pbar = linalg::symmetric_eigenvalues(cert.P_bar);
    cert.lambda_min_pbar = eig_pbar.minCoeff();
    cert.lambda_max_pbar = eig_pbar.maxCoeff();
    if (!(cert.lambda_min_pbar > 0.0)) {
        throw CertificateError("P_bar = H*^T P H* is not positive definite");
    }
    cert.hk_norm = linalg::induced_norm(hk);
    cert.h_norm = linalg::induced_norm(h_star);
    return cert;
}

namespace {

Envelope envelope(const CertificateSet& cert, double m, double kappa, const Vector& theta0,
                  const Vector& theta_star, double a_norm, double omega) {
    const double ratio = (1.0 + kappa) * cert.lambda_max_pbar / cert.lambda_min_pbar;
    const double d0 = (theta0 - theta_star).norm();
    const double order_term = a_norm + 1.0 / omega;
    Envelope out;
    out.m = m;
    out.M_theta = std::sqrt(ratio) * d0;
    out.M_y = cert.h_norm * ratio * d0 * d0 + 2.0 * cert.h_norm * std::sqrt(ratio) * d0 * order_term;
    return out;
}

}  // namespace

Envelope static_envelope(const CertificateSet& cert, double sigma, const Vector& theta0, const Vector& theta_star,
                         double a_norm, double omega) {
    const double m = cert.alpha * (1.0 - sigma) / (2.0 * cert.lambda_max_p);
    return envelope(cert, m, 0.0, theta0, theta_star, a_norm, omega);
}

Envelope dynamic_envelope(const CertificateSet& cert, double sigma, double mu, double kappa, const Vector& theta0,
                          const Vector& theta_star, double a_norm, double omega) {
    const double m = 0.5 * std::min((1.0 - sigma) * cert.alpha / cert.lambda_max_p, mu);
    return envelope(cert, m, kappa, theta0, theta_star, a_norm, omega);
}

double resolve_kappa(const Matrix& p, const Vector& g_av0, double upsilon0, std::optional<double> override_value) {
    if (override_value) {
        if (!(*override_value >= 0.0)) {
            throw ConfigError("certificate.kappa must be >= 0");
        }
        return *override_value;
    }
    if (upsilon0 == 0.0) {
        return 0.0;
    }
    const double v0 = g_av0.dot(p * g_av0);
    if (!(v0 > 0.0)) {
        throw ConfigError("kappa is undefined: G_av(0) = 0 with upsilon0 > 0; set certificate.kappa explicitly");
    }
    return upsilon0 / v0;
}

namespace {

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 8> kNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                          -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                          0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                            0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                            0.2223810344533745, 0.1012285362903763};

}  // namespace

double dwell_integral_fixed(double b0, double b1, double b2, double b3, int panels) {
    const double width = 1.0 / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * width;
        double panel = 0.0;
        for (std::size_t q = 0; q < kNodes.size(); ++q) {
            const double x = mid + 0.5 * width * kNodes[q];
            panel += kWeights[q] / (b0 + x * (b1 + x * (b2 + x * b3)));
        }
        total += 0.5 * width * panel;
    }
    return total;
}

double dwell_integral(double b0, double b1, double b2, double b3, double rel_tol) {
    if (!(b0 > 0.0)) {
        throw ConfigError("dwell-time integrand requires b0 > 0");
    }
    int panels = 4;
    double prev = dwell_integral_fixed(b0, b1, b2, b3, panels);
    while (panels < (1 << 20)) {
        panels *= 2;
        const double next = dwell_integral_fixed(b0, b1, b2, b3, panels);
        if (std::fabs(next - prev) <= rel_tol * std::fabs(next)) {
            return next;
        }
        prev = next;
    }
    return prev;
}

DwellTime dwell_time_static(double alpha, double beta, double sigma, double hk_norm) {
    if (!(hk_norm > 0.0)) {
        throw ConfigError("dwell time requires |H*K| > 0");
    }
    DwellTime out;
    out.regime = 0;
    out.b0 = beta * hk_norm / (alpha * sigma);
    out.b1 = 2.0 * hk_norm;
    out.b2 = alpha * sigma * hk_norm / beta;
    out.b3 = 0.0;
    out.tau_star = dwell_integral(out.b0, out.b1, out.b2, out.b3);
    return out;
}

DwellTime dwell_time_dynamic(double alpha, double beta, double sigma, double mu, double gamma, double hk_norm) {
    DwellTime out = dwell_time_static(alpha, beta, sigma, hk_norm);
    if (hk_norm <= 0.5 * mu) {
        out.regime = 1;
    } else if (gamma <= 1.0 / (2.0 * hk_norm - mu)) {
        out.regime = 2;
        out.b1 = 0.5 * mu + hk_norm;
        out.b3 = hk_norm - 0.5 * mu;
    } else {
        out.regime = 3;
        out.b1 = 2.0 * hk_norm - 1.0 / (2.0 * gamma);
        out.b3 = 1.0 / (2.0 * gamma);
    }
    out.tau_star = dwell_integral(out.b0, out.b1, out.b2, out.b3);
    return out;
}

DwellTime dwell_time_static(const CertificateSet& cert, double sigma) {
    return dwell_time_static(cert.alpha, cert.beta, sigma, cert.hk_norm);
}

DwellTime dwell_time_dynamic(const CertificateSet& cert, double sigma, double mu, double gamma) {
    return dwell_time_dynamic(cert.alpha, cert.beta, sigma, mu, gamma, cert.hk_norm);
}

}  // namespace etesc
