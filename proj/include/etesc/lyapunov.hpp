#pragma once

#include "etesc/types.hpp"

#include <optional>

namespace etesc {

/// Solves A^T P + P A = -Q through the Kronecker-vectorized linear system.
/// Throws CertificateError if A is not Hurwitz, if the residual exceeds
/// 1e-10*|Q|, or if P is not positive definite.
[[nodiscard]] Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

/// |A^T P + P A + Q| (induced 2-norm).
[[nodiscard]] double lyapunov_residual(const Matrix& a, const Matrix& p, const Matrix& q);

struct AlphaBeta {
    double alpha = 0.0;
    double beta = 0.0;
};

/// Tightest admissible constants: alpha = lambda_min(Q),
/// beta = |(H K)^T P| + |P H K|.
[[nodiscard]] AlphaBeta alpha_beta(const Matrix& h_star, const Matrix& k, const Matrix& p, const Matrix& q);

struct CertificateSet {
    Matrix P;
    Matrix Q;
    Matrix P_bar;  // H*^T P H*
    double alpha_tight = 0.0;
    double beta_tight = 0.0;
    double alpha = 0.0;  // as configured for the trigger
    double beta = 0.0;
    double lambda_min_p = 0.0;
    double lambda_max_p = 0.0;
    double lambda_min_pbar = 0.0;
    double lambda_max_pbar = 0.0;
    double hk_norm = 0.0;
    double h_norm = 0.0;
};

/// Solves for P with A = H*K and fills the derived quantities. The trigger's
/// alpha and beta are stored as given; pass nullopt to use the tight values.
[[nodiscard]] CertificateSet build_certificate(const Matrix& h_star, const Matrix& k, const Matrix& q,
                                               std::optional<double> alpha = std::nullopt,
                                               std::optional<double> beta = std::nullopt);

struct Envelope {
    double m = 0.0;
    double M_theta = 0.0;
    double M_y = 0.0;
};

/// m = alpha(1-sigma)/(2 lambda_max(P)). The O(a + 1/omega) term inside M_y is
/// evaluated with unit constant as (a_norm + 1/omega).
[[nodiscard]] Envelope static_envelope(const CertificateSet& cert, double sigma, const Vector& theta0,
                                       const Vector& theta_star, double a_norm, double omega);

/// m = min{(1-sigma) alpha / lambda_max(P), mu}/2; M_theta and M_y carry (1+kappa).
[[nodiscard]] Envelope dynamic_envelope(const CertificateSet& cert, double sigma, double mu, double kappa,
                                        const Vector& theta0, const Vector& theta_star, double a_norm,
                                        double omega);

/// kappa = upsilon0 / (G0^T P G0), 0 when upsilon0 = 0. Throws ConfigError when
/// G0 = 0 and upsilon0 > 0 unless an override is supplied.
[[nodiscard]] double resolve_kappa(const Matrix& p, const Vector& g_av0, double upsilon0,
                                   std::optional<double> override_value);

struct DwellTime {
    double tau_star = 0.0;
    int regime = 0;  // 0 static; 1, 2, 3 for the dynamic cases
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
};

/// integral over [0,1] of 1/(b0 + b1 x + b2 x^2 + b3 x^3), composite
/// Gauss-Legendre with panel doubling until the relative change is <= rel_tol.
[[nodiscard]] double dwell_integral(double b0, double b1, double b2, double b3, double rel_tol = 1e-12);

/// Same integrand with a fixed panel count; exposed for convergence checks.
[[nodiscard]] double dwell_integral_fixed(double b0, double b1, double b2, double b3, int panels);

[[nodiscard]] DwellTime dwell_time_static(double alpha, double beta, double sigma, double hk_norm);
[[nodiscard]] DwellTime dwell_time_dynamic(double alpha, double beta, double sigma, double mu, double gamma,
                                           double hk_norm);

/// Convenience forms reading alpha, beta and |H*K| from a certificate.
[[nodiscard]] DwellTime dwell_time_static(const CertificateSet& cert, double sigma);
[[nodiscard]] DwellTime dwell_time_dynamic(const CertificateSet& cert, double sigma, double mu, double gamma);

}  // namespace etesc
