#include "etesc/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace etesc::linalg {

double induced_norm(const Matrix& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(a)};
    return svd.singularValues()(0);
}

Vector symmetric_eigenvalues(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver{Eigen::MatrixXd(a), Eigen::EigenvaluesOnly};
    return solver.eigenvalues();
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver{Eigen::MatrixXd(a), false};
    const auto& values = solver.eigenvalues();
    return {values.data(), values.data() + values.size()};
}

double asymmetry(const Matrix& a) {
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace etesc::linalg
