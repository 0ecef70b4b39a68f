#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace etesc {

// Upper bound on the number of tuned parameters. Vectors and matrices keep
// their storage inline so the integration loop never touches the heap.
inline constexpr int kMaxDim = 16;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// Invalid or inconsistent user input (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A certificate could not be built, e.g. H*K is not Hurwitz.
class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite state during integration (maps to CLI exit code 3).
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}

    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace etesc
