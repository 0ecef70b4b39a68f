#pragma once

#include "etesc/rational.hpp"
#include "etesc/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace etesc {

/// One violated exclusion of the probing-frequency assumption.
struct FrequencyViolation {
    std::string clause;  // "equal", "half_sum", "j_plus_2k", "sum", "difference"
    int i = 0;
    int j = 0;
    int k = 0;
    int l = 0;

    [[nodiscard]] std::string describe() const;
};

struct FrequencyReport {
    std::optional<FrequencyViolation> violation;
    long long tuples_checked = 0;
    long long tuples_skipped = 0;

    [[nodiscard]] bool ok() const noexcept { return !violation.has_value(); }
};

/// Exhaustive O(n^4) check that no ratio equals another ratio, half a sum of
/// two, w_j + 2 w_k, or w_k +/- w_l. Clauses are checked in that order.
[[nodiscard]] FrequencyReport validate_frequencies(const std::vector<Rational>& ratios);

struct CommonPeriod {
    double period = 0.0;  // T (s)
    double omega = 0.0;   // 2*pi/T (rad/s)
    Rational period_units;  // T in units of 2*pi/base, = LCM(q_i)/GCD(p_i)
};

/// Sinusoidal perturbation S_i = a_i sin(w_i t) and demodulation
/// M_i = (2/a_i) sin(w_i t), with w_i = ratio_i * base.
class DitherSpec {
public:
    /// Validates amplitudes, ratios and the frequency exclusions; throws ConfigError.
    DitherSpec(const Vector& amplitudes, std::vector<Rational> ratios, double base_freq);

    /// Skips all validation. Lets tests build degenerate dithers (zero amplitude).
    [[nodiscard]] static DitherSpec unchecked(const Vector& amplitudes, std::vector<Rational> ratios,
                                              double base_freq);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(amplitudes_.size()); }
    [[nodiscard]] const Vector& amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] const std::vector<Rational>& ratios() const noexcept { return ratios_; }
    [[nodiscard]] double base_freq() const noexcept { return base_freq_; }
    [[nodiscard]] const Vector& frequencies() const noexcept { return omegas_; }
    [[nodiscard]] double max_frequency() const noexcept { return omegas_.maxCoeff(); }

    /// Euclidean norm of the amplitude vector.
    [[nodiscard]] double amplitude_norm() const noexcept { return amplitudes_.norm(); }

    [[nodiscard]] Vector s_vector(double t) const;
    [[nodiscard]] Vector m_vector(double t) const;
    [[nodiscard]] Matrix delta_matrix(double t) const;

    /// sin(w_i t) for every channel; S and M are diagonal scalings of this.
    void sines(double t, Vector& out) const;

    [[nodiscard]] const Vector& demod_gains() const noexcept { return demod_; }

    [[nodiscard]] CommonPeriod common_period() const;

private:
    struct Unchecked {};
    DitherSpec(Unchecked, const Vector& amplitudes, std::vector<Rational> ratios, double base_freq);

    Vector amplitudes_;
    Vector demod_;
    std::vector<Rational> ratios_;
    double base_freq_;
    Vector omegas_;
};

}  // namespace etesc
