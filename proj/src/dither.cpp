#include "etesc/dither.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace etesc {

std::string FrequencyViolation::describe() const {
    if (clause == "equal") {
        return fmt::format("w'[{}] = w'[{}] (clause equal)", i, j);
    }
    if (clause == "half_sum") {
        return fmt::format("w'[{}] = (w'[{}] + w'[{}])/2 (clause half_sum)", i, j, k);
    }
    if (clause == "j_plus_2k") {
        return fmt::format("w'[{}] = w'[{}] + 2 w'[{}] (clause j_plus_2k)", i, j, k);
    }
    if (clause == "sum") {
        return fmt::format("w'[{}] = w'[{}] + w'[{}] (clause sum)", i, k, l);
    }
    return fmt::format("w'[{}] = w'[{}] - w'[{}] (clause difference)", i, k, l);
}

FrequencyReport validate_frequencies(const std::vector<Rational>& ratios) {
    FrequencyReport report;
    const int n = static_cast<int>(ratios.size());
    const Rational two(2);
    auto fail = [&](const char* clause, int i, int j, int k, int l) {
        report.violation = FrequencyViolation{clause, i, j, k, l};
    };

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                ++report.tuples_skipped;
                continue;
            }
            ++report.tuples_checked;
            if (ratios[i] == ratios[j]) {
                fail("equal", i, j, 0, 0);
                return report;
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                if (j == i && k == i) {
                    ++report.tuples_skipped;
                    continue;
                }
                ++report.tuples_checked;
                if (two * ratios[i] == ratios[j] + ratios[k]) {
                    fail("half_sum", i, j, k, 0);
                    return report;
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                ++report.tuples_checked;
                if (ratios[i] == ratios[j] + two * ratios[k]) {
                    fail("j_plus_2k", i, j, k, 0);
                    return report;
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
                ++report.tuples_checked;
                if (ratios[i] == ratios[k] + ratios[l]) {
                    fail("sum", i, 0, k, l);
                    return report;
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
                ++report.tuples_checked;
                if (ratios[i] == ratios[k] - ratios[l]) {
                    fail("difference", i, 0, k, l);
                    return report;
                }
            }
        }
    }
    return report;
}

DitherSpec::DitherSpec(Unchecked, const Vector& amplitudes, std::vector<Rational> ratios, double base_freq)
    : amplitudes_(amplitudes), ratios_(std::move(ratios)), base_freq_(base_freq) {
    const auto n = amplitudes_.size();
    if (static_cast<std::size_t>(n) != ratios_.size()) {
        throw ConfigError(fmt::format("dither has {} amplitudes but {} frequency ratios", n, ratios_.size()));
    }
    if (n == 0 || n > kMaxDim) {
        throw ConfigError(fmt::format("dither dimension {} outside [1, {}]", n, kMaxDim));
    }
    demod_.resize(n);
    omegas_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        demod_(i) = amplitudes_(i) != 0.0 ? 2.0 / amplitudes_(i) : 0.0;
        omegas_(i) = ratios_[static_cast<std::size_t>(i)].to_double() * base_freq_;
    }
}

DitherSpec::DitherSpec(const Vector& amplitudes, std::vector<Rational> ratios, double base_freq)
    : DitherSpec(Unchecked{}, amplitudes, std::move(ratios), base_freq) {
    if (!(base_freq_ > 0.0) || !std::isfinite(base_freq_)) {
        throw ConfigError(fmt::format("dither base frequency must be positive, got {}", base_freq_));
    }
    for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
        if (amplitudes_(i) == 0.0 || !std::isfinite(amplitudes_(i))) {
            throw ConfigError(fmt::format("dither amplitude a[{}] must be nonzero and finite", i));
        }
        if (ratios_[static_cast<std::size_t>(i)].num <= 0) {
            throw ConfigError(fmt::format("dither frequency ratio [{}] must be positive", i));
        }
    }
    const FrequencyReport report = validate_frequencies(ratios_);
    if (!report.ok()) {
        throw ConfigError("dither frequencies violate the exclusion assumption: " + report.violation->describe());
    }
}

DitherSpec DitherSpec::unchecked(const Vector& amplitudes, std::vector<Rational> ratios, double base_freq) {
    return {Unchecked{}, amplitudes, std::move(ratios), base_freq};
}

void DitherSpec::sines(double t, Vector& out) const {
    out.resize(omegas_.size());
    for (Eigen::Index i = 0; i < omegas_.size(); ++i) {
        out(i) = std::sin(omegas_(i) * t);
    }
}

Vector DitherSpec::s_vector(double t) const {
    Vector s;
    sines(t, s);
    return amplitudes_.cwiseProduct(s);
}

Vector DitherSpec::m_vector(double t) const {
    Vector s;
    sines(t, s);
    return demod_.cwiseProduct(s);
}

Matrix DitherSpec::delta_matrix(double t) const {
    const auto n = omegas_.size();
    Vector s;
    sines(t, s);
    Matrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            d(i, j) = i == j ? -std::cos(2.0 * omegas_(i) * t) : 2.0 * (amplitudes_(j) / amplitudes_(i)) * s(i) * s(j);
        }
    }
    return d;
}

CommonPeriod DitherSpec::common_period() const {
    // 1/w_i = q_i / (p_i * base); LCM of q_i/p_i over rationals is LCM(q_i)/GCD(p_i).
    std::int64_t lcm_q = 1;
    std::int64_t gcd_p = 0;
    for (const Rational& r : ratios_) {
        lcm_q = checked_lcm(lcm_q, r.den);
        gcd_p = checked_gcd(gcd_p, r.num);
    }
    CommonPeriod out;
    out.period_units = Rational(lcm_q, gcd_p);
    out.period = 2.0 * std::numbers::pi / base_freq_ * out.period_units.to_double();
    out.omega = 2.0 * std::numbers::pi / out.period;
    return out;
}

}  // namespace etesc
