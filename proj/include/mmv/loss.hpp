#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "mmv/complex_matrix.hpp"

namespace mmv {

// Threshold c with F_{chi^2_2}(2 c^2) = q, i.e. c = sqrt(-ln(1 - q)).
inline double threshold_from_quantile(double q) {
    if (!(q > 0.0) || !(q < 1.0))
        throw std::invalid_argument("threshold_from_quantile: q must lie in (0, 1)");
    return std::sqrt(-std::log1p(-q));
}

// Consistency correction for the Huber scale estimate under a circular
// complex Gaussian: beta = E[chi(e)] with e ~ CN(0, 1).
struct ConsistencyFactors {
    double threshold = std::numeric_limits<double>::infinity();
    double beta = 1.0;
    double alpha = 1.0;  // objective scaling, equal to beta
};

inline ConsistencyFactors consistency_factor(double c) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("consistency_factor: c must be positive and finite");
    const double x = 2.0 * c * c;
    // Closed-form chi-squared CDFs: F_2(x) = 1 - e^{-x/2}, F_4(x) = 1 - e^{-x/2}(1 + x/2).
    const double f2 = -std::expm1(-0.5 * x);
    const double f4 = 1.0 - std::exp(-0.5 * x) * (1.0 + 0.5 * x);
    const double beta = c * c * (1.0 - f2) + f4;
    return {c, beta, beta};
}

// Huber loss family for complex residuals, with the least-squares loss as the
// c -> infinity member.  sign(e) = e / |e| and sign(0) = 0, so psi(0) = 0.
class LossFamily {
public:
    static LossFamily huber(double threshold) {
        if (!(threshold > 0.0) || !std::isfinite(threshold))
            throw std::invalid_argument("LossFamily: threshold must be positive and finite");
        return LossFamily(threshold);
    }

    static LossFamily least_squares() {
        return LossFamily(std::numeric_limits<double>::infinity());
    }

    static LossFamily huber_from_quantile(double q) {
        return huber(threshold_from_quantile(q));
    }

    bool is_least_squares() const noexcept { return !std::isfinite(c_); }

    // +infinity for the least-squares member.
    double threshold() const noexcept { return c_; }

    double rho(Complex e) const noexcept {
        const double a = std::abs(e);
        if (a <= c_) return a * a;
        return 2.0 * c_ * a - c_ * c_;
    }

    Complex psi(Complex e) const noexcept {
        const double a = std::abs(e);
        if (a <= c_) return e;
        return (c_ / a) * e;
    }

    double chi(Complex e) const noexcept {
        const double n = std::norm(e);
        if (is_least_squares()) return n;
        return std::min(n, c_ * c_);
    }

    double weight(Complex e) const noexcept {
        const double a = std::abs(e);
        if (a <= c_) return 1.0;
        return c_ / a;
    }

    ConsistencyFactors factors() const {
        if (is_least_squares()) return ConsistencyFactors{};
        return consistency_factor(c_);
    }

    friend bool operator==(const LossFamily&, const LossFamily&) = default;

private:
    explicit LossFamily(double c) : c_(c) {}

    double c_;
};

}  // namespace mmv
