#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mmv/complex_matrix.hpp"
#include "mmv/rng.hpp"

namespace mmv {

namespace detail {
inline constexpr double deg_pi = 3.141592653589793238462643383279502884;
inline double deg_to_rad(double deg) { return deg * (deg_pi / 180.0); }
}  // namespace detail

// Uniform linear array with half-wavelength spacing over a grid of candidate
// directions.  Angles are degrees everywhere outside steering_vector, which
// converts once.
struct SteeringGrid {
    std::size_t sensors = 0;
    std::vector<double> angles_deg;

    static SteeringGrid uniform(std::size_t sensors, double min_deg, double step_deg,
                                double max_deg) {
        if (!(step_deg > 0.0)) throw std::invalid_argument("SteeringGrid: step must be positive");
        std::vector<double> angles;
        for (double a = min_deg; a <= max_deg + 1e-9; a += step_deg) angles.push_back(a);
        return make(sensors, std::move(angles));
    }

    static SteeringGrid make(std::size_t sensors, std::vector<double> angles) {
        if (sensors == 0) throw std::invalid_argument("SteeringGrid: sensors must be positive");
        if (angles.size() < 2) throw std::invalid_argument("SteeringGrid: at least two angles");
        for (std::size_t i = 0; i < angles.size(); ++i) {
            if (angles[i] < -90.0 || angles[i] > 90.0)
                throw std::invalid_argument("SteeringGrid: angles must lie in [-90, 90]");
            if (i > 0 && !(angles[i] > angles[i - 1]))
                throw std::invalid_argument("SteeringGrid: angles must be strictly increasing");
        }
        return SteeringGrid{sensors, std::move(angles)};
    }

    std::size_t size() const noexcept { return angles_deg.size(); }

    std::optional<std::size_t> index_of(double angle_deg, double tol = 1e-9) const {
        for (std::size_t i = 0; i < angles_deg.size(); ++i)
            if (std::abs(angles_deg[i] - angle_deg) <= tol) return i;
        return std::nullopt;
    }
};

// Array response a(theta)_k = e^{-i pi k sin(theta)}, k = 0..n-1.
inline std::vector<Complex> steering_vector(double theta_deg, std::size_t n) {
    if (theta_deg < -90.0 || theta_deg > 90.0)
        throw std::invalid_argument("steering_vector: angle outside [-90, 90]");
    const double w = -detail::deg_pi * std::sin(detail::deg_to_rad(theta_deg));
    std::vector<Complex> a(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ph = w * static_cast<double>(k);
        a[k] = Complex(std::cos(ph), std::sin(ph));
    }
    return a;
}

// n x p dictionary whose column j is the steering vector of grid angle j.
inline ComplexMatrix steering_matrix(const SteeringGrid& grid) {
    ComplexMatrix a(grid.sensors, grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const std::vector<Complex> col = steering_vector(grid.angles_deg[j], grid.sensors);
        for (std::size_t i = 0; i < grid.sensors; ++i) a(i, j) = col[i];
    }
    return a;
}

enum class NoiseKind { ComplexGaussian, InverseGaussianCompound };

// Unit-variance noise families: circular complex Gaussian, and the compound
// Gaussian with inverse-Gaussian texture (heavy-tailed for small lambda).
struct NoiseModel {
    NoiseKind kind = NoiseKind::InverseGaussianCompound;
    double variance = 1.0;
    double lambda = 0.1;  // texture shape; only used by the compound model
};

// Entries sqrt(tau_ij) * z_ij with tau ~ IG(1, lambda), z ~ CN(0, 1); the
// texture has unit mean, so E|entry|^2 = 1.
inline ComplexMatrix sample_igcg_noise(std::size_t rows, std::size_t cols, double lambda,
                                       RandomStream& rng) {
    if (!(lambda > 0.0)) throw std::invalid_argument("sample_igcg_noise: lambda must be positive");
    ComplexMatrix e(rows, cols);
    for (Complex& z : e.data()) {
        const double tau = rng.inverse_gaussian(1.0, lambda);
        z = std::sqrt(tau) * rng.complex_normal(1.0);
    }
    return e;
}

inline ComplexMatrix sample_noise(std::size_t rows, std::size_t cols, const NoiseModel& model,
                                  RandomStream& rng) {
    if (model.variance < 0.0) throw std::invalid_argument("sample_noise: negative variance");
    if (model.variance == 0.0) return ComplexMatrix::zeros(rows, cols);
    ComplexMatrix e(rows, cols);
    if (model.kind == NoiseKind::ComplexGaussian) {
        for (Complex& z : e.data()) z = rng.complex_normal(model.variance);
        return e;
    }
    e = sample_igcg_noise(rows, cols, model.lambda, rng);
    const double amp = std::sqrt(model.variance);
    for (Complex& z : e.data()) z *= amp;
    return e;
}

// One source-localization draw: K sources at fixed grid angles, i.i.d.
// complex Gaussian snapshots, additive noise from the configured model.
struct Scenario {
    SteeringGrid grid;
    SupportSet true_doa_indices;
    std::size_t snapshots = 0;
    double snr_db = 0.0;
    NoiseModel noise;

    // Per-source power sigma_x^2 = 10^(snr_db/10) * noise variance.  The
    // noiseless diagnostic case (variance 0) references unit noise power so
    // the sources keep a finite level.
    double source_power() const {
        const double ref = noise.variance > 0.0 ? noise.variance : 1.0;
        return std::pow(10.0, snr_db / 10.0) * ref;
    }

    void validate() const {
        if (snapshots == 0) throw std::invalid_argument("Scenario: snapshots must be positive");
        if (true_doa_indices.empty())
            throw std::invalid_argument("Scenario: no true DOA indices");
        if (true_doa_indices.max_index() >= grid.size())
            throw std::invalid_argument("Scenario: DOA index outside the grid");
        if (grid.sensors == 0) throw std::invalid_argument("Scenario: grid has no sensors");
    }
};

// Returns (Y, S_true) with Y = A S_true + E.  S_true is zero except the rows
// at the true DOA indices, filled with i.i.d. CN(0, source_power).
inline std::pair<ComplexMatrix, ComplexMatrix> simulate_snapshots(const Scenario& scenario,
                                                                  RandomStream& rng) {
    scenario.validate();
    const std::size_t n = scenario.grid.sensors;
    const std::size_t p = scenario.grid.size();
    const std::size_t q = scenario.snapshots;
    const double power = scenario.source_power();

    ComplexMatrix s_true(p, q);
    for (std::size_t r : scenario.true_doa_indices) {
        Complex* row = s_true.row_data(r);
        for (std::size_t j = 0; j < q; ++j) row[j] = rng.complex_normal(power);
    }

    const ComplexMatrix a = steering_matrix(scenario.grid);
    ComplexMatrix y = restricted_product(a, s_true, scenario.true_doa_indices);
    y += sample_noise(n, q, scenario.noise, rng);
    return {std::move(y), std::move(s_true)};
}

// Exact-recovery indicator: the estimate counts only if it matches the truth
// as a set.
inline bool exact_recovery(const SupportSet& estimated, const SupportSet& truth) {
    return estimated == truth;
}

}  // namespace mmv
