#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mmv/complex_matrix.hpp"
#include "mmv/doa.hpp"
#include "mmv/hermitian_eig.hpp"
#include "mmv/peaks.hpp"

namespace mmv {

// MUSIC pseudospectrum over the grid: P(theta_j) = 1 / (a_j^H E_n E_n^H a_j)
// with E_n the eigenvectors of the n-k smallest eigenvalues of the sample
// covariance (1/q) Y Y^H.
inline std::vector<double> music_pseudospectrum(const ComplexMatrix& y, const SteeringGrid& grid,
                                                std::size_t k) {
    if (y.rows() != grid.sensors)
        throw std::invalid_argument("music_pseudospectrum: Y rows must match the sensor count");
    if (k >= y.rows())
        throw std::invalid_argument("music_pseudospectrum: k must be smaller than the sensor count");
    const std::size_t n = y.rows();
    const std::size_t q = y.cols();

    ComplexMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Complex acc(0.0, 0.0);
            const Complex* yi = y.row_data(i);
            const Complex* yj = y.row_data(j);
            for (std::size_t t = 0; t < q; ++t) acc += yi[t] * std::conj(yj[t]);
            r(i, j) = acc / static_cast<double>(q);
        }

    const EigenSystem eig = hermitian_eigensystem(r);
    const std::size_t noise_dim = n - k;

    std::vector<double> spectrum(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const std::vector<Complex> a = steering_vector(grid.angles_deg[g], n);
        // ||E_n^H a||^2, accumulated column by column.
        double denom = 0.0;
        for (std::size_t c = 0; c < noise_dim; ++c) {
            Complex dot(0.0, 0.0);
            for (std::size_t i = 0; i < n; ++i) dot += std::conj(eig.vectors(i, c)) * a[i];
            denom += std::norm(dot);
        }
        spectrum[g] = 1.0 / std::max(denom, 1e-300);
    }
    return spectrum;
}

inline SupportSet music_estimate(const ComplexMatrix& y, const SteeringGrid& grid, std::size_t k) {
    return find_k_peaks(music_pseudospectrum(y, grid, k), k);
}

}  // namespace mmv
