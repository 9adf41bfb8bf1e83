#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mmv/complex_matrix.hpp"

namespace mmv {

struct EigenSystem {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // column k pairs with values[k]
};

// Eigendecomposition of a Hermitian matrix by the cyclic complex Jacobi
// method.  Quadratic convergence makes a handful of sweeps enough at the
// sizes used here (sensor counts in the tens).  The input is symmetrized
// first, so matrices Hermitian only up to rounding are handled cleanly.
inline EigenSystem hermitian_eigensystem(const ComplexMatrix& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("hermitian_eigensystem: matrix not square");
    const std::size_t n = h.rows();

    ComplexMatrix w(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        w(i, i) = Complex(h(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex v = 0.5 * (h(i, j) + std::conj(h(j, i)));
            w(i, j) = v;
            w(j, i) = std::conj(v);
        }
    }

    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = std::max(w.frobenius_norm(), 1e-300);
    const double tol = 1e-14 * scale;

    const std::size_t max_sweeps = 60;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += std::norm(w(i, j));
        if (std::sqrt(2.0 * off) <= tol) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex b = w(p, q);
                const double absb = std::abs(b);
                if (absb <= 1e-3 * tol / static_cast<double>(n)) continue;

                // Unitary 2x2 rotation zeroing w(p,q):
                //   [ c        s*phi ]        phi = b / |b|
                //   [ -s*conj(phi) c ]
                const Complex phi = b / absb;
                const double app = w(p, p).real();
                const double aqq = w(q, q).real();
                const double tau = (aqq - app) / (2.0 * absb);
                double t;
                if (tau >= 0.0)
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // W <- G^H W G, V <- V G
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex wp = w(p, k);
                    const Complex wq = w(q, k);
                    w(p, k) = c * wp - s * phi * wq;
                    w(q, k) = s * std::conj(phi) * wp + c * wq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex wp = w(k, p);
                    const Complex wq = w(k, q);
                    w(k, p) = c * wp - s * std::conj(phi) * wq;
                    w(k, q) = s * phi * wp + c * wq;
                    const Complex vp = v(k, p);
                    const Complex vq = v(k, q);
                    v(k, p) = c * vp - s * std::conj(phi) * vq;
                    v(k, q) = s * phi * vp + c * vq;
                }
                w(p, q) = Complex(0.0, 0.0);
                w(q, p) = Complex(0.0, 0.0);
                w(p, p) = Complex(w(p, p).real(), 0.0);
                w(q, q) = Complex(w(q, q).real(), 0.0);
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&w](std::size_t a, std::size_t b) { return w(a, a).real() < w(b, b).real(); });

    EigenSystem out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = w(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

}  // namespace mmv
