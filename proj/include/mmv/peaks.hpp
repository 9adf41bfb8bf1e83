#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mmv/complex_matrix.hpp"

namespace mmv {

// Indices of the K largest local maxima of `values`.  A plateau counts as a
// single peak at its first index; the first and last entries qualify when the
// sequence rises towards them.  When fewer than K local maxima exist, the
// remaining slots are filled with the largest non-peak values.  Ties break
// towards the lower index.
inline SupportSet find_k_peaks(const std::vector<double>& values, std::size_t k) {
    if (k > values.size()) throw std::invalid_argument("find_k_peaks: k exceeds the grid size");
    if (k == 0) return SupportSet();

    const std::size_t n = values.size();
    std::vector<char> is_peak(n, 0);
    std::size_t run_start = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool run_ends = (i + 1 == n) || (values[i + 1] != values[i]);
        if (!run_ends) continue;
        const bool rises_in = run_start == 0 || values[run_start - 1] < values[run_start];
        const bool falls_out = i + 1 == n || values[i + 1] < values[i];
        if (rises_in && falls_out) is_peak[run_start] = 1;
        run_start = i + 1;
    }

    std::vector<std::size_t> peaks;
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i) (is_peak[i] ? peaks : rest).push_back(i);

    const auto by_value = [&values](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    };
    std::sort(peaks.begin(), peaks.end(), by_value);
    if (peaks.size() > k) {
        peaks.resize(k);
    } else if (peaks.size() < k) {
        const std::size_t missing = k - peaks.size();
        std::partial_sort(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(missing),
                          rest.end(), by_value);
        peaks.insert(peaks.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(missing));
    }
    return SupportSet(std::move(peaks));
}

}  // namespace mmv
