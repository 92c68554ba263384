#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace commsense {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Cosine similarity; 0 when either vector is zero.
inline double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

inline void normalize(Vector& v) {
    const double n = norm(v);
    if (n == 0.0) return;
    for (auto& x : v) x /= n;
}

} // namespace commsense
