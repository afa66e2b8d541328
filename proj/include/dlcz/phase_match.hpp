#pragma once

#include <cmath>

#include "dlcz/errors.hpp"

namespace dlcz::optics {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    bool operator==(const Vec3&) const = default;
};

[[nodiscard]] inline double norm(const Vec3& v) {
    return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
}

[[nodiscard]] inline bool finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Wave vectors of the three driving/scattered fields for one channel.
struct WaveVectorSet {
    Vec3 k_write;
    Vec3 k_stokes;
    Vec3 k_read;
};

/// Momentum stored in the ensemble by a write/Stokes event.
[[nodiscard]] inline Vec3 spinwave_wavevector(const WaveVectorSet& w) {
    if (!finite(w.k_write) || !finite(w.k_stokes)) {
        throw DomainError("spinwave_wavevector: wave vectors must be finite");
    }
    return w.k_write - w.k_stokes;
}

/// Emission direction selected on readout: k_as = k_write - k_stokes + k_read.
/// A read beam counter-propagating with the write beam therefore sends the
/// retrieved photon back along -k_stokes.
[[nodiscard]] inline Vec3 antistokes_wavevector(const WaveVectorSet& w) {
    if (!finite(w.k_write) || !finite(w.k_stokes) || !finite(w.k_read)) {
        throw DomainError("antistokes_wavevector: wave vectors must be finite");
    }
    return w.k_write - w.k_stokes + w.k_read;
}

} // namespace dlcz::optics
