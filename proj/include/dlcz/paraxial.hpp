#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dlcz/elements.hpp"
#include "dlcz/errors.hpp"

namespace dlcz::optics {

enum class Pol : std::uint8_t { H, V };

/// Small-angle ray on the unfolded cavity axis. Lengths in metres, angles in
/// radians; path_length accumulates optical length to second order.
struct Ray {
    double x = 0.0;
    double y = 0.0;
    double theta_x = 0.0;
    double theta_y = 0.0;
    double path_length = 0.0;
    Pol pol = Pol::H;
};

inline constexpr double default_paraxial_bound = 0.01; // rad

namespace detail {

inline void check_angles(const Ray& r, double bound) {
    if (!(std::abs(r.theta_x) <= bound) || !(std::abs(r.theta_y) <= bound)) {
        throw ParaxialViolation("trace_ray: ray angle exceeds paraxial bound of " +
                                std::to_string(bound) + " rad");
    }
}

inline void drift(Ray& r, double length) {
    // Second-order arc length: the transverse velocity adds quadratically.
    r.path_length += length * (1.0 + (r.theta_x * r.theta_x + r.theta_y * r.theta_y) / 2.0);
    r.x += r.theta_x * length;
    r.y += r.theta_y * length;
}

inline void lens(Ray& r, double f) {
    // A thin lens contributes its quadratic internal path -(x^2+y^2)/(2f) in
    // addition to the angle kick; without it point-to-point imaging paths
    // would not be stationary and the loop-degeneracy check could not hold.
    r.path_length -= (r.x * r.x + r.y * r.y) / (2.0 * f);
    r.theta_x -= r.x / f;
    r.theta_y -= r.y / f;
}

inline void mirror(Ray& r) {
    r.x = -r.x;
    r.theta_x = -r.theta_x;
}

inline void displace(Ray& r, double d) {
    if (r.pol == Pol::V) r.x += d;
}

} // namespace detail

/// Propagates a ray through the element chain, enforcing the small-angle
/// bound at launch and after every element that changes direction.
[[nodiscard]] inline Ray trace_ray(Ray r, std::span<const OpticalElement> elements,
                                   double paraxial_bound = default_paraxial_bound) {
    detail::check_angles(r, paraxial_bound);
    for (const auto& e : elements) {
        switch (e.kind) {
            case ElementKind::FreeSpace:
                detail::drift(r, e.length);
                break;
            case ElementKind::ThinLens:
                detail::lens(r, e.focal_length_1);
                detail::check_angles(r, paraxial_bound);
                break;
            case ElementKind::FlatMirror:
                detail::mirror(r);
                break;
            case ElementKind::ConfocalPair:
                // Reference planes are the outer focal planes, where the map
                // is purely diagonal: (x, th) -> (-x f2/f1, -th f1/f2).
                detail::drift(r, e.focal_length_1);
                detail::lens(r, e.focal_length_1);
                detail::check_angles(r, paraxial_bound);
                detail::drift(r, e.spacing);
                detail::lens(r, e.focal_length_2);
                detail::check_angles(r, paraxial_bound);
                detail::drift(r, e.focal_length_2);
                break;
            case ElementKind::BeamDisplacerSplit:
            case ElementKind::BeamDisplacerCombine:
                detail::displace(r, e.displacement);
                break;
        }
    }
    return r;
}

[[nodiscard]] inline Ray trace_ray(Ray r, std::initializer_list<OpticalElement> elements,
                                   double paraxial_bound = default_paraxial_bound) {
    return trace_ray(r, std::span<const OpticalElement>(elements.begin(), elements.size()),
                     paraxial_bound);
}

struct PathReport {
    std::vector<double> per_mode_path;
    double max_relative_spread = 0.0;
    bool equal = false; // spread within the degeneracy tolerance
};

inline constexpr double path_degeneracy_tolerance = 1e-9;

/// Traces every launch ray around the loop and compares optical lengths.
[[nodiscard]] inline PathReport check_path_equality(
    std::span<const OpticalElement> elements, std::span<const Ray> rays,
    double paraxial_bound = default_paraxial_bound) {
    if (rays.empty()) {
        throw ValidationError("check_path_equality: no launch rays given");
    }
    PathReport report;
    report.per_mode_path.reserve(rays.size());
    for (const Ray& r : rays) {
        report.per_mode_path.push_back(trace_ray(r, elements, paraxial_bound).path_length);
    }
    const auto [lo, hi] =
        std::minmax_element(report.per_mode_path.begin(), report.per_mode_path.end());
    double mean = 0.0;
    for (double p : report.per_mode_path) mean += p;
    mean /= static_cast<double>(report.per_mode_path.size());
    report.max_relative_spread = (mean != 0.0) ? (*hi - *lo) / mean : 0.0;
    report.equal = report.max_relative_spread <= path_degeneracy_tolerance;
    return report;
}

} // namespace dlcz::optics
