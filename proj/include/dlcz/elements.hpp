#pragma once

#include <cmath>

#include "dlcz/errors.hpp"

namespace dlcz::optics {

enum class ElementKind {
    FlatMirror,
    ConfocalPair,
    BeamDisplacerSplit,
    BeamDisplacerCombine,
    FreeSpace,
    ThinLens,
};

/// One station of the ring. A ConfocalPair is lens / gap / lens with the gap
/// pinned to f1 + f2; a bare ThinLens exists so a loop can be described
/// starting from a focus that sits between the lenses of a pair.
struct OpticalElement {
    ElementKind kind = ElementKind::FreeSpace;
    double focal_length_1 = 0.0;
    double focal_length_2 = 0.0;
    double spacing = 0.0;      // ConfocalPair lens separation
    double length = 0.0;       // FreeSpace propagation distance
    double displacement = 0.0; // beam-displacer transverse walk-off
};

[[nodiscard]] inline OpticalElement flat_mirror() {
    OpticalElement e;
    e.kind = ElementKind::FlatMirror;
    return e;
}

[[nodiscard]] inline OpticalElement confocal_pair(double f1, double f2) {
    if (!(f1 > 0.0) || !(f2 > 0.0)) {
        throw ValidationError("confocal_pair: focal lengths must be positive");
    }
    OpticalElement e;
    e.kind = ElementKind::ConfocalPair;
    e.focal_length_1 = f1;
    e.focal_length_2 = f2;
    e.spacing = f1 + f2;
    return e;
}

[[nodiscard]] inline OpticalElement free_space(double length) {
    if (!(length >= 0.0) || !std::isfinite(length)) {
        throw ValidationError("free_space: length must be finite and non-negative");
    }
    OpticalElement e;
    e.kind = ElementKind::FreeSpace;
    e.length = length;
    return e;
}

[[nodiscard]] inline OpticalElement thin_lens(double f) {
    if (!(f != 0.0) || !std::isfinite(f)) {
        throw ValidationError("thin_lens: focal length must be finite and non-zero");
    }
    OpticalElement e;
    e.kind = ElementKind::ThinLens;
    e.focal_length_1 = f;
    return e;
}

[[nodiscard]] inline OpticalElement bd_split(double displacement) {
    OpticalElement e;
    e.kind = ElementKind::BeamDisplacerSplit;
    e.displacement = displacement;
    return e;
}

[[nodiscard]] inline OpticalElement bd_combine(double displacement) {
    OpticalElement e;
    e.kind = ElementKind::BeamDisplacerCombine;
    e.displacement = displacement;
    return e;
}

} // namespace dlcz::optics
