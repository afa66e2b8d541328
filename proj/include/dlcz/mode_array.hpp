#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dlcz/elements.hpp"
#include "dlcz/errors.hpp"

namespace dlcz::optics {

enum class ModeLabel : std::uint8_t { C1, C2, C3, C4, C5, C6 };

/// 3x2 arrangement of the six spatial channels at a collimated cross-section.
/// Row 0 is the top of the array; column 0 is the in-plane negative side.
struct ModeArray {
    std::array<std::array<ModeLabel, 2>, 3> cell{};

    [[nodiscard]] static ModeArray canonical() {
        ModeArray a;
        a.cell = {{{ModeLabel::C1, ModeLabel::C2},
                   {ModeLabel::C3, ModeLabel::C4},
                   {ModeLabel::C5, ModeLabel::C6}}};
        return a;
    }

    /// True when every label appears exactly once.
    [[nodiscard]] bool is_permutation() const {
        std::array<int, 6> seen{};
        for (const auto& row : cell) {
            for (ModeLabel m : row) {
                const auto idx = static_cast<std::size_t>(m);
                if (idx >= seen.size() || seen[idx]++) return false;
            }
        }
        return true;
    }

    bool operator==(const ModeArray&) const = default;
};

/// In-plane fold: the two columns exchange, rows are untouched.
[[nodiscard]] inline ModeArray apply_mirror(const ModeArray& a) {
    ModeArray out = a;
    for (auto& row : out.cell) std::swap(row[0], row[1]);
    return out;
}

/// Relay through a telescope: the grid rotates half a turn about the axis.
[[nodiscard]] inline ModeArray apply_confocal(const ModeArray& a) {
    ModeArray out;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 2; ++c) {
            out.cell[static_cast<std::size_t>(2 - r)][static_cast<std::size_t>(1 - c)] =
                a.cell[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    return out;
}

[[nodiscard]] inline ModeArray apply_element(const ModeArray& a,
                                             const OpticalElement& e) {
    switch (e.kind) {
        case ElementKind::FlatMirror: return apply_mirror(a);
        case ElementKind::ConfocalPair: return apply_confocal(a);
        default: return a; // drift, lenses and displacers keep the labels put
    }
}

/// Applies the element sequence and checks closure: a physically usable loop
/// must hand every channel back to its starting cell.
[[nodiscard]] inline ModeArray round_trip(const ModeArray& start,
                                          std::span<const OpticalElement> elements) {
    ModeArray a = start;
    for (const auto& e : elements) a = apply_element(a, e);
    if (!(a == start)) {
        throw NonReproducingCavity(
            "round_trip: element sequence does not restore the mode arrangement");
    }
    return a;
}

} // namespace dlcz::optics
