#pragma once

#include <vector>

#include "dlcz/mode_array.hpp"
#include "dlcz/paraxial.hpp"

namespace dlcz::optics {

/// Ring layout parameters. These are engineering defaults for the loop
/// checks, not measured quantities; theta_r_deg is carried for reporting
/// only (inter-mode angle at the focus).
struct CavityGeometry {
    double focal_length = 0.15;  // all four relay lenses, metres
    double array_pitch = 2e-3;   // nearest-neighbour mode spacing at a grid
    double bd_walkoff = 0.5e-3;  // polarization-arm transverse offset
    double drift_l2_l3 = 0.30;   // collimated section between the telescopes
    double drift_l4_l1 = 0.50;   // collimated return section (both folds)
    double paraxial_bound = 0.02;
    double spacing_error = 0.0;  // extra gap between focus and first lens
    double theta_r_deg = 0.21;   // descriptive only
};

inline void validate(const CavityGeometry& g) {
    std::string problems;
    if (!(g.focal_length > 0.0)) problems += " focal_length must be positive;";
    if (!(g.array_pitch > 0.0)) problems += " array_pitch must be positive;";
    if (!(g.bd_walkoff >= 0.0)) problems += " bd_walkoff must be non-negative;";
    if (!(g.drift_l2_l3 >= 0.0)) problems += " drift_l2_l3 must be non-negative;";
    if (!(g.drift_l4_l1 >= 0.0)) problems += " drift_l4_l1 must be non-negative;";
    if (!(g.paraxial_bound > 0.0)) problems += " paraxial_bound must be positive;";
    if (!problems.empty()) throw ValidationError("cavity geometry:" + problems);
}

/// The four stations that act on the mode arrangement per loop: fold,
/// telescope, telescope (its internal fold does not re-order the grid),
/// fold. Composes to the identity.
[[nodiscard]] inline std::vector<OpticalElement> canonical_round_trip(
    double focal_length = CavityGeometry{}.focal_length) {
    return {flat_mirror(), confocal_pair(focal_length, focal_length),
            confocal_pair(focal_length, focal_length), flat_mirror()};
}

/// Unfolded loop as seen by a ray launched at the common focus, ending back
/// at the focus. Folds that merely route the beam carry no element; the two
/// in-plane folds that exchange grid columns appear as FlatMirror entries.
/// Both polarization displacers shift the V arm the same way; the telescope
/// inversion between them is what makes the arms recombine.
[[nodiscard]] inline std::vector<OpticalElement> unfolded_round_trip(
    const CavityGeometry& g) {
    validate(g);
    const double f = g.focal_length;
    const double third = g.drift_l4_l1 / 3.0;
    return {
        free_space(f + g.spacing_error),
        thin_lens(f),
        bd_combine(g.bd_walkoff),
        free_space(g.drift_l2_l3),
        thin_lens(f),
        free_space(f),
        // fold at the intermediate focus: routing only
        free_space(f),
        thin_lens(f),
        free_space(third),
        flat_mirror(),
        free_space(third),
        flat_mirror(),
        free_space(third),
        bd_split(g.bd_walkoff),
        thin_lens(f),
        free_space(f),
    };
}

/// Twelve launch rays at the focus: six grid positions, two polarization
/// arms each, ordered [1H, 1V, 2H, 2V, ...]. The collimated grid position
/// of a spatial channel maps to a launch angle of position / focal length.
[[nodiscard]] inline std::vector<Ray> launch_rays(const CavityGeometry& g) {
    validate(g);
    std::vector<Ray> rays;
    rays.reserve(12);
    for (int spatial = 0; spatial < 6; ++spatial) {
        const int row = spatial / 2;
        const int col = spatial % 2;
        const double x = (col == 0 ? -0.5 : 0.5) * g.array_pitch;
        const double y = (1 - row) * g.array_pitch;
        for (Pol pol : {Pol::H, Pol::V}) {
            Ray r;
            r.pol = pol;
            const double xa = (pol == Pol::V) ? x - g.bd_walkoff : x;
            r.theta_x = xa / g.focal_length;
            r.theta_y = y / g.focal_length;
            rays.push_back(r);
        }
    }
    return rays;
}

} // namespace dlcz::optics
