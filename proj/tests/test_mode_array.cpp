#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <random>
#include <vector>

#include "dlcz/cavity.hpp"
#include "dlcz/mode_array.hpp"

using dlcz::NonReproducingCavity;
using namespace dlcz::optics;

namespace {

ModeArray make_grid(std::array<std::array<ModeLabel, 2>, 3> cells) {
    ModeArray g;
    g.cell = cells;
    return g;
}

constexpr auto C1 = ModeLabel::C1;
constexpr auto C2 = ModeLabel::C2;
constexpr auto C3 = ModeLabel::C3;
constexpr auto C4 = ModeLabel::C4;
constexpr auto C5 = ModeLabel::C5;
constexpr auto C6 = ModeLabel::C6;

/// All 720 assignments of the six labels to the six grid cells.
std::vector<ModeArray> all_arrangements() {
    std::array<ModeLabel, 6> labels{C1, C2, C3, C4, C5, C6};
    std::vector<ModeArray> out;
    std::sort(labels.begin(), labels.end());
    do {
        out.push_back(make_grid({{{labels[0], labels[1]},
                                  {labels[2], labels[3]},
                                  {labels[4], labels[5]}}}));
    } while (std::next_permutation(labels.begin(), labels.end()));
    return out;
}

} // namespace

TEST_CASE("canonical grid layout is row-major C1..C6") {
    const ModeArray a = ModeArray::canonical();
    REQUIRE(a == make_grid({{{C1, C2}, {C3, C4}, {C5, C6}}}));
    REQUIRE(a.is_permutation());
}

TEST_CASE("flat mirror swaps the two grid columns") {
    const ModeArray start = ModeArray::canonical();
    const ModeArray swapped = apply_mirror(start);
    REQUIRE(swapped == make_grid({{{C2, C1}, {C4, C3}, {C6, C5}}}));
}

TEST_CASE("confocal pair rotates the grid by half a turn") {
    const ModeArray after_mirror = make_grid({{{C2, C1}, {C4, C3}, {C6, C5}}});
    const ModeArray inverted = apply_confocal(after_mirror);
    REQUIRE(inverted == make_grid({{{C5, C6}, {C3, C4}, {C1, C2}}}));

    // A second telescope stage inverts again.
    REQUIRE(apply_confocal(inverted) ==
            make_grid({{{C2, C1}, {C4, C3}, {C6, C5}}}));
}

TEST_CASE("mirror and confocal transforms are involutions and commute") {
    for (const ModeArray& a : all_arrangements()) {
        REQUIRE(apply_mirror(apply_mirror(a)) == a);
        REQUIRE(apply_confocal(apply_confocal(a)) == a);
        REQUIRE(apply_mirror(apply_confocal(a)) ==
                apply_confocal(apply_mirror(a)));
    }
}

TEST_CASE("transforms preserve the label set") {
    for (const ModeArray& a : all_arrangements()) {
        REQUIRE(apply_mirror(a).is_permutation());
        REQUIRE(apply_confocal(a).is_permutation());
    }
}

TEST_CASE("grids with repeated labels are rejected") {
    ModeArray bad = make_grid({{{C1, C1}, {C3, C4}, {C5, C6}}});
    REQUIRE_FALSE(bad.is_permutation());
}

TEST_CASE("a full round trip reproduces every starting arrangement") {
    const auto loop = canonical_round_trip();
    REQUIRE(loop.size() == 4);
    for (const ModeArray& a : all_arrangements()) {
        REQUIRE(round_trip(a, loop) == a);
    }
}

TEST_CASE("round trip through an empty element list is the identity") {
    const ModeArray a = ModeArray::canonical();
    REQUIRE(round_trip(a, {}) == a);
}

TEST_CASE("two successive mirrors also close the loop") {
    const ModeArray a = ModeArray::canonical();
    const std::vector<OpticalElement> two{flat_mirror(), flat_mirror()};
    REQUIRE(round_trip(a, two) == a);
}

TEST_CASE("a non-closing element sequence raises NonReproducingCavity") {
    const ModeArray a = ModeArray::canonical();
    const std::vector<OpticalElement> open{flat_mirror(),
                                           confocal_pair(0.15, 0.15)};
    REQUIRE_THROWS_AS(round_trip(a, open), NonReproducingCavity);
}

TEST_CASE("free space and beam displacers do not permute the grid") {
    const ModeArray a = apply_mirror(ModeArray::canonical());
    REQUIRE(apply_element(a, free_space(0.3)) == a);
    REQUIRE(apply_element(a, bd_split(5e-4)) == a);
    REQUIRE(apply_element(a, bd_combine(5e-4)) == a);
    REQUIRE(apply_element(a, thin_lens(0.15)) == a);
}

TEST_CASE("random mirror/confocal words always yield valid grids") {
    std::mt19937 gen(7);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int rep = 0; rep < 200; ++rep) {
        ModeArray a = ModeArray::canonical();
        std::vector<OpticalElement> word;
        const int len = 1 + rep % 8;
        for (int k = 0; k < len; ++k) {
            word.push_back(coin(gen) ? flat_mirror()
                                     : confocal_pair(0.1, 0.1));
        }
        for (const auto& e : word) a = apply_element(a, e);
        REQUIRE(a.is_permutation());
    }
}
