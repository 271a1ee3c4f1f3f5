#pragma once

#include <cstddef>

#include "ringcoord/geometry.hpp"

namespace ringcoord {

/// Neighbor counts a node gathered during initialization: neighbors one ring
/// in (n-1), in its own ring (n) and one ring out (n+1). For ring-1 nodes the
/// sink counts as one inner neighbor, so count_inner >= 1 for any node the
/// protocol initialized.
struct NeighborCensus {
    int ring = 1;
    int count_inner = 0;
    int count_same = 0;
    int count_outer = 0;

    int total() const { return count_inner + count_same + count_outer; }
};

/// Outcome of mapping a census onto the theoretical curve.
/// coordinate = (ring-1)*R + matched_offset + scaled_distance, with
/// 0 <= scaled_distance < delta_offset, so coordinates of ring-n nodes stay
/// inside [(n-1)*R, n*R).
struct MappingResult {
    double matched_offset = 0.0;
    double projection_distance = 0.0;  // Euclidean distance in fraction space
    double scaled_distance = 0.0;      // projection_distance scaled to a length
    double coordinate = 0.0;
};

/// Neighbor percentages per ring; lives on the same simplex plane as the
/// theoretical area fractions.
AreaFractions census_fractions(const NeighborCensus& census);

struct CurveMatch {
    std::size_t entry_index = 0;
    double offset = 0.0;
    double distance = 0.0;
};

/// Nearest table entry in (frac_a, frac_b, frac_c) space. Inputs slightly off
/// the simplex are renormalized by their component sum first. Ties go to the
/// smaller offset.
CurveMatch project_to_curve(const AreaFractions& point, const OffsetTable& table);

/// Full census -> coordinate mapping. The projection distance is scaled by
/// (1 - 1e-9) * min(delta_offset, R - matched_offset) / sqrt(2): sqrt(2)
/// bounds the simplex diameter, so the added length always stays below the
/// gap to the next table offset and below the ring boundary. Distinct table
/// entries therefore can never merge into one coordinate.
MappingResult assign_coordinate(const NeighborCensus& census, const OffsetTable& table,
                                double radio_range);

}  // namespace ringcoord
