#include "ringcoord/mapper.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ringcoord/errors.hpp"

namespace ringcoord {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kScaleMargin = 1.0 - 1e-9;

}  // namespace

AreaFractions census_fractions(const NeighborCensus& census) {
    if (census.count_inner < 0 || census.count_same < 0 || census.count_outer < 0) {
        throw std::invalid_argument("census counts must be non-negative");
    }
    const int total = census.total();
    if (total == 0) {
        throw EmptyCensusError("census has no neighbors");
    }
    AreaFractions f;
    f.frac_a = static_cast<double>(census.count_inner) / total;
    f.frac_b = static_cast<double>(census.count_same) / total;
    f.frac_c = static_cast<double>(census.count_outer) / total;
    return f;
}

CurveMatch project_to_curve(const AreaFractions& point, const OffsetTable& table) {
    if (table.entries.empty()) {
        throw std::invalid_argument("offset table is empty");
    }
    if (point.frac_a < 0.0 || point.frac_b < 0.0 || point.frac_c < 0.0) {
        throw std::invalid_argument("fractions must be non-negative");
    }
    const double sum = point.frac_a + point.frac_b + point.frac_c;
    if (!(sum > 0.0)) {
        throw std::invalid_argument("fractions must have a positive sum");
    }
    const double pa = point.frac_a / sum;
    const double pb = point.frac_b / sum;
    const double pc = point.frac_c / sum;

    CurveMatch best;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        const AreaFractions& e = table.entries[i].fractions;
        const double da = pa - e.frac_a;
        const double db = pb - e.frac_b;
        const double dc = pc - e.frac_c;
        const double d2 = da * da + db * db + dc * dc;
        if (d2 < best_d2) {
            best_d2 = d2;
            best.entry_index = i;
            best.offset = table.entries[i].offset;
        }
    }
    best.distance = std::sqrt(best_d2);
    return best;
}

MappingResult assign_coordinate(const NeighborCensus& census, const OffsetTable& table,
                                double radio_range) {
    if (!(radio_range > 0.0)) {
        throw std::invalid_argument("radio_range must be > 0");
    }
    if (census.ring < 1) {
        throw std::invalid_argument("census ring must be >= 1");
    }
    const CurveMatch match = project_to_curve(census_fractions(census), table);

    // The last table offset can sit closer than delta to the ring boundary
    // when delta does not divide R; cap the scale there so the coordinate
    // stays inside the ring either way.
    const double gap = std::min(table.delta_offset, radio_range - match.offset);
    const double scale = kScaleMargin * gap / kSqrt2;

    MappingResult result;
    result.matched_offset = match.offset;
    result.projection_distance = match.distance;
    result.scaled_distance = scale * match.distance;
    result.coordinate = (census.ring - 1) * radio_range + match.offset + result.scaled_distance;
    return result;
}

}  // namespace ringcoord
