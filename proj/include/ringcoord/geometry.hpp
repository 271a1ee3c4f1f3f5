#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ringcoord {

/// Parameters of the theoretical ring model. Ring n covers radial distances
/// ((n-1)*R, n*R] from the sink; a node with offset delta in ring n sits at
/// distance (n-1)*R + delta, 0 <= delta < R.
struct RingModelParams {
    double radio_range = 1.0;  // R, field units, > 0
    int ring_index = 1;        // n, hop count from the sink, >= 1
};

/// Fractions of a node's radio disk overlapping ring n-1 (A), its own ring
/// n (B) and ring n+1 (C). Components are non-negative and sum to 1.
struct AreaFractions {
    double frac_a = 0.0;
    double frac_b = 0.0;
    double frac_c = 0.0;
};

struct OffsetTableEntry {
    double offset = 0.0;
    AreaFractions fractions;
};

/// Discretized theoretical curve offset -> (%A, %B, %C) for one ring.
/// Offsets run 0, delta, 2*delta, ... strictly below R; frac_a is
/// non-increasing and frac_c non-decreasing along the table.
struct OffsetTable {
    int ring_index = 1;
    double radio_range = 1.0;
    double delta_offset = 0.0;
    std::vector<OffsetTableEntry> entries;
};

/// Area of intersection between the node's radio disk and the closed disk of
/// radius (n-1)*R around the sink (the region of rings 1..n-1). Adaptive
/// quadrature; zero by definition for n = 1, where the inner region is the
/// sink point itself.
double area_inner(const RingModelParams& params, double offset);

/// Area of the node's radio disk lying strictly beyond radius n*R from the
/// sink. Same quadrature machinery against the outer boundary circle.
double area_outer(const RingModelParams& params, double offset);

/// A, B, C as fractions of pi*R^2, with B = 1 - A - C. Round-off above
/// -1e-9 is clamped to zero.
AreaFractions area_fractions(const RingModelParams& params, double offset);

/// Build the discretized curve with ceil(R/delta) entries at offsets
/// 0, delta, 2*delta, ...
OffsetTable build_offset_table(const RingModelParams& params, double delta_offset);

/// Antiderivative evaluation of the inner-overlap integral between the two
/// circle-intersection angles. Exact only when the intersection rays span
/// the whole overlap region as seen from the sink, i.e. when
/// dist^2 >= (n-1)^2*R^2 + R^2; below that it misses the two wedges next to
/// the sink-side boundary and undercounts. Kept as a cross-check, not as
/// the reference path. Returns 0 for n = 1.
double area_inner_closed_form(const RingModelParams& params, double offset);

/// True when the closed form above is exact for this offset.
bool closed_form_is_exact(const RingModelParams& params, double offset);

struct CrossCheckRow {
    double offset = 0.0;
    double quadrature = 0.0;
    double closed_form = 0.0;
    double rel_diff = 0.0;  // |quad - closed| / max(|quad|, eps)
    bool agrees = false;    // rel_diff within tolerance
};

/// Evaluate both the quadrature and the closed form on the table grid and
/// report the per-offset relative difference. Disagreements are reported,
/// never reconciled.
std::vector<CrossCheckRow> closed_form_cross_check(const RingModelParams& params,
                                                   double delta_offset,
                                                   double rel_tolerance = 1e-4);

/// CSV round-trip. Format: one comment line `# n=<n> R=<R> delta=<d>`, a
/// header `offset,frac_a,frac_b,frac_c`, then one row per entry with
/// round-trip decimal precision.
void write_offset_table_csv(const OffsetTable& table, std::ostream& out);
OffsetTable read_offset_table_csv(std::istream& in);
void write_offset_table_file(const OffsetTable& table, const std::string& path);
OffsetTable read_offset_table_file(const std::string& path);

}  // namespace ringcoord
