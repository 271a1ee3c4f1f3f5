#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace ringcoord {

/// Adjacency lists over vertex ids 0..N-1.
using Adjacency = std::vector<std::vector<int>>;

/// Number of distinct (inner, same, outer) neighbor splits for a node with
/// k neighbors, at least one of which is inner: k*(k+1)/2.
long long coordinate_space_size(int k);

/// Expected number of equal-coordinate neighbor pairs seen by a node with k
/// neighbors when coordinates are drawn uniformly over the k*(k+1)/2
/// possibilities: (k-1)/(k+1). Strictly below 1 for every finite k.
double expected_collisions(int k);

struct CollisionOptions {
    /// When set, coordinates are quantized to this many fractional digits
    /// before comparison, to study precision-induced collisions. Default is
    /// exact stored-value equality.
    std::optional<int> quantize_digits;
};

/// Per-node number of unordered neighbor pairs sharing an identical
/// coordinate. coords must have one entry per vertex; a NaN entry means the
/// vertex has no coordinate and raises MissingCoordinateError.
std::vector<long long> collisions_seen(const Adjacency& adj,
                                       const std::vector<double>& coords,
                                       const CollisionOptions& options = {});

struct DegreeBucket {
    int degree = 0;
    long long samples = 0;
    double mean_collisions = 0.0;
    double ci95_half_width = 0.0;
    bool low_confidence = false;  // fewer than 5 samples
};

struct CollisionReport {
    std::vector<DegreeBucket> buckets;  // ascending degree
    long long total_samples = 0;
    double global_mean = 0.0;
};

/// Bucket per-node collision counts by node degree; the CI half-width is the
/// normal approximation 1.96 * s / sqrt(n) from the per-bucket sample
/// variance.
CollisionReport bucket_by_degree(const std::vector<int>& degrees,
                                 const std::vector<long long>& collisions);

/// collisions_seen + bucket_by_degree over the graph's own degrees.
CollisionReport count_collisions(const Adjacency& adj, const std::vector<double>& coords,
                                 const CollisionOptions& options = {});

/// CSV with header `degree,samples,mean_collisions,ci95_half_width`.
void write_collision_report_csv(const CollisionReport& report, std::ostream& out);
CollisionReport read_collision_report_csv(std::istream& in);

}  // namespace ringcoord
