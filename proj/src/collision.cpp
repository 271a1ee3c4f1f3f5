#include "ringcoord/collision.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "ringcoord/errors.hpp"
#include "ringcoord/numeric_io.hpp"

namespace ringcoord {

long long coordinate_space_size(int k) {
    if (k < 1) {
        throw std::invalid_argument("coordinate_space_size requires k >= 1");
    }
    return static_cast<long long>(k) * (k + 1) / 2;
}

double expected_collisions(int k) {
    if (k < 2) {
        throw std::invalid_argument("expected_collisions requires k >= 2");
    }
    return static_cast<double>(k - 1) / static_cast<double>(k + 1);
}

namespace {

std::uint64_t coordinate_key(double coord, const CollisionOptions& options) {
    if (options.quantize_digits) {
        const double scale = std::pow(10.0, *options.quantize_digits);
        return static_cast<std::uint64_t>(std::llround(coord * scale));
    }
    return std::bit_cast<std::uint64_t>(coord);
}

}  // namespace

std::vector<long long> collisions_seen(const Adjacency& adj,
                                       const std::vector<double>& coords,
                                       const CollisionOptions& options) {
    if (coords.size() != adj.size()) {
        throw MissingCoordinateError("coordinate vector size does not match vertex count");
    }
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (std::isnan(coords[i])) {
            throw MissingCoordinateError("node " + std::to_string(i) + " has no coordinate");
        }
    }
    std::vector<long long> result(adj.size(), 0);
    std::unordered_map<std::uint64_t, long long> counts;
    for (std::size_t i = 0; i < adj.size(); ++i) {
        counts.clear();
        for (int nb : adj[i]) {
            ++counts[coordinate_key(coords[static_cast<std::size_t>(nb)], options)];
        }
        long long pairs = 0;
        for (const auto& [key, m] : counts) {
            pairs += m * (m - 1) / 2;
        }
        result[i] = pairs;
    }
    return result;
}

CollisionReport bucket_by_degree(const std::vector<int>& degrees,
                                 const std::vector<long long>& collisions) {
    if (degrees.size() != collisions.size()) {
        throw std::invalid_argument("degrees and collision counts must align");
    }
    struct Acc {
        long long n = 0;
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    std::map<int, Acc> acc;
    double total_sum = 0.0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        Acc& a = acc[degrees[i]];
        const double x = static_cast<double>(collisions[i]);
        a.n += 1;
        a.sum += x;
        a.sum_sq += x * x;
        total_sum += x;
    }
    CollisionReport report;
    report.total_samples = static_cast<long long>(degrees.size());
    report.global_mean = degrees.empty() ? 0.0 : total_sum / report.total_samples;
    for (const auto& [degree, a] : acc) {
        DegreeBucket bucket;
        bucket.degree = degree;
        bucket.samples = a.n;
        bucket.mean_collisions = a.sum / a.n;
        if (a.n >= 2) {
            const double var =
                std::max(0.0, (a.sum_sq - a.sum * a.sum / a.n) / (a.n - 1));
            bucket.ci95_half_width = 1.96 * std::sqrt(var / a.n);
        }
        bucket.low_confidence = a.n < 5;
        report.buckets.push_back(bucket);
    }
    return report;
}

CollisionReport count_collisions(const Adjacency& adj, const std::vector<double>& coords,
                                 const CollisionOptions& options) {
    const std::vector<long long> per_node = collisions_seen(adj, coords, options);
    std::vector<int> degrees(adj.size());
    for (std::size_t i = 0; i < adj.size(); ++i) {
        degrees[i] = static_cast<int>(adj[i].size());
    }
    return bucket_by_degree(degrees, per_node);
}

void write_collision_report_csv(const CollisionReport& report, std::ostream& out) {
    out << "degree,samples,mean_collisions,ci95_half_width\n";
    for (const auto& b : report.buckets) {
        out << b.degree << ',' << b.samples << ',' << format_double(b.mean_collisions)
            << ',' << format_double(b.ci95_half_width) << "\n";
    }
}

CollisionReport read_collision_report_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "degree,samples,mean_collisions,ci95_half_width") {
        throw CsvFormatError("collision report: bad header line");
    }
    CollisionReport report;
    double total_sum = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t start = 0;
        std::vector<std::string> fields;
        while (true) {
            const std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (fields.size() != 4) {
            throw CsvFormatError("collision report: expected 4 fields per row");
        }
        DegreeBucket bucket;
        bucket.degree = static_cast<int>(parse_int(fields[0]));
        bucket.samples = parse_int(fields[1]);
        bucket.mean_collisions = parse_double(fields[2]);
        bucket.ci95_half_width = parse_double(fields[3]);
        bucket.low_confidence = bucket.samples < 5;
        report.buckets.push_back(bucket);
        report.total_samples += bucket.samples;
        total_sum += bucket.mean_collisions * bucket.samples;
    }
    if (report.total_samples > 0) {
        report.global_mean = total_sum / report.total_samples;
    }
    return report;
}

}  // namespace ringcoord
