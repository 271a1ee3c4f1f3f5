#include "ringcoord/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ringcoord/errors.hpp"
#include "ringcoord/numeric_io.hpp"

namespace ringcoord {

namespace {

constexpr double kPi = std::numbers::pi;

// All disk arithmetic runs at unit node radius; results scale by R^2. This
// makes the fractions a function of (n, offset/R) alone, so rescaling R and
// offset together cannot move them.
constexpr double kQuadAbsTol = 1e-8 * kPi;
constexpr int kQuadMaxDepth = 52;

void validate(const RingModelParams& params, double offset) {
    if (!(params.radio_range > 0.0)) {
        throw std::invalid_argument("radio_range must be > 0");
    }
    if (params.ring_index < 1) {
        throw std::invalid_argument("ring_index must be >= 1");
    }
    if (!(offset >= 0.0) || !(offset < params.radio_range)) {
        throw std::invalid_argument("offset must satisfy 0 <= offset < radio_range");
    }
}

template <typename F>
double adapt(const F& f, double a, double fa, double m, double fm, double b, double fb,
             double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    if (depth <= 0) {
        throw QuadratureError("adaptive quadrature failed to converge");
    }
    return adapt(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adapt(f, a, fa, m, fm, b, fb, whole, tol, kQuadMaxDepth);
}

// Intersection area of disk(origin, a) with the unit disk centered at
// (dist, 0), by integrating the overlap of the two vertical chords. The
// integrand is split at the point where the chords cross so each piece is
// smooth away from its endpoints.
double lens_area_unit(double dist, double a) {
    if (a <= 0.0) return 0.0;
    if (dist >= a + 1.0) return 0.0;      // disjoint or externally tangent
    if (dist + 1.0 <= a) return kPi;      // unit disk contained
    if (dist + a <= 1.0) return kPi * a * a;  // disk a contained

    const double lo = std::max(-a, dist - 1.0);
    const double hi = std::min(a, dist + 1.0);
    const auto overlap = [a, dist](double x) {
        const double ya2 = a * a - x * x;
        const double yb2 = 1.0 - (x - dist) * (x - dist);
        const double ya = ya2 > 0.0 ? std::sqrt(ya2) : 0.0;
        const double yb = yb2 > 0.0 ? std::sqrt(yb2) : 0.0;
        return 2.0 * std::min(ya, yb);
    };

    // Both containment branches above cover dist == 0, so dist > 0 here.
    const double cross = (a * a - 1.0 + dist * dist) / (2.0 * dist);
    double knots[3] = {lo, hi, hi};
    int nseg = 1;
    if (cross > lo && cross < hi) {
        knots[1] = cross;
        knots[2] = hi;
        nseg = 2;
    }

    double area = 0.0;
    const double span = hi - lo;
    for (int i = 0; i < nseg; ++i) {
        const double tol = kQuadAbsTol * std::max((knots[i + 1] - knots[i]) / span, 0.1);
        // Seed the adaptive pass with four panels per segment so a zero
        // sample at both ends cannot fake convergence.
        const double w = (knots[i + 1] - knots[i]) / 4.0;
        for (int j = 0; j < 4; ++j) {
            area += adaptive_simpson(overlap, knots[i] + j * w, knots[i] + (j + 1) * w,
                                     tol / 4.0);
        }
    }
    return area;
}

double area_inner_unit(int n, double off) {
    if (n == 1) return 0.0;  // the "ring 0" region is the sink point
    const double a = static_cast<double>(n - 1);
    return lens_area_unit(a + off, a);
}

double area_outer_unit(int n, double off) {
    const double a = static_cast<double>(n);
    const double dist = static_cast<double>(n - 1) + off;
    return kPi - lens_area_unit(dist, a);
}

}  // namespace

double area_inner(const RingModelParams& params, double offset) {
    validate(params, offset);
    const double r = params.radio_range;
    return r * r * area_inner_unit(params.ring_index, offset / r);
}

double area_outer(const RingModelParams& params, double offset) {
    validate(params, offset);
    const double r = params.radio_range;
    return r * r * area_outer_unit(params.ring_index, offset / r);
}

AreaFractions area_fractions(const RingModelParams& params, double offset) {
    validate(params, offset);
    const double off = offset / params.radio_range;
    double fa = area_inner_unit(params.ring_index, off) / kPi;
    double fc = area_outer_unit(params.ring_index, off) / kPi;
    const auto clamp = [](double v) {
        if (v < 0.0 && v > -1e-9) return 0.0;
        return v;
    };
    fa = clamp(fa);
    fc = clamp(fc);
    AreaFractions f;
    f.frac_a = fa;
    f.frac_c = fc;
    f.frac_b = clamp(1.0 - fa - fc);
    return f;
}

OffsetTable build_offset_table(const RingModelParams& params, double delta_offset) {
    validate(params, 0.0);
    const double r = params.radio_range;
    if (!(delta_offset > 0.0) || !(delta_offset < r)) {
        throw std::invalid_argument("delta_offset must satisfy 0 < delta < radio_range");
    }
    auto count = static_cast<std::size_t>(std::ceil(r / delta_offset));
    while (count > 1 && (count - 1) * delta_offset >= r) --count;

    OffsetTable table;
    table.ring_index = params.ring_index;
    table.radio_range = r;
    table.delta_offset = delta_offset;
    table.entries.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        OffsetTableEntry entry;
        entry.offset = static_cast<double>(k) * delta_offset;
        entry.fractions = area_fractions(params, entry.offset);
        table.entries.push_back(entry);
    }
    return table;
}

double area_inner_closed_form(const RingModelParams& params, double offset) {
    validate(params, offset);
    const int n = params.ring_index;
    if (n == 1) return 0.0;

    const double r = params.radio_range;
    const double off = offset / r;
    const double a = static_cast<double>(n - 1);
    const double d = a + off;

    // Intersection angles of the two circles, seen from the sink with the
    // node on the positive y axis.
    const double q = (a * a - 1.0 + d * d) / (2.0 * d);
    const double x = std::sqrt(std::max(0.0, a * a - q * q));
    const double theta1 = std::atan2(q, x);
    const double theta2 = std::atan2(q, -x);

    const auto antideriv = [a, d](double theta) {
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const double root = std::sqrt(std::max(0.0, 1.0 - d * d * c * c));
        return 0.5 * (a * a - 1.0) * theta + 0.5 * d * d * s * c +
               0.5 * d * (-c * root) - 0.5 * std::atan2(d * c, root);
    };
    return r * r * (antideriv(theta2) - antideriv(theta1));
}

bool closed_form_is_exact(const RingModelParams& params, double offset) {
    validate(params, offset);
    if (params.ring_index == 1) return true;  // both sides are defined as 0
    const double off = offset / params.radio_range;
    const double a = static_cast<double>(params.ring_index - 1);
    const double d = a + off;
    return d * d >= a * a + 1.0;
}

std::vector<CrossCheckRow> closed_form_cross_check(const RingModelParams& params,
                                                   double delta_offset,
                                                   double rel_tolerance) {
    const OffsetTable grid = build_offset_table(params, delta_offset);
    std::vector<CrossCheckRow> rows;
    rows.reserve(grid.entries.size());
    const double floor_area = 1e-12 * kPi * params.radio_range * params.radio_range;
    for (const auto& entry : grid.entries) {
        CrossCheckRow row;
        row.offset = entry.offset;
        row.quadrature = area_inner(params, entry.offset);
        row.closed_form = area_inner_closed_form(params, entry.offset);
        row.rel_diff = std::abs(row.quadrature - row.closed_form) /
                       std::max(std::abs(row.quadrature), floor_area);
        row.agrees = row.rel_diff <= rel_tolerance;
        rows.push_back(row);
    }
    return rows;
}

void write_offset_table_csv(const OffsetTable& table, std::ostream& out) {
    out << "# n=" << table.ring_index << " R=" << format_double(table.radio_range)
        << " delta=" << format_double(table.delta_offset) << "\n";
    out << "offset,frac_a,frac_b,frac_c\n";
    for (const auto& entry : table.entries) {
        out << format_double(entry.offset) << ',' << format_double(entry.fractions.frac_a)
            << ',' << format_double(entry.fractions.frac_b) << ','
            << format_double(entry.fractions.frac_c) << "\n";
    }
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

}  // namespace

OffsetTable read_offset_table_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
        throw CsvFormatError("offset table: missing metadata comment line");
    }
    OffsetTable table;
    {
        std::istringstream meta(line.substr(2));
        std::string field;
        bool got_n = false, got_r = false, got_d = false;
        while (meta >> field) {
            if (field.rfind("n=", 0) == 0) {
                table.ring_index = static_cast<int>(parse_int(field.substr(2)));
                got_n = true;
            } else if (field.rfind("R=", 0) == 0) {
                table.radio_range = parse_double(field.substr(2));
                got_r = true;
            } else if (field.rfind("delta=", 0) == 0) {
                table.delta_offset = parse_double(field.substr(6));
                got_d = true;
            }
        }
        if (!got_n || !got_r || !got_d) {
            throw CsvFormatError("offset table: metadata must carry n=, R= and delta=");
        }
    }
    if (!std::getline(in, line) || line != "offset,frac_a,frac_b,frac_c") {
        throw CsvFormatError("offset table: bad header line");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_fields(line, ',');
        if (fields.size() != 4) {
            throw CsvFormatError("offset table: expected 4 fields per row");
        }
        OffsetTableEntry entry;
        entry.offset = parse_double(fields[0]);
        entry.fractions.frac_a = parse_double(fields[1]);
        entry.fractions.frac_b = parse_double(fields[2]);
        entry.fractions.frac_c = parse_double(fields[3]);
        table.entries.push_back(entry);
    }
    if (table.entries.empty()) {
        throw CsvFormatError("offset table: no entries");
    }
    return table;
}

void write_offset_table_file(const OffsetTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_offset_table_csv(table, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

OffsetTable read_offset_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return read_offset_table_csv(in);
}

}  // namespace ringcoord
