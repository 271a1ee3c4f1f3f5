#include "ringcoord/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "ringcoord/errors.hpp"
#include "ringcoord/numeric_io.hpp"

namespace ringcoord {

namespace {

// Explicit uniform/normal transforms instead of std::*_distribution: the
// standard leaves those algorithms unspecified, and run reproducibility is
// part of the simulator's contract.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double normal01(std::mt19937_64& rng) {
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int uniform_slot(std::mt19937_64& rng, int slots) {
    return static_cast<int>((static_cast<unsigned __int128>(rng()) *
                             static_cast<unsigned __int128>(slots)) >> 64);
}

double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

double PropagationConfig::effective_threshold_db() const {
    if (rx_threshold_db) return *rx_threshold_db;
    return tx_power_db - reference_loss_db -
           10.0 * path_loss_exponent * std::log10(range / reference_distance);
}

Topology place_nodes(int count, double width, double height, Point sink,
                     std::uint64_t seed) {
    if (count < 1) {
        throw std::invalid_argument("node count must be >= 1");
    }
    if (!(width > 0.0) || !(height > 0.0)) {
        throw std::invalid_argument("field dimensions must be positive");
    }
    if (sink.x < 0.0 || sink.x > width || sink.y < 0.0 || sink.y > height) {
        throw std::invalid_argument("sink must lie inside the field");
    }
    Topology topo;
    topo.width = width;
    topo.height = height;
    topo.sink = sink;
    topo.seed = seed;
    topo.nodes.reserve(static_cast<std::size_t>(count));
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count; ++i) {
        Point p;
        p.x = uniform01(rng) * width;
        p.y = uniform01(rng) * height;
        topo.nodes.push_back(p);
    }
    return topo;
}

Adjacency build_links(const Topology& topology, const PropagationConfig& prop,
                      std::uint64_t seed) {
    if (!(prop.range > 0.0)) {
        throw std::invalid_argument("propagation range must be > 0");
    }
    const int n = static_cast<int>(topology.nodes.size());
    const int sink = topology.sink_id();
    Adjacency adj(static_cast<std::size_t>(n) + 1);

    const auto position = [&](int id) -> const Point& {
        return id == sink ? topology.sink : topology.nodes[static_cast<std::size_t>(id)];
    };

    std::mt19937_64 rng(seed);
    const double threshold = prop.effective_threshold_db();
    for (int i = 0; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            const double d = distance(position(i), position(j));
            bool linked = false;
            if (prop.model == PropagationModel::FreeSpace) {
                linked = d <= prop.range;
            } else {
                // One static sample per unordered pair keeps links symmetric.
                const double shadow = prop.shadowing_sigma_db * normal01(rng);
                const double path = std::max(d, prop.reference_distance);
                const double rx = prop.tx_power_db - prop.reference_loss_db -
                                  10.0 * prop.path_loss_exponent *
                                      std::log10(path / prop.reference_distance) +
                                  shadow;
                linked = rx >= threshold;
            }
            if (linked) {
                adj[static_cast<std::size_t>(i)].push_back(j);
                adj[static_cast<std::size_t>(j)].push_back(i);
            }
        }
    }
    return adj;
}

SimOutcome run_initialization(const Topology& topology, const Adjacency& adj,
                              const ProtocolConfig& proto, std::uint64_t seed,
                              bool log_events) {
    const int n = static_cast<int>(topology.nodes.size());
    const int sink = topology.sink_id();
    if (adj.size() != static_cast<std::size_t>(n) + 1) {
        throw std::invalid_argument("adjacency does not match topology (sensors + sink)");
    }
    if (proto.slots_per_period < 1) {
        throw std::invalid_argument("slots_per_period must be >= 1");
    }
    if (!(proto.slot_duration > 0.0) || !(proto.preamble_duration > 0.0)) {
        throw std::invalid_argument("durations must be positive");
    }

    SimOutcome outcome;
    outcome.nodes.resize(static_cast<std::size_t>(n));
    outcome.sink_disconnected = adj[static_cast<std::size_t>(sink)].empty();

    constexpr int kUnset = -1;
    std::vector<int> ring(static_cast<std::size_t>(n) + 1, kUnset);
    ring[static_cast<std::size_t>(sink)] = 0;

    std::vector<int> tx_slot(static_cast<std::size_t>(n) + 1, -1);
    std::vector<char> is_tx(static_cast<std::size_t>(n) + 1, 0);
    std::mt19937_64 rng(seed);
    const bool contention = proto.mode == ProtocolConfig::Mode::Contention;

    double clock = 0.0;
    const auto log = [&](double time, const char* event, int node, std::string detail) {
        if (log_events) outcome.events.push_back({time, event, node, std::move(detail)});
    };

    for (int phase = 0; phase <= proto.max_rings; ++phase) {
        // A node transmits in the phase matching the ring it adopted.
        std::vector<int> transmitters;
        for (int id = 0; id <= n; ++id) {
            if (ring[static_cast<std::size_t>(id)] == phase) transmitters.push_back(id);
        }
        if (transmitters.empty()) break;

        const int slot_count =
            contention ? proto.slots_per_period : static_cast<int>(transmitters.size());
        for (std::size_t t = 0; t < transmitters.size(); ++t) {
            const int id = transmitters[t];
            tx_slot[static_cast<std::size_t>(id)] =
                contention ? uniform_slot(rng, proto.slots_per_period)
                           : static_cast<int>(t);
            is_tx[static_cast<std::size_t>(id)] = 1;
            log(clock, "preamble", id, "ring=" + std::to_string(phase));
            if (id != sink) {
                outcome.nodes[static_cast<std::size_t>(id)].messages_sent += 1;
            }
        }
        if (log_events) {
            for (const int id : transmitters) {
                const double at = clock + proto.preamble_duration +
                                  (tx_slot[static_cast<std::size_t>(id)] + 0.5) *
                                      proto.slot_duration;
                log(at, "packet", id,
                    "ring=" + std::to_string(phase) + " slot=" +
                        std::to_string(tx_slot[static_cast<std::size_t>(id)]));
            }
        }

        const double phase_end =
            clock + proto.preamble_duration + slot_count * proto.slot_duration;

        std::unordered_map<int, int> slot_hits;
        for (int id = 0; id < n; ++id) {
            NodeOutcome& node = outcome.nodes[static_cast<std::size_t>(id)];
            const int own_ring = ring[static_cast<std::size_t>(id)];

            bool awake;
            if (own_ring == kUnset) {
                // Woken by any audible preamble while still unsynchronized.
                awake = std::any_of(adj[static_cast<std::size_t>(id)].begin(),
                                    adj[static_cast<std::size_t>(id)].end(),
                                    [&](int nb) { return is_tx[static_cast<std::size_t>(nb)]; });
            } else {
                // Synchronized nodes stay for their own phase and one more.
                awake = phase <= own_ring + 1;
            }
            if (!awake) continue;
            node.listen_periods += 1;

            slot_hits.clear();
            for (const int nb : adj[static_cast<std::size_t>(id)]) {
                if (is_tx[static_cast<std::size_t>(nb)]) {
                    ++slot_hits[tx_slot[static_cast<std::size_t>(nb)]];
                }
            }
            int received = 0;
            for (const auto& [slot, hits] : slot_hits) {
                if (hits != 1) continue;  // same-slot packets cancel, no capture
                if (is_tx[static_cast<std::size_t>(id)] &&
                    slot == tx_slot[static_cast<std::size_t>(id)]) {
                    continue;  // half duplex: busy transmitting in that slot
                }
                ++received;
            }
            if (received == 0) continue;

            if (own_ring == kUnset) {
                ring[static_cast<std::size_t>(id)] = phase + 1;
                node.initialized = true;
                node.ring = phase + 1;
                node.census.ring = phase + 1;
                node.census.count_inner = received;
                log(phase_end, "sync", id, "ring=" + std::to_string(phase + 1));
            } else if (phase == own_ring) {
                node.census.count_same += received;
            } else if (phase == own_ring + 1) {
                node.census.count_outer += received;
            }
        }

        for (const int id : transmitters) {
            is_tx[static_cast<std::size_t>(id)] = 0;
            tx_slot[static_cast<std::size_t>(id)] = -1;
        }
        clock = phase_end;
    }
    return outcome;
}

std::vector<std::optional<MappingResult>> compute_all_coordinates(
    const SimOutcome& outcome, const std::vector<OffsetTable>& tables,
    double radio_range) {
    if (tables.empty()) {
        throw std::invalid_argument("at least one offset table is required");
    }
    std::unordered_map<int, const OffsetTable*> by_ring;
    const OffsetTable* deepest = &tables.front();
    for (const auto& table : tables) {
        by_ring[table.ring_index] = &table;
        if (table.ring_index > deepest->ring_index) deepest = &table;
    }

    std::vector<std::optional<MappingResult>> coords(outcome.nodes.size());
    for (std::size_t i = 0; i < outcome.nodes.size(); ++i) {
        const NodeOutcome& node = outcome.nodes[i];
        if (!node.initialized) continue;
        const auto it = by_ring.find(node.ring);
        const OffsetTable* table = nullptr;
        if (it != by_ring.end()) {
            table = it->second;
        } else if (node.ring > deepest->ring_index) {
            table = deepest;  // curve flattens with depth, reuse the deepest table
        } else {
            throw std::invalid_argument("no offset table for ring " +
                                        std::to_string(node.ring));
        }
        coords[i] = assign_coordinate(node.census, *table, radio_range);
    }
    return coords;
}

}  // namespace ringcoord
