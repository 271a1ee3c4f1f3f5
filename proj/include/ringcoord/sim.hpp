#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ringcoord/collision.hpp"
#include "ringcoord/mapper.hpp"

namespace ringcoord {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Node deployment. Sensor ids are 0..nodes.size()-1; the sink is a separate
/// vertex and takes id nodes.size() in adjacency structures built from this
/// topology.
struct Topology {
    double width = 0.0;
    double height = 0.0;
    Point sink;
    std::vector<Point> nodes;
    std::uint64_t seed = 0;

    int sink_id() const { return static_cast<int>(nodes.size()); }
};

enum class PropagationModel { FreeSpace, LogNormalShadowing };

/// Radio link model. Free space gives the unit-disk graph of radius `range`
/// (link iff distance <= range). Log-normal shadowing draws one static,
/// symmetric dB-scale Gaussian per unordered pair:
///   rx = tx_power - reference_loss - 10*eta*log10(d/d0) + N(0, sigma)
/// and links the pair iff rx >= rx_threshold. The default threshold is
/// calibrated so the deterministic part crosses it exactly at d = range,
/// which makes sigma = 0 reproduce the unit-disk graph.
struct PropagationConfig {
    PropagationModel model = PropagationModel::FreeSpace;
    double range = 10.0;
    double path_loss_exponent = 3.0;   // eta
    double shadowing_sigma_db = 4.0;   // sigma
    double reference_distance = 1.0;   // d0
    double reference_loss_db = 40.0;   // PL(d0)
    double tx_power_db = 0.0;
    std::optional<double> rx_threshold_db;  // default: calibrated cutoff at `range`

    double effective_threshold_db() const;
};

/// Initialization protocol settings. In wave-idealized mode every
/// transmitter of a phase gets its own conceptual slot, so nothing is ever
/// lost; in contention mode transmitters draw one of slots_per_period slots
/// uniformly and same-slot packets audible at a receiver cancel out.
struct ProtocolConfig {
    enum class Mode { WaveIdealized, Contention };
    Mode mode = Mode::WaveIdealized;
    int slots_per_period = 16;
    double slot_duration = 1.0;
    double preamble_duration = 1.0;
    int max_rings = 64;
};

struct NodeOutcome {
    bool initialized = false;
    int ring = 0;               // valid when initialized
    NeighborCensus census;      // valid when initialized
    int messages_sent = 0;
    int listen_periods = 0;
};

struct SimEvent {
    double time = 0.0;
    std::string event;
    int node = 0;
    std::string detail;
};

struct SimOutcome {
    std::vector<NodeOutcome> nodes;  // per sensor, indexed by id
    bool sink_disconnected = false;
    std::vector<SimEvent> events;    // populated only when event logging is on
};

/// Uniform i.i.d. deployment over the field, bit-exactly reproducible per
/// seed.
Topology place_nodes(int count, double width, double height, Point sink,
                     std::uint64_t seed);

/// Connectivity over sensors plus sink (sink at index nodes.size()).
/// Symmetric in both propagation modes.
Adjacency build_links(const Topology& topology, const PropagationConfig& prop,
                      std::uint64_t seed);

/// Run the ring-wave initialization: the sink opens phase 0; nodes that hear
/// a packet from ring r adopt ring r+1, transmit once in their own phase and
/// count the packets heard in phases n-1, n, n+1 as their census.
SimOutcome run_initialization(const Topology& topology, const Adjacency& adj,
                              const ProtocolConfig& proto, std::uint64_t seed,
                              bool log_events = false);

/// Map every initialized node's census to a coordinate. Tables are matched
/// by ring index; nodes deeper than the deepest table fall back to it.
std::vector<std::optional<MappingResult>> compute_all_coordinates(
    const SimOutcome& outcome, const std::vector<OffsetTable>& tables,
    double radio_range);

}  // namespace ringcoord
