#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slimegate/geometry.hpp"
#include "slimegate/scene.hpp"

namespace slimegate {

struct NetworkNode {
    std::string label;  // electrode id, or J<n> for junctions
    Vec2 position;
    bool electrode = false;
    bool operator==(const NetworkNode&) const = default;
};

struct NetworkEdge {
    int a = 0;
    int b = 0;
    double length = 0.0;       // mm
    double conductance = 0.0;  // siemens
    bool operator==(const NetworkEdge&) const = default;
};

struct ConductiveNetwork {
    std::vector<NetworkNode> nodes;
    std::vector<NetworkEdge> edges;

    int find(const std::string& label) const;
    int add_node(std::string label, Vec2 position, bool electrode = false);
    void add_edge(int a, int b, double length, double conductance);
    bool operator==(const ConductiveNetwork&) const = default;
};

/// Ohms, or nullopt for an open circuit.
using Resistance = std::optional<double>;

/// Two-terminal resistance of the tube network alone (nodal analysis).
Resistance network_resistance(const ConductiveNetwork& network, int from, int to);

/// Electrode-to-electrode resistance including each terminal's agar blob in
/// series. Throws std::invalid_argument for electrodes missing from the scene.
Resistance path_resistance(const ConductiveNetwork& network, const Scene& scene, const std::string& from,
                           const std::string& to);

struct OutputReading {
    Resistance resistance;
    double output_voltage = 0.0;
    int logic_level = 0;
    int tubule_count = 0;
    bool operator==(const OutputReading&) const = default;
};

/// Voltage divider across the load. Throws std::invalid_argument unless
/// supply and load are positive.
OutputReading read_output(Resistance resistance, double supply_voltage, double load, double logic_threshold);

/// Number of edge-disjoint paths (unit-capacity max flow).
int count_tubules(const ConductiveNetwork& network, int from, int to);
int count_tubules(const ConductiveNetwork& network, const std::string& from, const std::string& to);

}  // namespace slimegate
