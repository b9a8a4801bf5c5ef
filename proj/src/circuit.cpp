#include "slimegate/circuit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace slimegate {

int ConductiveNetwork::find(const std::string& label) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].label == label) return static_cast<int>(i);
    }
    return -1;
}

int ConductiveNetwork::add_node(std::string label, Vec2 position, bool electrode) {
    nodes.push_back({std::move(label), position, electrode});
    return static_cast<int>(nodes.size()) - 1;
}

void ConductiveNetwork::add_edge(int a, int b, double length, double conductance) {
    edges.push_back({a, b, length, conductance});
}

namespace {

std::vector<std::vector<int>> incident_edges(const ConductiveNetwork& net) {
    std::vector<std::vector<int>> out(net.nodes.size());
    for (std::size_t e = 0; e < net.edges.size(); ++e) {
        const auto& edge = net.edges[e];
        if (edge.a == edge.b || !(edge.conductance > 0.0)) continue;
        out[edge.a].push_back(static_cast<int>(e));
        out[edge.b].push_back(static_cast<int>(e));
    }
    return out;
}

}  // namespace

Resistance network_resistance(const ConductiveNetwork& network, int from, int to) {
    const int n = static_cast<int>(network.nodes.size());
    if (from < 0 || to < 0 || from >= n || to >= n) return std::nullopt;
    if (from == to) return 0.0;

    // Restrict to the component holding `from`.
    const auto incident = incident_edges(network);
    std::vector<int> component(n, -1);
    std::vector<int> order;
    std::deque<int> queue{from};
    component[from] = 0;
    order.push_back(from);
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int e : incident[u]) {
            const auto& edge = network.edges[e];
            const int v = edge.a == u ? edge.b : edge.a;
            if (component[v] >= 0) continue;
            component[v] = static_cast<int>(order.size());
            order.push_back(v);
            queue.push_back(v);
        }
    }
    if (component[to] < 0) return std::nullopt;

    // Ground `to`; inject one ampere at `from`.
    const int m = static_cast<int>(order.size());
    std::vector<int> row(m, -1);
    int k = 0;
    for (int i = 0; i < m; ++i) {
        if (order[i] != to) row[i] = k++;
    }
    Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(k, k);
    for (const auto& edge : network.edges) {
        if (edge.a == edge.b || !(edge.conductance > 0.0)) continue;
        if (component[edge.a] < 0) continue;
        const int ra = row[component[edge.a]];
        const int rb = row[component[edge.b]];
        if (ra >= 0) laplacian(ra, ra) += edge.conductance;
        if (rb >= 0) laplacian(rb, rb) += edge.conductance;
        if (ra >= 0 && rb >= 0) {
            laplacian(ra, rb) -= edge.conductance;
            laplacian(rb, ra) -= edge.conductance;
        }
    }
    Eigen::VectorXd current = Eigen::VectorXd::Zero(k);
    const int source_row = row[component[from]];
    current(source_row) = 1.0;
    const Eigen::VectorXd potential = laplacian.partialPivLu().solve(current);
    return potential(source_row);
}

Resistance path_resistance(const ConductiveNetwork& network, const Scene& scene, const std::string& from,
                           const std::string& to) {
    if (scene.find_electrode(from) == nullptr) throw std::invalid_argument("unknown electrode '" + from + "'");
    if (scene.find_electrode(to) == nullptr) throw std::invalid_argument("unknown electrode '" + to + "'");
    const Resistance tubes = network_resistance(network, network.find(from), network.find(to));
    if (!tubes) return std::nullopt;
    double total = *tubes;
    for (const std::string& id : {from, to}) {
        const int blob = scene.blob_for_electrode(id);
        if (blob >= 0) total += scene.agar_blobs[blob].resistance;
    }
    return total;
}

OutputReading read_output(Resistance resistance, double supply_voltage, double load, double logic_threshold) {
    if (!(supply_voltage > 0.0)) throw std::invalid_argument("supply voltage must be > 0");
    if (!(load > 0.0)) throw std::invalid_argument("load must be > 0");
    OutputReading r;
    r.resistance = resistance;
    r.output_voltage = resistance ? supply_voltage * load / (load + *resistance) : 0.0;
    r.logic_level = r.output_voltage >= logic_threshold && resistance ? 1 : 0;
    return r;
}

int count_tubules(const ConductiveNetwork& network, int from, int to) {
    const int n = static_cast<int>(network.nodes.size());
    if (from < 0 || to < 0 || from >= n || to >= n || from == to) return 0;

    // Each undirected edge becomes a pair of opposite unit-capacity arcs.
    struct Arc {
        int to;
        int cap;
    };
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> out(n);
    for (const auto& e : network.edges) {
        if (e.a == e.b) continue;
        out[e.a].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({e.b, 1});
        out[e.b].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({e.a, 1});
    }

    int flow = 0;
    std::vector<int> via(n);
    while (true) {
        std::fill(via.begin(), via.end(), -1);
        std::deque<int> queue{from};
        via[from] = -2;
        while (!queue.empty() && via[to] == -1) {
            const int u = queue.front();
            queue.pop_front();
            for (int a : out[u]) {
                if (arcs[a].cap <= 0 || via[arcs[a].to] != -1) continue;
                via[arcs[a].to] = a;
                queue.push_back(arcs[a].to);
            }
        }
        if (via[to] == -1) break;
        for (int v = to; v != from;) {
            const int a = via[v];
            arcs[a].cap -= 1;
            arcs[a ^ 1].cap += 1;
            v = arcs[a ^ 1].to;
        }
        ++flow;
    }
    return flow;
}

int count_tubules(const ConductiveNetwork& network, const std::string& from, const std::string& to) {
    return count_tubules(network, network.find(from), network.find(to));
}

}  // namespace slimegate
