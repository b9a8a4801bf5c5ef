#include "slimegate/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

namespace slimegate {

namespace {

// Neighbour offsets, counter-clockwise from east.
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

// Footprints grow by one cell so the contact ring belongs to the electrode;
// otherwise thinning folds a wide contact into a single spine.
std::vector<int> electrode_owner(const Scene& scene, const GridSpec& spec) {
    std::vector<int> owner(spec.size(), -1);
    const Vec2 ring{2.0 * spec.cell_mm(), 2.0 * spec.cell_mm()};
    for (int j = 0; j < spec.height; ++j) {
        for (int i = 0; i < spec.width; ++i) {
            const Vec2 c = spec.cell_center(i, j);
            for (std::size_t e = 0; e < scene.electrodes.size(); ++e) {
                const Electrode& el = scene.electrodes[e];
                if (Rect{el.center, el.size + ring}.contains(c)) {
                    owner[spec.index(i, j)] = static_cast<int>(e);
                    break;
                }
            }
        }
    }
    return owner;
}

}  // namespace

std::vector<std::uint8_t> tube_mask(const Grid& trail, const CellMap& cells, double threshold) {
    std::vector<std::uint8_t> mask(trail.values.size(), 0);
    for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = cells.inside[k] && trail.values[k] >= threshold;
    return mask;
}

std::vector<std::uint8_t> thin_mask(std::vector<std::uint8_t> mask, const std::vector<std::uint8_t>& fixed, int width,
                                    int height) {
    auto at = [&](int i, int j) -> int {
        if (i < 0 || j < 0 || i >= width || j >= height) return 0;
        return mask[static_cast<std::size_t>(j) * width + i];
    };
    // Border directions: N, S, E, W.
    constexpr int kBorder[4][2] = {{0, 1}, {0, -1}, {1, 0}, {-1, 0}};
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& dir : kBorder) {
            for (int j = 0; j < height; ++j) {
                for (int i = 0; i < width; ++i) {
                    const std::size_t k = static_cast<std::size_t>(j) * width + i;
                    if (!mask[k] || fixed[k]) continue;
                    if (at(i + dir[0], j + dir[1])) continue;
                    int x[9];
                    int count = 0;
                    for (int n = 0; n < 8; ++n) {
                        x[n] = at(i + kDx[n], j + kDy[n]);
                        count += x[n];
                    }
                    x[8] = x[0];
                    if (count < 2) continue;  // keep tube ends
                    // Yokoi connectivity number for 8-connected foreground.
                    int c8 = 0;
                    for (int n = 0; n < 8; n += 2) {
                        const int a = 1 - x[n];
                        const int b = 1 - x[n + 1];
                        const int c = 1 - x[(n + 2) % 8];
                        c8 += a - a * b * c;
                    }
                    if (c8 != 1) continue;
                    mask[k] = 0;
                    changed = true;
                }
            }
        }
    }
    return mask;
}

ConductiveNetwork extract_network(const Grid& trail, const Scene& scene, double threshold,
                                  const Calibration& calibration) {
    const GridSpec& spec = trail.spec;
    const CellMap cells = CellMap::build(scene, spec);
    const std::vector<int> owner = electrode_owner(scene, spec);
    std::vector<std::uint8_t> mask = tube_mask(trail, cells, threshold);
    std::vector<std::uint8_t> fixed(mask.size(), 0);
    for (std::size_t k = 0; k < mask.size(); ++k) fixed[k] = mask[k] && owner[k] >= 0;
    const std::vector<std::uint8_t> skel = thin_mask(std::move(mask), fixed, spec.width, spec.height);

    ConductiveNetwork net;
    const int n_electrodes = static_cast<int>(scene.electrodes.size());
    for (const auto& e : scene.electrodes) net.add_node(e.id, e.center, true);

    // Vertex ids: electrodes first, then skeleton pixels outside electrodes.
    std::vector<int> pixel_vertex(skel.size(), -1);
    std::vector<std::size_t> vertex_pixel;
    for (std::size_t k = 0; k < skel.size(); ++k) {
        if (skel[k] && owner[k] < 0) {
            pixel_vertex[k] = n_electrodes + static_cast<int>(vertex_pixel.size());
            vertex_pixel.push_back(k);
        }
    }
    const int n_vertices = n_electrodes + static_cast<int>(vertex_pixel.size());
    auto is_set = [&](int i, int j) {
        return i >= 0 && j >= 0 && i < spec.width && j < spec.height && skel[spec.index(i, j)];
    };
    auto vertex_of = [&](std::size_t k) { return owner[k] >= 0 ? owner[k] : pixel_vertex[k]; };

    std::vector<std::vector<int>> adj(n_vertices);
    for (std::size_t v = 0; v < vertex_pixel.size(); ++v) {
        const std::size_t k = vertex_pixel[v];
        const int i = static_cast<int>(k % spec.width);
        const int j = static_cast<int>(k / spec.width);
        const int self = n_electrodes + static_cast<int>(v);
        for (int n = 0; n < 8; ++n) {
            const int qi = i + kDx[n];
            const int qj = j + kDy[n];
            if (!is_set(qi, qj)) continue;
            const bool diagonal = kDx[n] != 0 && kDy[n] != 0;
            // m-adjacency: a diagonal link only when no shared 4-neighbour exists.
            if (diagonal && (is_set(i + kDx[n], j) || is_set(i, j + kDy[n]))) continue;
            const int other = vertex_of(spec.index(qi, qj));
            if (other == self) continue;
            if (std::find(adj[self].begin(), adj[self].end(), other) == adj[self].end()) {
                adj[self].push_back(other);
                if (other < n_electrodes) adj[other].push_back(self);
            }
        }
    }

    auto is_node = [&](int v) { return v < n_electrodes || adj[v].size() != 2; };
    auto position = [&](int v) {
        if (v < n_electrodes) return scene.electrodes[v].center;
        const std::size_t k = vertex_pixel[v - n_electrodes];
        return spec.cell_center(static_cast<int>(k % spec.width), static_cast<int>(k / spec.width));
    };
    auto step_length = [&](int u, int v) {
        if (u < n_electrodes || v < n_electrodes) return spec.cell_mm();
        return distance(position(u), position(v));
    };
    auto trail_of = [&](int v) { return trail.values[vertex_pixel[v - n_electrodes]]; };

    std::map<int, int> net_index;  // vertex -> network node
    for (int e = 0; e < n_electrodes; ++e) net_index[e] = e;
    int junctions = 0;
    auto node_for = [&](int v) {
        auto it = net_index.find(v);
        if (it != net_index.end()) return it->second;
        const int id = net.add_node("J" + std::to_string(junctions++), position(v));
        net_index[v] = id;
        return id;
    };

    auto conductance = [&](double len, double mean_trail) {
        const double ohms = calibration.tube_resistance * (std::max(len, spec.cell_mm()) / 10.0) *
                            (calibration.tube_reference_trail / std::max(mean_trail, 1e-12));
        return 1.0 / ohms;
    };

    std::set<std::pair<int, int>> linked;
    std::vector<char> visited(n_vertices, 0);
    auto emit_chain = [&](int u, int w, const std::vector<int>& chain) {
        if (u == w) return;
        const std::pair<int, int> key{std::min(u, w), std::max(u, w)};
        auto segment = [&](int from, int to, std::size_t lo, std::size_t hi) {
            // Length and mean trail over chain[lo, hi) between `from` and `to`.
            double len = 0.0;
            double sum = 0.0;
            int prev = from;
            for (std::size_t c = lo; c < hi; ++c) {
                len += step_length(prev, chain[c]);
                sum += trail_of(chain[c]);
                prev = chain[c];
            }
            len += step_length(prev, to);
            double mean = hi > lo ? sum / static_cast<double>(hi - lo) : threshold;
            if (hi == lo) {
                if (from >= n_electrodes) mean = trail_of(from);
                else if (to >= n_electrodes) mean = trail_of(to);
            }
            net.add_edge(node_for(from), node_for(to), len, conductance(len, mean));
        };
        if (!linked.count(key)) {
            linked.insert(key);
            segment(u, w, 0, chain.size());
            return;
        }
        if (chain.empty()) return;
        // Parallel tube between the same pair: split it with a junction.
        const std::size_t mid = chain.size() / 2;
        const int m = chain[mid];
        segment(u, m, 0, mid);
        segment(m, w, mid + 1, chain.size());
    };

    for (int u = 0; u < n_vertices; ++u) {
        if (!is_node(u)) continue;
        if (u >= n_electrodes && adj[u].empty()) continue;
        for (int v : adj[u]) {
            if (is_node(v)) {
                if (u < v) emit_chain(u, v, {});
                continue;
            }
            if (visited[v]) continue;
            std::vector<int> chain{v};
            visited[v] = 1;
            int prev = u;
            int cur = v;
            int end = -1;
            while (true) {
                const int next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
                if (is_node(next)) {
                    end = next;
                    break;
                }
                if (visited[next]) break;
                visited[next] = 1;
                chain.push_back(next);
                prev = cur;
                cur = next;
            }
            if (end >= 0) emit_chain(u, end, chain);
        }
    }
    return net;
}

ConductiveNetwork extract_network(const PlasmodiumState& state, const Scene& scene, double threshold,
                                  const Calibration& calibration) {
    return extract_network(state.trail.materialize(), scene, threshold, calibration);
}

bool trail_connects(const TrailGrid& trail, const CellMap& cells, const Scene& scene, double threshold,
                    const std::string& from, const std::string& to) {
    const GridSpec& spec = trail.spec();
    const Electrode* a = scene.find_electrode(from);
    const Electrode* b = scene.find_electrode(to);
    if (a == nullptr || b == nullptr) return false;

    std::vector<std::uint8_t> seen(spec.size(), 0);
    std::vector<std::size_t> stack;
    auto on = [&](std::size_t k) { return cells.inside[k] && trail.value(k) >= threshold; };
    // Seeds every tube cell of an electrode footprint; electrodes conduct.
    auto flood_electrode = [&](const Electrode& e) {
        int i0 = 0;
        int j0 = 0;
        int i1 = 0;
        int j1 = 0;
        const Vec2 half = e.size * 0.5;
        spec.locate(e.center - half, i0, j0);
        spec.locate(e.center + half, i1, j1);
        for (int j = std::max(0, j0); j <= std::min(spec.height - 1, j1); ++j) {
            for (int i = std::max(0, i0); i <= std::min(spec.width - 1, i1); ++i) {
                const std::size_t k = spec.index(i, j);
                if (!seen[k] && on(k) && e.footprint().contains(spec.cell_center(i, j))) {
                    seen[k] = 1;
                    stack.push_back(k);
                }
            }
        }
    };
    flood_electrode(*a);
    std::vector<char> electrode_done(scene.electrodes.size(), 0);
    while (!stack.empty()) {
        const std::size_t k = stack.back();
        stack.pop_back();
        const int i = static_cast<int>(k % spec.width);
        const int j = static_cast<int>(k / spec.width);
        const Vec2 c = spec.cell_center(i, j);
        if (b->footprint().contains(c)) return true;
        for (std::size_t e = 0; e < scene.electrodes.size(); ++e) {
            if (!electrode_done[e] && scene.electrodes[e].footprint().contains(c)) {
                electrode_done[e] = 1;
                flood_electrode(scene.electrodes[e]);
            }
        }
        for (int n = 0; n < 8; ++n) {
            const int qi = i + kDx[n];
            const int qj = j + kDy[n];
            if (qi < 0 || qj < 0 || qi >= spec.width || qj >= spec.height) continue;
            const std::size_t q = spec.index(qi, qj);
            if (!seen[q] && on(q)) {
                seen[q] = 1;
                stack.push_back(q);
            }
        }
    }
    return false;
}

}  // namespace slimegate
