#pragma once

// Independent reference implementations the tests compare the library against.

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <optional>
#include <queue>
#include <vector>

#include "slimegate/circuit.hpp"
#include "slimegate/fields.hpp"
#include "slimegate/scene.hpp"

namespace oracle {

using slimegate::Vec2;

/// Orientation-based closed-segment intersection.
inline int orientation(Vec2 p, Vec2 q, Vec2 r) {
    const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    return v > 0 ? 1 : v < 0 ? -1 : 0;
}

inline bool on_segment(Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) && std::min(p.y, r.y) <= q.y &&
           q.y <= std::max(p.y, r.y);
}

inline bool segments_cross(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2) {
    const int o1 = orientation(p1, q1, p2);
    const int o2 = orientation(p1, q1, q2);
    const int o3 = orientation(p2, q2, p1);
    const int o4 = orientation(p2, q2, q1);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, q2, q1)) return true;
    if (o3 == 0 && on_segment(p2, p1, q2)) return true;
    if (o4 == 0 && on_segment(p2, q1, q2)) return true;
    return false;
}

/// Two-terminal resistance from the Moore-Penrose pseudo-inverse of the
/// weighted Laplacian; nullopt when the terminals are not connected.
inline std::optional<double> pinv_resistance(const slimegate::ConductiveNetwork& net, int a, int b) {
    const int n = static_cast<int>(net.nodes.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : net.edges) {
        if (e.a == e.b || !(e.conductance > 0.0)) continue;
        L(e.a, e.a) += e.conductance;
        L(e.b, e.b) += e.conductance;
        L(e.a, e.b) -= e.conductance;
        L(e.b, e.a) -= e.conductance;
        parent[root(e.a)] = root(e.b);
    }
    if (a == b) return 0.0;
    if (root(a) != root(b)) return std::nullopt;
    const Eigen::MatrixXd pinv = L.completeOrthogonalDecomposition().pseudoInverse();
    return pinv(a, a) + pinv(b, b) - pinv(a, b) - pinv(b, a);
}

/// Menger: the number of edge-disjoint a-b paths equals the smallest edge cut,
/// found here by trying every vertex bipartition.
inline int min_edge_cut(const slimegate::ConductiveNetwork& net, int a, int b) {
    const int n = static_cast<int>(net.nodes.size());
    std::vector<int> others;
    for (int v = 0; v < n; ++v) {
        if (v != a && v != b) others.push_back(v);
    }
    int best = static_cast<int>(net.edges.size());
    for (unsigned mask = 0; mask < (1u << others.size()); ++mask) {
        std::vector<char> side(n, 0);
        side[a] = 1;
        for (std::size_t i = 0; i < others.size(); ++i) side[others[i]] = (mask >> i) & 1u;
        int cut = 0;
        for (const auto& e : net.edges) {
            if (e.a != e.b && side[e.a] != side[e.b]) ++cut;
        }
        best = std::min(best, cut);
    }
    return best;
}

/// Dense matrix form of the explicit diffusion step on dish cells:
/// a' = (keep I + d L) a + s, with L the reflecting-wall Laplacian.
struct DenseDiffusion {
    std::vector<std::size_t> cells;  // grid index of each dish cell
    Eigen::MatrixXd step;
    Eigen::VectorXd source;
};

inline DenseDiffusion dense_diffusion(const slimegate::Scene& scene, const slimegate::GridSpec& spec, double coefficient,
                                      double decay) {
    DenseDiffusion out;
    std::vector<int> row(spec.size(), -1);
    for (int j = 0; j < spec.height; ++j) {
        for (int i = 0; i < spec.width; ++i) {
            const Vec2 c = spec.cell_center(i, j);
            if (c.x * c.x + c.y * c.y <= scene.dish_radius() * scene.dish_radius()) {
                row[spec.index(i, j)] = static_cast<int>(out.cells.size());
                out.cells.push_back(spec.index(i, j));
            }
        }
    }
    const int n = static_cast<int>(out.cells.size());
    const double d = std::min(coefficient * spec.cells_per_mm * spec.cells_per_mm, slimegate::kMaxDiffusionNumber);
    out.step = Eigen::MatrixXd::Identity(n, n) * (1.0 - decay);
    for (int r = 0; r < n; ++r) {
        const int i = static_cast<int>(out.cells[r] % spec.width);
        const int j = static_cast<int>(out.cells[r] / spec.width);
        const int di[4] = {-1, 1, 0, 0};
        const int dj[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
            const int ni = i + di[k];
            const int nj = j + dj[k];
            if (ni < 0 || nj < 0 || ni >= spec.width || nj >= spec.height) continue;
            const int c = row[spec.index(ni, nj)];
            if (c < 0) continue;
            out.step(r, c) += d;
            out.step(r, r) -= d;
        }
    }
    // Bilinear split of each source over the surrounding dish cell centres.
    out.source = Eigen::VectorXd::Zero(n);
    for (const auto& s : scene.attractants) {
        const double fx = (s.center.x - spec.origin.x) * spec.cells_per_mm - 0.5;
        const double fy = (s.center.y - spec.origin.y) * spec.cells_per_mm - 0.5;
        const int i0 = static_cast<int>(std::floor(fx));
        const int j0 = static_cast<int>(std::floor(fy));
        std::vector<std::pair<int, double>> parts;
        double total = 0.0;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const double w = (a ? fx - i0 : 1.0 - (fx - i0)) * (b ? fy - j0 : 1.0 - (fy - j0));
                const int i = i0 + a;
                const int j = j0 + b;
                if (w <= 0.0 || i < 0 || j < 0 || i >= spec.width || j >= spec.height) continue;
                const int r = row[spec.index(i, j)];
                if (r < 0) continue;
                parts.emplace_back(r, w);
                total += w;
            }
        }
        for (const auto& [r, w] : parts) out.source(r) += s.strength * w / total;
    }
    return out;
}

/// Union-find connectivity of thresholded trail cells: 8-neighbours join, and
/// every cell under one electrode footprint joins that electrode.
inline bool flood_connected(const std::vector<double>& trail, const slimegate::GridSpec& spec,
                            const slimegate::Scene& scene, double threshold, const std::string& from,
                            const std::string& to) {
    const int n = static_cast<int>(spec.size());
    const int e = static_cast<int>(scene.electrodes.size());
    std::vector<int> parent(n + e);
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto join = [&](int x, int y) { parent[root(x)] = root(y); };
    auto on = [&](int i, int j) {
        if (i < 0 || j < 0 || i >= spec.width || j >= spec.height) return false;
        const Vec2 c = spec.cell_center(i, j);
        return c.x * c.x + c.y * c.y <= scene.dish_radius() * scene.dish_radius() &&
               trail[spec.index(i, j)] >= threshold;
    };
    int fi = -1;
    int ti = -1;
    for (int k = 0; k < e; ++k) {
        if (scene.electrodes[k].id == from) fi = n + k;
        if (scene.electrodes[k].id == to) ti = n + k;
    }
    if (fi < 0 || ti < 0) return false;
    for (int j = 0; j < spec.height; ++j) {
        for (int i = 0; i < spec.width; ++i) {
            if (!on(i, j)) continue;
            const int k = static_cast<int>(spec.index(i, j));
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if ((di || dj) && on(i + di, j + dj)) join(k, static_cast<int>(spec.index(i + di, j + dj)));
                }
            }
            for (int x = 0; x < e; ++x) {
                if (scene.electrodes[x].footprint().contains(spec.cell_center(i, j))) join(k, n + x);
            }
        }
    }
    return root(fi) == root(ti);
}

}  // namespace oracle
