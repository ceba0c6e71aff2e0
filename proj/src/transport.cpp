#include "poselex/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

namespace poselex {

GroundDistance::GroundDistance(LexiconPtr lexicon,
                               std::vector<std::vector<double>> matrix)
    : lexicon_(std::move(lexicon)), matrix_(std::move(matrix)) {
    if (!lexicon_) throw std::invalid_argument("ground distance needs a lexicon");
    const std::size_t n = lexicon_->size();
    if (matrix_.size() != n) {
        throw std::invalid_argument("ground matrix must be " + std::to_string(n) +
                                    "x" + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (matrix_[i].size() != n) {
            throw std::invalid_argument("ground matrix row " + std::to_string(i) +
                                        " has wrong length");
        }
        if (matrix_[i][i] != 0.0) {
            throw std::invalid_argument("ground matrix diagonal must be zero");
        }
        for (std::size_t j = 0; j < n; ++j) {
            double d = matrix_[i][j];
            if (!std::isfinite(d) || d < 0.0) {
                throw std::invalid_argument("ground distance (" + lexicon_->term(i) +
                                            ", " + lexicon_->term(j) +
                                            ") must be finite and nonnegative");
            }
            if (matrix_[j][i] != d) {
                throw std::invalid_argument("ground matrix is not symmetric at (" +
                                            lexicon_->term(i) + ", " +
                                            lexicon_->term(j) + ")");
            }
        }
    }
}

std::vector<TriangleViolation> triangle_violations(const GroundDistance& ground,
                                                   double tol) {
    std::vector<TriangleViolation> out;
    const auto& m = ground.matrix();
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || j == k) continue;
                double excess = m[i][k] - (m[i][j] + m[j][k]);
                if (excess > tol) {
                    out.push_back(TriangleViolation{i, j, k, excess});
                }
            }
        }
    }
    return out;
}

namespace {

// All-pairs hop counts on a small undirected graph.
std::vector<std::vector<int>> hop_counts(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<std::vector<int>> hops(n, std::vector<int>(n, -1));
    for (std::size_t s = 0; s < n; ++s) {
        std::queue<std::size_t> q;
        hops[s][s] = 0;
        q.push(s);
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop();
            for (std::size_t v : adj[u]) {
                if (hops[s][v] < 0) {
                    hops[s][v] = hops[s][u] + 1;
                    q.push(v);
                }
            }
        }
    }
    return hops;
}

double graded(int hops, double unit, double stretch) {
    switch (hops) {
        case 0: return 0.0;
        case 1: return unit;
        case 2: return stretch * unit;
        default: throw std::logic_error("adjacency graph has diameter > 2");
    }
}

}  // namespace

GroundDistance build_modal_ground_distance(double max_dist, double shoulder_min,
                                           double elbow_min) {
    if (!(elbow_min > 0.0) || !(elbow_min <= shoulder_min) ||
        !(shoulder_min <= max_dist)) {
        throw std::invalid_argument(
            "ground parameters must satisfy 0 < elbow_min <= shoulder_min <= max_dist");
    }
    const double part_sum = shoulder_min + elbow_min;
    if (max_dist < part_sum || max_dist > 2.0 * part_sum) {
        throw std::invalid_argument(
            "max_dist must lie in [shoulder_min + elbow_min, 2*(shoulder_min + "
            "elbow_min)] for the graded construction");
    }
    const double stretch = max_dist / part_sum;  // two-hop multiplier, in [1, 2]

    const auto arm = arm_lexicon();
    auto ai = [&](const char* t) { return arm->index_of(t); };
    // down and up are poles; rear-outside-front-inside form the azimuth ring.
    std::vector<std::pair<std::size_t, std::size_t>> arm_edges = {
        {ai("rear"), ai("outside")}, {ai("outside"), ai("front")},
        {ai("front"), ai("inside")}, {ai("inside"), ai("rear")},
    };
    for (const char* ring : {"rear", "outside", "front", "inside"}) {
        arm_edges.emplace_back(ai("down"), ai(ring));
        arm_edges.emplace_back(ai("up"), ai(ring));
    }
    const auto arm_hops = hop_counts(arm->size(), arm_edges);

    const auto forearm = forearm_lexicon();
    auto fi = [&](const char* t) { return forearm->index_of(t); };
    // Ring in vocabulary order; open and close are one hop apart.
    std::vector<std::pair<std::size_t, std::size_t>> forearm_edges = {
        {fi("open"), fi("close")},
        {fi("close"), fi("hmiddle")},
        {fi("hmiddle"), fi("vmiddle")},
        {fi("vmiddle"), fi("open")},
    };
    const auto forearm_hops = hop_counts(forearm->size(), forearm_edges);

    const auto modal = modal_posture_lexicon();
    const std::size_t n = modal->size();
    std::vector<std::vector<double>> matrix(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto ci = modal_components(i);
        for (std::size_t j = 0; j < n; ++j) {
            const auto cj = modal_components(j);
            matrix[i][j] =
                graded(arm_hops[ci.arm][cj.arm], shoulder_min, stretch) +
                graded(forearm_hops[ci.forearm][cj.forearm], elbow_min, stretch);
        }
    }
    return GroundDistance(modal, std::move(matrix));
}

namespace {

// Min-cost flow by successive shortest augmenting paths with potentials.
// Supports and demands are real masses; every augmentation drives at least
// one residual capacity to exactly zero, so the loop terminates.
class TransportSolver {
public:
    TransportSolver(const std::vector<double>& supply,
                    const std::vector<double>& demand,
                    const std::vector<std::vector<double>>& cost)
        : ns_(supply.size()), nd_(demand.size()), nodes_(ns_ + nd_ + 2) {
        source_ = ns_ + nd_;
        sink_ = source_ + 1;
        graph_.assign(nodes_, {});
        for (std::size_t i = 0; i < ns_; ++i) {
            add_edge(source_, i, supply[i], 0.0);
        }
        for (std::size_t j = 0; j < nd_; ++j) {
            add_edge(ns_ + j, sink_, demand[j], 0.0);
        }
        for (std::size_t i = 0; i < ns_; ++i) {
            for (std::size_t j = 0; j < nd_; ++j) {
                add_edge(i, ns_ + j, 2.0, cost[i][j]);  // capacity > total mass
            }
        }
    }

    void run() {
        std::vector<double> potential(nodes_, 0.0);  // costs are nonnegative
        while (true) {
            auto [dist, prev_edge] = dijkstra(potential);
            if (!std::isfinite(dist[sink_])) break;
            double amount = std::numeric_limits<double>::infinity();
            for (std::size_t v = sink_; v != source_;) {
                const Edge& e = edges_[prev_edge[v]];
                amount = std::min(amount, e.residual);
                v = e.from;
            }
            if (!(amount > 0.0)) break;
            for (std::size_t v = sink_; v != source_;) {
                Edge& e = edges_[prev_edge[v]];
                e.residual -= amount;
                edges_[prev_edge[v] ^ 1].residual += amount;
                v = e.from;
            }
            for (std::size_t v = 0; v < nodes_; ++v) {
                if (std::isfinite(dist[v])) potential[v] += dist[v];
            }
        }
    }

    // Net flow shipped on arc (i, j): the residual of the reverse edge.
    double flow(std::size_t i, std::size_t j) const {
        std::size_t base = 2 * (ns_ + nd_);  // arcs follow the supply/demand edges
        return edges_[base + 2 * (i * nd_ + j) + 1].residual;
    }

private:
    struct Edge {
        std::size_t from, to;
        double residual;
        double cost;
    };

    void add_edge(std::size_t from, std::size_t to, double capacity, double cost) {
        graph_[from].push_back(edges_.size());
        edges_.push_back(Edge{from, to, capacity, cost});
        graph_[to].push_back(edges_.size());
        edges_.push_back(Edge{to, from, 0.0, -cost});
    }

    std::pair<std::vector<double>, std::vector<std::size_t>> dijkstra(
        const std::vector<double>& potential) const {
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> dist(nodes_, inf);
        std::vector<std::size_t> prev_edge(nodes_, 0);
        std::vector<bool> done(nodes_, false);
        dist[source_] = 0.0;
        for (std::size_t round = 0; round < nodes_; ++round) {
            std::size_t u = nodes_;
            double best = inf;
            for (std::size_t v = 0; v < nodes_; ++v) {
                if (!done[v] && dist[v] < best) {
                    best = dist[v];
                    u = v;
                }
            }
            if (u == nodes_) break;
            done[u] = true;
            for (std::size_t idx : graph_[u]) {
                const Edge& e = edges_[idx];
                if (e.residual <= 0.0) continue;
                // Reduced cost; clamp the round-off that exact arithmetic
                // would make zero.
                double w = e.cost + potential[u] - potential[e.to];
                if (w < 0.0) w = 0.0;
                if (dist[u] + w < dist[e.to]) {
                    dist[e.to] = dist[u] + w;
                    prev_edge[e.to] = idx;
                }
            }
        }
        return {std::move(dist), std::move(prev_edge)};
    }

    std::size_t ns_, nd_, nodes_, source_, sink_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> graph_;
};

void check_transport_inputs(const MassVector& a, const MassVector& b,
                            const GroundDistance& ground) {
    if (!same_lexicon(a.lexicon(), b.lexicon()) ||
        !same_lexicon(a.lexicon(), ground.lexicon())) {
        throw std::invalid_argument(
            "transport requires both mass vectors and the ground distance to share "
            "one lexicon");
    }
}

}  // namespace

TransportPlan transport_plan(const MassVector& a, const MassVector& b,
                             const GroundDistance& ground) {
    check_transport_inputs(a, b, ground);

    // Solve on the strictly positive supports only.
    std::vector<std::size_t> src_terms, dst_terms;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.masses()[i] > 0.0) src_terms.push_back(i);
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (b.masses()[j] > 0.0) dst_terms.push_back(j);
    }

    std::vector<double> supply, demand;
    supply.reserve(src_terms.size());
    demand.reserve(dst_terms.size());
    for (std::size_t i : src_terms) supply.push_back(a.masses()[i]);
    for (std::size_t j : dst_terms) demand.push_back(b.masses()[j]);

    std::vector<std::vector<double>> cost(src_terms.size(),
                                          std::vector<double>(dst_terms.size()));
    for (std::size_t i = 0; i < src_terms.size(); ++i) {
        for (std::size_t j = 0; j < dst_terms.size(); ++j) {
            cost[i][j] = ground.at(src_terms[i], dst_terms[j]);
        }
    }

    TransportSolver solver(supply, demand, cost);
    solver.run();

    TransportPlan plan;
    for (std::size_t i = 0; i < src_terms.size(); ++i) {
        for (std::size_t j = 0; j < dst_terms.size(); ++j) {
            double f = solver.flow(i, j);
            if (f > 0.0) {
                plan.flows.push_back(Flow{src_terms[i], dst_terms[j], f});
                plan.total_cost += f * cost[i][j];
            }
        }
    }
    return plan;
}

double transport_distance(const MassVector& a, const MassVector& b,
                          const GroundDistance& ground) {
    return transport_plan(a, b, ground).total_cost;
}

}  // namespace poselex
