#include "weave/assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "weave/embed.hpp"

namespace weave::assign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Successive shortest augmenting paths on the unit-capacity flow network
// source -> rows -> cols -> sink, with Johnson potentials so Dijkstra sees
// non-negative reduced costs. Each augmentation raises cardinality by one
// and is cost-optimal for that cardinality; the loop stops when the sink
// becomes unreachable, which is exactly maximum cardinality.
class FlowSolver {
public:
    FlowSolver(const CostMatrix& m, double shift)
        : rows_(m.rows), cols_(m.cols), node_count_(m.rows + m.cols + 2) {
        graph_.resize(node_count_);
        for (std::size_t r = 0; r < rows_; ++r) {
            add_edge(source(), row_node(r), 0.0);
        }
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                if (m.feasible_at(r, c)) {
                    add_edge(row_node(r), col_node(c), m.cost_at(r, c) - shift);
                }
            }
        }
        for (std::size_t c = 0; c < cols_; ++c) {
            add_edge(col_node(c), sink(), 0.0);
        }
    }

    void run() {
        std::vector<double> pi(node_count_, 0.0);
        std::vector<double> dist(node_count_);
        std::vector<char> visited(node_count_);
        std::vector<int> prev_node(node_count_);
        std::vector<int> prev_edge(node_count_);

        while (true) {
            std::fill(dist.begin(), dist.end(), kInf);
            std::fill(visited.begin(), visited.end(), 0);
            dist[source()] = 0.0;

            // Dense Dijkstra; ascending scans keep tie resolution deterministic.
            while (true) {
                int u = -1;
                for (int v = 0; v < node_count_; ++v) {
                    if (!visited[v] && dist[v] < kInf && (u < 0 || dist[v] < dist[u])) {
                        u = v;
                    }
                }
                if (u < 0) break;
                visited[u] = 1;
                for (std::size_t k = 0; k < graph_[u].size(); ++k) {
                    const Edge& e = graph_[u][k];
                    if (e.capacity == 0) continue;
                    // Rounding can push a reduced cost a hair below zero.
                    double w = std::max(0.0, e.cost + pi[u] - pi[e.to]);
                    if (dist[u] + w < dist[e.to]) {
                        dist[e.to] = dist[u] + w;
                        prev_node[e.to] = u;
                        prev_edge[e.to] = static_cast<int>(k);
                    }
                }
            }

            if (dist[sink()] == kInf) break;
            for (int v = 0; v < node_count_; ++v) {
                if (dist[v] < kInf) pi[v] += dist[v];
            }
            for (int v = sink(); v != source(); v = prev_node[v]) {
                Edge& e = graph_[prev_node[v]][prev_edge[v]];
                e.capacity -= 1;
                graph_[v][e.reverse_index].capacity += 1;
            }
        }
    }

    // Saturated row->col edges are the matching.
    std::vector<std::pair<std::size_t, std::size_t>> matched_pairs() const {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t r = 0; r < rows_; ++r) {
            for (const Edge& e : graph_[row_node(r)]) {
                if (e.to >= col_node(0) && e.to < sink() && e.capacity == 0) {
                    pairs.emplace_back(r, static_cast<std::size_t>(e.to) - rows_ - 1);
                }
            }
        }
        return pairs;
    }

private:
    struct Edge {
        int to;
        int capacity;
        double cost;
        int reverse_index;
    };

    int source() const { return 0; }
    int row_node(std::size_t r) const { return static_cast<int>(r) + 1; }
    int col_node(std::size_t c) const { return static_cast<int>(rows_ + c) + 1; }
    int sink() const { return static_cast<int>(rows_ + cols_) + 1; }

    void add_edge(int from, int to, double cost) {
        graph_[from].push_back({to, 1, cost, static_cast<int>(graph_[to].size())});
        graph_[to].push_back({from, 0, -cost, static_cast<int>(graph_[from].size()) - 1});
    }

    std::size_t rows_;
    std::size_t cols_;
    int node_count_;
    std::vector<std::vector<Edge>> graph_;
};

}  // namespace

CostMatrix build_cost_matrix(std::span<const Observation> entries,
                             std::span<const Observation> exits,
                             const ZoneConfig& zone_in) {
    ZoneConfig zone = validated(zone_in);
    CostMatrix m;
    m.rows = entries.size();
    m.cols = exits.size();
    std::size_t cells = m.rows * m.cols;
    m.cost.assign(cells, 0.0);
    m.feasible.assign(cells, 0);
    m.appearance_cost.assign(cells, 0.0);
    m.time_cost.assign(cells, 0.0);
    if (cells == 0) return m;

    std::vector<EmbeddingVector> entry_embeddings(m.rows);
    std::vector<EmbeddingVector> exit_embeddings(m.cols);
    for (std::size_t i = 0; i < m.rows; ++i) entry_embeddings[i] = entries[i].embedding;
    for (std::size_t j = 0; j < m.cols; ++j) exit_embeddings[j] = exits[j].embedding;
    embed::SimilarityMatrix sim = embed::similarity_matrix(entry_embeddings, exit_embeddings);

    double t_a = expected_travel_time(zone);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const Observation& entry = entries[i];
        for (std::size_t j = 0; j < m.cols; ++j) {
            const Observation& exit = exits[j];
            std::size_t k = i * m.cols + j;
            double s = sim.at(i, j);
            double dt = exit.timestamp_s - entry.timestamp_s;

            bool ok = entry.vehicle_class == exit.vehicle_class &&
                      entry.timestamp_s < exit.timestamp_s &&
                      s >= zone.tau &&
                      dt >= t_a - zone.delta_s && dt <= t_a + zone.delta_s;

            double appearance = 1.0 - s;
            double time_term = zone.time_term == TimeTerm::Deviation ? std::abs(dt - t_a)
                                                                     : std::abs(dt + t_a);
            m.feasible[k] = ok ? 1 : 0;
            m.appearance_cost[k] = appearance;
            m.time_cost[k] = time_term;
            m.cost[k] = zone.w1 * appearance + zone.w2 * time_term;
        }
    }
    return m;
}

Assignment solve_assignment(const CostMatrix& m) {
    Assignment result;
    if (m.rows == 0 || m.cols == 0) return result;

    // A negative cost cannot come out of build_cost_matrix, but hand-built
    // matrices may carry one; shifting every feasible cell by the same
    // amount leaves the argmin unchanged at fixed cardinality.
    double min_cost = 0.0;
    bool any_feasible = false;
    for (std::size_t k = 0; k < m.cost.size(); ++k) {
        if (m.feasible[k]) {
            any_feasible = true;
            min_cost = std::min(min_cost, m.cost[k]);
        }
    }
    if (!any_feasible) return result;

    FlowSolver solver(m, min_cost);
    solver.run();
    result.pairs = solver.matched_pairs();
    std::sort(result.pairs.begin(), result.pairs.end());

    double objective = 0.0;
    for (const auto& [r, c] : result.pairs) {
        objective += m.cost_at(r, c);
    }
    result.objective = objective;
    return result;
}

std::vector<MatchedPair> extract_matches(const Assignment& a,
                                         const CostMatrix& m,
                                         std::span<const Observation> entries,
                                         std::span<const Observation> exits) {
    if (entries.size() != m.rows || exits.size() != m.cols) {
        raise(ErrorCode::IndexOutOfRange,
              "cost matrix is " + std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                  " but observation lists are " + std::to_string(entries.size()) + "/" +
                  std::to_string(exits.size()));
    }

    struct Item {
        double timestamp;
        MatchedPair pair;
    };
    std::vector<Item> items;
    items.reserve(a.pairs.size());
    for (const auto& [r, c] : a.pairs) {
        if (r >= m.rows || c >= m.cols) {
            raise(ErrorCode::IndexOutOfRange,
                  "assignment pair (" + std::to_string(r) + ", " + std::to_string(c) +
                      ") outside matrix");
        }
        MatchedPair p;
        p.entry_track = entries[r].track_id;
        p.exit_track = exits[c].track_id;
        p.total_cost = m.cost_at(r, c);
        p.appearance_cost = m.appearance_at(r, c);
        p.time_cost = m.time_at(r, c);
        p.similarity = std::clamp(1.0 - p.appearance_cost, -1.0, 1.0);
        items.push_back({entries[r].timestamp_s, std::move(p)});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.pair.entry_track < b.pair.entry_track;
    });

    std::vector<MatchedPair> out;
    out.reserve(items.size());
    for (Item& item : items) out.push_back(std::move(item.pair));
    return out;
}

std::vector<MatchedPair> match_zone(std::span<const Observation> entries,
                                    std::span<const Observation> exits,
                                    const ZoneConfig& zone_in) {
    ZoneConfig zone = validated(zone_in);
    if (entries.empty() || exits.empty()) return {};

    auto canonical = [](const Observation& a, const Observation& b) {
        if (a.timestamp_s != b.timestamp_s) return a.timestamp_s < b.timestamp_s;
        return a.track_id < b.track_id;
    };
    std::vector<Observation> es(entries.begin(), entries.end());
    std::vector<Observation> xs(exits.begin(), exits.end());
    std::sort(es.begin(), es.end(), canonical);
    std::sort(xs.begin(), xs.end(), canonical);

    double t_a = expected_travel_time(zone);
    double delta = zone.delta_s;
    double t0 = es.front().timestamp_s;

    // Only windows that contain at least one entry; each entry lands in at
    // most two consecutive windows of width 2*delta stepped by delta.
    std::vector<long long> window_ids;
    for (const Observation& e : es) {
        long long k = static_cast<long long>(std::floor((e.timestamp_s - t0) / delta));
        if (k > 0) window_ids.push_back(k - 1);
        window_ids.push_back(k);
    }
    std::sort(window_ids.begin(), window_ids.end());
    window_ids.erase(std::unique(window_ids.begin(), window_ids.end()), window_ids.end());

    std::vector<char> entry_used(es.size(), 0);
    std::vector<char> exit_used(xs.size(), 0);

    struct Item {
        double timestamp;
        MatchedPair pair;
    };
    std::vector<Item> collected;

    auto lower_by_time = [](const std::vector<Observation>& v, double t) {
        return std::lower_bound(v.begin(), v.end(), t, [](const Observation& o, double x) {
            return o.timestamp_s < x;
        });
    };

    for (long long k : window_ids) {
        double lo = t0 + static_cast<double>(k) * delta;
        double hi = lo + 2.0 * delta;

        std::vector<std::size_t> entry_index;
        for (auto it = lower_by_time(es, lo); it != es.end() && it->timestamp_s < hi; ++it) {
            std::size_t idx = static_cast<std::size_t>(it - es.begin());
            if (!entry_used[idx]) entry_index.push_back(idx);
        }
        if (entry_index.empty()) continue;

        double xlo = lo + t_a - delta;
        double xhi = hi + t_a + delta;
        std::vector<std::size_t> exit_index;
        for (auto it = lower_by_time(xs, xlo); it != xs.end() && it->timestamp_s < xhi; ++it) {
            std::size_t idx = static_cast<std::size_t>(it - xs.begin());
            if (!exit_used[idx]) exit_index.push_back(idx);
        }
        if (exit_index.empty()) continue;

        std::vector<Observation> window_entries;
        std::vector<Observation> window_exits;
        window_entries.reserve(entry_index.size());
        window_exits.reserve(exit_index.size());
        for (std::size_t idx : entry_index) window_entries.push_back(es[idx]);
        for (std::size_t idx : exit_index) window_exits.push_back(xs[idx]);

        CostMatrix cm = build_cost_matrix(window_entries, window_exits, zone);
        Assignment sol = solve_assignment(cm);
        if (sol.pairs.empty()) continue;

        for (const auto& [r, c] : sol.pairs) {
            entry_used[entry_index[r]] = 1;
            exit_used[exit_index[c]] = 1;
        }
        std::vector<MatchedPair> matches = extract_matches(sol, cm, window_entries, window_exits);

        std::map<std::string, double> entry_time;
        for (const Observation& e : window_entries) entry_time[e.track_id] = e.timestamp_s;
        for (MatchedPair& p : matches) {
            collected.push_back({entry_time.at(p.entry_track), std::move(p)});
        }
    }

    std::sort(collected.begin(), collected.end(), [](const Item& a, const Item& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.pair.entry_track < b.pair.entry_track;
    });
    std::vector<MatchedPair> out;
    out.reserve(collected.size());
    for (Item& item : collected) out.push_back(std::move(item.pair));
    return out;
}

}  // namespace weave::assign
