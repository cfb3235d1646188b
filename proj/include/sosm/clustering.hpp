#ifndef SOSM_CLUSTERING_HPP
#define SOSM_CLUSTERING_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sosm/matrix.hpp"
#include "sosm/model.hpp"

namespace sosm {

enum class ClusterMethod { exhaustive, greedy };

inline std::string_view to_string(ClusterMethod m) {
    return m == ClusterMethod::exhaustive ? "exhaustive" : "greedy";
}

/// Largest system count accepted by cluster_exhaustive (Bell(10) = 115975).
inline constexpr std::size_t kExhaustiveLimit = 10;

struct Clustering {
    std::vector<std::vector<SystemId>> clusters; // by smallest member, members ascending
    std::vector<SystemId> order;                 // clusters concatenated
    double cost = 0.0;
    ClusterMethod method = ClusterMethod::exhaustive;
};

namespace detail {

/// Dense instance-count matrix over the ascending id list.
struct WeightTable {
    std::vector<SystemId> ids;
    std::vector<std::vector<std::size_t>> w; // w[i][j] = instances in cell (ids[i], ids[j])

    explicit WeightTable(const CouplingMatrix& m) : ids(m.order()) {
        std::sort(ids.begin(), ids.end());
        w.assign(ids.size(), std::vector<std::size_t>(ids.size(), 0));
        for (const auto& [key, xs] : m.cells()) w[index_of(key.first)][index_of(key.second)] = xs.size();
    }

    std::size_t index_of(SystemId id) const {
        return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    }
};

inline std::vector<std::vector<SystemId>> canonical(std::vector<std::vector<SystemId>> p) {
    for (auto& c : p) std::sort(c.begin(), c.end());
    std::sort(p.begin(), p.end());
    return p;
}

inline Clustering make_clustering(std::vector<std::vector<SystemId>> clusters, double cost, ClusterMethod method) {
    Clustering c;
    c.clusters = canonical(std::move(clusters));
    for (const auto& cl : c.clusters) c.order.insert(c.order.end(), cl.begin(), cl.end());
    c.cost = cost;
    c.method = method;
    return c;
}

inline bool cost_less(double a, double b) { return a < b - 1e-9 * std::max(1.0, std::abs(b)); }

} // namespace detail

/// Intra-cluster instances cost |cluster|^pow each, inter-cluster instances
/// cost n^pow each.
inline double clustering_cost(const CouplingMatrix& m, const std::vector<std::vector<SystemId>>& partition,
                              double pow) {
    if (pow < 1.0) throw QueryError("pow must be >= 1");
    std::map<SystemId, std::size_t> cluster_of;
    for (std::size_t k = 0; k < partition.size(); ++k) {
        if (partition[k].empty()) throw QueryError("empty cluster in partition");
        for (auto id : partition[k]) {
            if (!m.contains(id)) throw QueryError("unknown system id " + std::to_string(id) + " in partition");
            if (!cluster_of.emplace(id, k).second)
                throw QueryError("system " + std::to_string(id) + " appears in two clusters");
        }
    }
    if (cluster_of.size() != m.size()) throw QueryError("partition does not cover every system");

    const double n_pow = std::pow(static_cast<double>(m.size()), pow);
    std::vector<std::size_t> intra(partition.size(), 0);
    std::size_t inter = 0;
    for (const auto& [key, xs] : m.cells()) {
        auto a = cluster_of.at(key.first), b = cluster_of.at(key.second);
        if (a == b)
            intra[a] += xs.size();
        else
            inter += xs.size();
    }
    double cost = 0.0;
    for (std::size_t k = 0; k < partition.size(); ++k)
        cost += static_cast<double>(intra[k]) * std::pow(static_cast<double>(partition[k].size()), pow);
    return cost + static_cast<double>(inter) * n_pow;
}

/// Global optimum over every set partition (restricted growth strings).
/// Ties go to the partition with more clusters, then to the
/// lexicographically smallest cluster list.
inline Clustering cluster_exhaustive(const CouplingMatrix& m, double pow = 2.0) {
    if (pow < 1.0) throw QueryError("pow must be >= 1");
    const std::size_t n = m.size();
    if (n > kExhaustiveLimit)
        throw QueryError("exhaustive clustering is limited to " + std::to_string(kExhaustiveLimit) +
                         " systems; use the greedy method");
    detail::WeightTable wt(m);
    if (n == 0) return detail::make_clustering({}, 0.0, ClusterMethod::exhaustive);

    std::vector<double> size_pow(n + 1);
    for (std::size_t s = 0; s <= n; ++s) size_pow[s] = std::pow(static_cast<double>(s), pow);

    std::vector<std::size_t> rgs(n, 0), prefix_max(n, 0);
    std::vector<std::size_t> best_rgs;
    std::size_t best_blocks = 0;
    double best_cost = 0.0;
    std::vector<std::vector<SystemId>> best_clusters;

    std::vector<std::size_t> sizes(n), intra(n);
    auto evaluate = [&] {
        std::size_t blocks = prefix_max[n - 1] + 1;
        std::fill(sizes.begin(), sizes.begin() + blocks, 0);
        std::fill(intra.begin(), intra.begin() + blocks, 0);
        std::size_t inter = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ++sizes[rgs[i]];
            for (std::size_t j = 0; j < n; ++j) {
                if (!wt.w[i][j]) continue;
                if (rgs[i] == rgs[j])
                    intra[rgs[i]] += wt.w[i][j];
                else
                    inter += wt.w[i][j];
            }
        }
        double cost = 0.0;
        for (std::size_t b = 0; b < blocks; ++b) cost += static_cast<double>(intra[b]) * size_pow[sizes[b]];
        cost += static_cast<double>(inter) * size_pow[n];

        bool better = best_rgs.empty() || detail::cost_less(cost, best_cost);
        if (!better && !detail::cost_less(best_cost, cost)) {
            if (blocks != best_blocks) {
                better = blocks > best_blocks;
            } else {
                std::vector<std::vector<SystemId>> cl(blocks);
                for (std::size_t i = 0; i < n; ++i) cl[rgs[i]].push_back(wt.ids[i]);
                better = cl < best_clusters;
            }
        }
        if (better) {
            best_rgs = rgs;
            best_blocks = blocks;
            best_cost = cost;
            best_clusters.assign(blocks, {});
            for (std::size_t i = 0; i < n; ++i) best_clusters[rgs[i]].push_back(wt.ids[i]);
        }
    };

    // Iterate restricted growth strings: rgs[0] = 0, rgs[i] <= max(rgs[0..i-1]) + 1.
    while (true) {
        evaluate();
        std::size_t i = n - 1;
        while (i > 0 && rgs[i] == prefix_max[i - 1] + 1) --i;
        if (i == 0) break;
        ++rgs[i];
        prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
        for (std::size_t k = i + 1; k < n; ++k) {
            rgs[k] = 0;
            prefix_max[k] = prefix_max[k - 1];
        }
    }
    return detail::make_clustering(std::move(best_clusters), best_cost, ClusterMethod::exhaustive);
}

/// Agglomerative descent from singletons: merge the pair with the largest
/// cost decrease until no merge decreases the cost.
inline Clustering cluster_greedy(const CouplingMatrix& m, double pow = 2.0) {
    if (pow < 1.0) throw QueryError("pow must be >= 1");
    detail::WeightTable wt(m);
    const std::size_t n = wt.ids.size();
    const double n_pow = std::pow(static_cast<double>(n), pow);

    struct Group {
        std::vector<std::size_t> members; // indices into wt.ids, ascending
        std::size_t intra = 0;
    };
    std::vector<Group> groups;
    for (std::size_t i = 0; i < n; ++i) groups.push_back({{i}, 0});

    auto between = [&](const Group& a, const Group& b) {
        std::size_t s = 0;
        for (auto i : a.members)
            for (auto j : b.members) s += wt.w[i][j] + wt.w[j][i];
        return s;
    };
    auto group_pow = [&](std::size_t size) { return std::pow(static_cast<double>(size), pow); };

    while (groups.size() > 1) {
        double best_delta = 0.0;
        std::size_t best_a = 0, best_b = 0;
        bool found = false;
        // groups stay sorted by smallest member, so the first strictly best
        // pair is the tie-break winner.
        for (std::size_t a = 0; a < groups.size(); ++a) {
            for (std::size_t b = a + 1; b < groups.size(); ++b) {
                auto cross = between(groups[a], groups[b]);
                double before = static_cast<double>(groups[a].intra) * group_pow(groups[a].members.size()) +
                                static_cast<double>(groups[b].intra) * group_pow(groups[b].members.size()) +
                                static_cast<double>(cross) * n_pow;
                double after = static_cast<double>(groups[a].intra + groups[b].intra + cross) *
                               group_pow(groups[a].members.size() + groups[b].members.size());
                double delta = after - before;
                if (detail::cost_less(delta, found ? best_delta : 0.0)) {
                    best_delta = delta;
                    best_a = a;
                    best_b = b;
                    found = true;
                }
            }
        }
        if (!found) break;
        auto cross = between(groups[best_a], groups[best_b]);
        auto& ga = groups[best_a];
        ga.intra += groups[best_b].intra + cross;
        ga.members.insert(ga.members.end(), groups[best_b].members.begin(), groups[best_b].members.end());
        std::sort(ga.members.begin(), ga.members.end());
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(best_b));
    }

    std::vector<std::vector<SystemId>> clusters;
    for (const auto& g : groups) {
        clusters.emplace_back();
        for (auto i : g.members) clusters.back().push_back(wt.ids[i]);
    }
    double cost = n == 0 ? 0.0 : clustering_cost(m, clusters, pow);
    return detail::make_clustering(std::move(clusters), cost, ClusterMethod::greedy);
}

struct ClusterLoad {
    std::size_t internal = 0; // instances with both endpoints in the cluster
    std::size_t external = 0; // instances with exactly one endpoint in the cluster
};

inline std::vector<ClusterLoad> cluster_loads(const CouplingMatrix& m, const Clustering& c) {
    std::map<SystemId, std::size_t> cluster_of;
    for (std::size_t k = 0; k < c.clusters.size(); ++k)
        for (auto id : c.clusters[k]) cluster_of[id] = k;
    std::vector<ClusterLoad> loads(c.clusters.size());
    for (const auto& [key, xs] : m.cells()) {
        auto a = cluster_of.at(key.first), b = cluster_of.at(key.second);
        if (a == b) {
            loads[a].internal += xs.size();
        } else {
            loads[a].external += xs.size();
            loads[b].external += xs.size();
        }
    }
    return loads;
}

/// `cluster 1: {1,2,4,7} (internal instances: k, external: m)` lines plus totals.
inline std::string format_clustering(const CouplingMatrix& m, const Clustering& c) {
    std::ostringstream os;
    auto loads = cluster_loads(m, c);
    for (std::size_t k = 0; k < c.clusters.size(); ++k) {
        os << "cluster " << (k + 1) << ": {";
        for (std::size_t i = 0; i < c.clusters[k].size(); ++i) os << (i ? "," : "") << c.clusters[k][i];
        os << "} (internal instances: " << loads[k].internal << ", external: " << loads[k].external << ")\n";
    }
    os << "total cost: " << c.cost << '\n';
    os << "method: " << to_string(c.method) << '\n';
    return os.str();
}

} // namespace sosm

#endif
