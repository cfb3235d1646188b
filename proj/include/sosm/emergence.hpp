#ifndef SOSM_EMERGENCE_HPP
#define SOSM_EMERGENCE_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sosm/matrix.hpp"
#include "sosm/model.hpp"

namespace sosm {

/// A simple path of non-empty cells; `hops[k]` holds the exchanges of
/// cell (systems[k], systems[k+1]).
struct DependencyChain {
    std::vector<SystemId> systems;
    std::vector<std::vector<Exchange>> hops;

    friend bool operator==(const DependencyChain&, const DependencyChain&) = default;
};

/// `8 -[8.2]-> 1 -[1.1|1.3]-> 2`
inline std::string format_chain(const DependencyChain& c) {
    std::ostringstream os;
    for (std::size_t i = 0; i < c.systems.size(); ++i) {
        if (i) {
            os << " -[";
            const auto& hop = c.hops[i - 1];
            for (std::size_t k = 0; k < hop.size(); ++k) os << (k ? "|" : "") << hop[k].label;
            os << "]-> ";
        }
        os << c.systems[i];
    }
    return os.str();
}

/// All simple paths source -> target of at most `max_hops` hops, in
/// lexicographic order of their id sequences.
inline std::vector<DependencyChain> emergent_paths(const CouplingMatrix& m, SystemId source, SystemId target,
                                                   int max_hops) {
    if (source == target) throw QueryError("source and target must differ");
    if (!m.contains(source)) throw QueryError("unknown system id " + std::to_string(source));
    if (!m.contains(target)) throw QueryError("unknown system id " + std::to_string(target));
    if (max_hops < 1) throw QueryError("max_hops must be at least 1");

    std::vector<DependencyChain> out;
    std::vector<SystemId> path{source};
    std::set<SystemId> on_path{source};

    // successors() is ascending, so depth-first order is lexicographic.
    auto dfs = [&](auto&& self, SystemId at) -> void {
        if (static_cast<int>(path.size()) - 1 >= max_hops) return;
        for (auto next : m.successors(at)) {
            if (on_path.count(next)) continue;
            path.push_back(next);
            if (next == target) {
                DependencyChain c;
                c.systems = path;
                for (std::size_t i = 1; i < path.size(); ++i) {
                    auto cell = m.cell(path[i - 1], path[i]);
                    c.hops.emplace_back(cell.begin(), cell.end());
                }
                out.push_back(std::move(c));
            } else {
                on_path.insert(next);
                self(self, next);
                on_path.erase(next);
            }
            path.pop_back();
        }
    };
    dfs(dfs, source);
    return out;
}

/// Strongly connected components (iterative Tarjan), each sorted, listed by
/// smallest member.
inline std::vector<std::vector<SystemId>> strongly_connected_components(const CouplingMatrix& m) {
    std::map<SystemId, int> index, low;
    std::set<SystemId> on_stack;
    std::vector<SystemId> stack;
    std::vector<std::vector<SystemId>> comps;
    int counter = 0;

    auto ids = m.order();
    std::sort(ids.begin(), ids.end());
    for (auto root : ids) {
        if (index.count(root)) continue;
        // frame: node and position in its successor list
        std::vector<std::pair<SystemId, std::size_t>> frames;
        std::map<SystemId, std::vector<SystemId>> succ_cache;
        auto enter = [&](SystemId v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            on_stack.insert(v);
            succ_cache[v] = m.successors(v);
            frames.emplace_back(v, 0);
        };
        enter(root);
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            const auto& succ = succ_cache[v];
            if (pos < succ.size()) {
                auto w = succ[pos++];
                if (!index.count(w)) {
                    enter(w);
                } else if (on_stack.count(w)) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            SystemId done = v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
            if (low[done] == index[done]) {
                std::vector<SystemId> comp;
                SystemId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack.erase(w);
                    comp.push_back(w);
                } while (w != done);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
        }
    }
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

struct ConnectivityIndex {
    std::size_t in_cells = 0;
    std::size_t out_cells = 0;
    std::size_t in_instances = 0;
    std::size_t out_instances = 0;
    std::size_t total_instances = 0;

    friend bool operator==(const ConnectivityIndex&, const ConnectivityIndex&) = default;
};

inline ConnectivityIndex connectivity_index(const CouplingMatrix& m, SystemId system) {
    if (!m.contains(system)) throw QueryError("unknown system id " + std::to_string(system));
    ConnectivityIndex ci;
    for (const auto& [key, xs] : m.cells()) {
        if (key.first == system) {
            ++ci.out_cells;
            ci.out_instances += xs.size();
        }
        if (key.second == system) {
            ++ci.in_cells;
            ci.in_instances += xs.size();
        }
    }
    ci.total_instances = ci.in_instances + ci.out_instances;
    return ci;
}

struct CapabilityStatus {
    std::string name;
    std::vector<SystemId> path;
    std::optional<CellKey> broken_at; // first hop with an empty cell

    bool intact() const { return !broken_at; }
};

inline std::vector<CapabilityStatus> check_capabilities(const SosModel& model, const CouplingMatrix& m) {
    std::vector<CapabilityStatus> out;
    for (const auto& c : model.capabilities) {
        CapabilityStatus st{c.name, c.path, std::nullopt};
        for (std::size_t k = 1; k < c.path.size(); ++k) {
            if (!m.has_cell(c.path[k - 1], c.path[k])) {
                st.broken_at = CellKey{c.path[k - 1], c.path[k]};
                break;
            }
        }
        out.push_back(std::move(st));
    }
    return out;
}

} // namespace sosm

#endif
