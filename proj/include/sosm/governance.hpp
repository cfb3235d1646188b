#ifndef SOSM_GOVERNANCE_HPP
#define SOSM_GOVERNANCE_HPP

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sosm/emergence.hpp"
#include "sosm/matrix.hpp"
#include "sosm/model.hpp"

namespace sosm {

// ---------------------------------------------------------------------------
// Ownership and contracts

struct ContractCell {
    SystemId from = 0;
    SystemId to = 0;
    std::vector<std::string> labels;
    std::string src_owner;
    std::string dst_owner;
    ContractClass classification = ContractClass::internal;
    bool overridden = false;

    friend bool operator==(const ContractCell&, const ContractCell&) = default;
};

struct ContractMap {
    std::vector<ContractCell> cells; // sorted by (from, to)
    std::size_t internal_count = 0;
    std::size_t contract_count = 0;

    friend bool operator==(const ContractMap&, const ContractMap&) = default;
};

/// Classifies every non-empty cell: contract when the owners differ, unless
/// every exchange of the cell carries the same override.
inline ContractMap contract_map(const SosModel& model, const CouplingMatrix& m) {
    ContractMap out;
    for (const auto& [key, xs] : m.cells()) {
        ContractCell c;
        c.from = key.first;
        c.to = key.second;
        c.src_owner = model.owner_of(key.first);
        c.dst_owner = model.owner_of(key.second);
        std::set<std::optional<ContractClass>> overrides;
        for (const auto& e : xs) {
            c.labels.push_back(e.label);
            overrides.insert(e.contract_override);
        }
        if (overrides.size() > 1)
            throw ModelError("mixed contract overrides in cell (" + std::to_string(c.from) + "," +
                             std::to_string(c.to) + ")");
        if (auto ov = *overrides.begin()) {
            c.classification = *ov;
            c.overridden = true;
        } else {
            c.classification = c.src_owner == c.dst_owner ? ContractClass::internal : ContractClass::contract;
        }
        (c.classification == ContractClass::internal ? out.internal_count : out.contract_count)++;
        out.cells.push_back(std::move(c));
    }
    return out;
}

/// CSV with columns from,to,labels,src_owner,dst_owner,classification.
inline std::string contract_csv(const ContractMap& cm) {
    auto field = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        return q + '"';
    };
    std::ostringstream os;
    os << "from,to,labels,src_owner,dst_owner,classification\n";
    for (const auto& c : cm.cells) {
        std::string labels;
        for (std::size_t i = 0; i < c.labels.size(); ++i) labels += (i ? ";" : "") + c.labels[i];
        os << c.from << ',' << c.to << ',' << field(labels) << ',' << field(c.src_owner) << ','
           << field(c.dst_owner) << ',' << to_string(c.classification) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Integrator designation

struct IntegratorEntry {
    ExchangeRef exchange;
    std::size_t score = 0;
    std::string suggested_owner;

    friend bool operator==(const IntegratorEntry&, const IntegratorEntry&) = default;
};

/// Exchanges ranked by the summed connectivity of their endpoints; the
/// responsible owner is that of the more connected endpoint (source on ties).
inline std::vector<IntegratorEntry> integrator_report(const SosModel& model, const CouplingMatrix& m) {
    std::map<SystemId, std::size_t> total;
    for (auto id : m.order()) total[id] = connectivity_index(m, id).total_instances;

    std::vector<IntegratorEntry> out;
    for (const auto& e : model.exchanges) {
        auto tf = total.at(e.from), tt = total.at(e.to);
        out.push_back({e.ref(), tf + tt, model.owner_of(tt > tf ? e.to : e.from)});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.exchange < b.exchange;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Interoperability levels

struct InteropGap {
    ExchangeRef exchange;
    std::vector<InteropLevel> missing;

    friend bool operator==(const InteropGap&, const InteropGap&) = default;
};

inline std::vector<InteropGap> interop_gaps(const SosModel& model) {
    std::vector<InteropGap> out;
    for (const auto& e : model.exchanges) {
        InteropGap g{e.ref(), {}};
        for (auto l : kAllLevels)
            if (!e.levels.count(l)) g.missing.push_back(l);
        if (!g.missing.empty()) out.push_back(std::move(g));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Multinational composition

struct BridgeEnd {
    std::size_t model = 0; // index into the composed model list
    SystemId system = 0;
};

struct Bridge {
    BridgeEnd a;
    BridgeEnd b;
    std::string label;
    std::string description;
    bool bidirectional = false;
};

struct Composition {
    SosModel model;
    std::vector<std::map<SystemId, SystemId>> id_map; // per input model: old id -> new id
    std::size_t model_count = 0;
    std::size_t bridge_count = 0;
    std::size_t bridge_exchanges = 0;
    std::size_t configurations = 0;  // n^2
    std::size_t directed_pairs = 0;  // n(n-1)
};

/// Merges independent models into one. Systems are renumbered 1..N in input
/// order and renamed "<model name>.<old id>"; bridges add one exchange per
/// direction.
inline Composition compose_sos(const std::vector<SosModel>& models, const std::vector<Bridge>& bridges) {
    if (models.empty()) throw QueryError("compose requires at least one model");
    std::set<std::string> names;
    for (const auto& m : models)
        if (!names.insert(m.name).second) throw QueryError("duplicate model name \"" + m.name + "\"");

    Composition c;
    c.model_count = models.size();
    c.bridge_count = bridges.size();
    c.configurations = models.size() * models.size();
    c.directed_pairs = models.size() * (models.size() - 1);
    c.id_map.resize(models.size());

    SosModel& out = c.model;
    for (std::size_t k = 0; k < models.size(); ++k) out.name += (k ? "+" : "") + models[k].name;
    out.oim_level = 4;
    SystemId next = 1;
    for (std::size_t k = 0; k < models.size(); ++k) {
        const auto& m = models[k];
        out.oim_level = std::min(out.oim_level, m.oim_level);
        for (auto id : m.system_ids()) {
            const auto* s = m.find_system(id);
            c.id_map[k][id] = next;
            out.systems.push_back({next, m.name + "." + std::to_string(id), s->owner, s->provider});
            ++next;
        }
        const auto& ids = c.id_map[k];
        for (auto e : m.exchanges) {
            e.from = ids.at(e.from);
            e.to = ids.at(e.to);
            out.exchanges.push_back(std::move(e));
        }
        for (auto a : m.adapters) {
            a.from = ids.at(a.from);
            a.to = ids.at(a.to);
            out.adapters.push_back(std::move(a));
        }
        for (auto cap : m.capabilities) {
            cap.name = m.name + "." + cap.name;
            for (auto& id : cap.path) id = ids.at(id);
            out.capabilities.push_back(std::move(cap));
        }
    }

    auto resolve = [&](const BridgeEnd& end) {
        if (end.model >= models.size())
            throw QueryError("bridge references model #" + std::to_string(end.model) + " which does not exist");
        auto it = c.id_map[end.model].find(end.system);
        if (it == c.id_map[end.model].end())
            throw QueryError("dangling bridge endpoint " + models[end.model].name + "." + std::to_string(end.system));
        return it->second;
    };
    for (const auto& b : bridges) {
        auto from = resolve(b.a), to = resolve(b.b);
        Exchange e;
        e.label = b.label;
        e.description = b.description;
        e.from = from;
        e.to = to;
        out.exchanges.push_back(e);
        ++c.bridge_exchanges;
        if (b.bidirectional) {
            std::swap(e.from, e.to);
            out.exchanges.push_back(std::move(e));
            ++c.bridge_exchanges;
        }
    }

    auto errors = structural_errors(out);
    if (!errors.empty()) throw ModelError("composed model is invalid: " + errors.front().location + ": " +
                                          errors.front().message);
    return c;
}

// ---------------------------------------------------------------------------
// Common infrastructure

struct InfrastructureReport {
    SystemId hub_id = 0;
    std::size_t scope_size = 0;          // k
    std::size_t rerouted_instances = 0;  // in-scope exchange instances before
    std::size_t hub_links = 0;           // distinct system<->hub directed links after
    std::ptrdiff_t interface_delta = 0;  // rerouted_instances - hub_links
    std::size_t full_mesh_interfaces = 0; // k(k-1)
    std::size_t hub_interfaces = 0;       // 2k
    std::optional<std::string> warning;
};

struct InfrastructureResult {
    SosModel model;
    InfrastructureReport report;
};

/// Reroutes every exchange among `scope` through a new hub system. Each
/// rerouted exchange becomes `<label>.in` (source->hub) and `<label>.out`
/// (hub->target) with its versions, levels and adapters copied. Instances
/// that collapse onto the same (label, endpoint, hub) key are merged.
inline InfrastructureResult introduce_infrastructure(const SosModel& model, const std::set<SystemId>& scope,
                                                     const std::string& hub_name) {
    if (scope.size() < 2) throw QueryError("infrastructure scope needs at least two systems");
    for (auto id : scope)
        if (!model.find_system(id)) throw QueryError("unknown system id " + std::to_string(id));
    if (hub_name.empty()) throw QueryError("hub name must not be empty");
    for (const auto& s : model.systems)
        if (s.name == hub_name) throw QueryError("hub name \"" + hub_name + "\" is already used");

    InfrastructureResult res;
    auto& out = res.model;
    auto& rep = res.report;
    out = model;
    out.exchanges.clear();
    out.adapters.clear();

    SystemId hub = 1;
    for (const auto& s : model.systems) hub = std::max(hub, s.id + 1);
    out.systems.push_back({hub, hub_name, hub_name, ""});
    rep.hub_id = hub;
    rep.scope_size = scope.size();

    auto in_scope = [&](const Exchange& e) { return scope.count(e.from) && scope.count(e.to); };
    std::set<ExchangeRef> emitted;
    std::set<CellKey> links;
    auto emit = [&](Exchange e) {
        if (!emitted.insert(e.ref()).second) return false;
        links.insert({e.from, e.to});
        out.exchanges.push_back(std::move(e));
        return true;
    };
    auto copy_adapters = [&](const ExchangeRef& old_ref, const ExchangeRef& new_ref) {
        for (const auto& a : model.adapters) {
            if (a.exchange() != old_ref) continue;
            Adapter na = a;
            na.exchange_label = new_ref.label;
            na.from = new_ref.from;
            na.to = new_ref.to;
            if (std::find(out.adapters.begin(), out.adapters.end(), na) == out.adapters.end())
                out.adapters.push_back(std::move(na));
        }
    };

    for (const auto& e : model.exchanges) {
        if (!in_scope(e)) {
            out.exchanges.push_back(e);
            for (const auto& a : model.adapters)
                if (a.exchange() == e.ref()) out.adapters.push_back(a);
            continue;
        }
        ++rep.rerouted_instances;
        Exchange in = e, outbound = e;
        in.label = e.label + ".in";
        in.to = hub;
        outbound.label = e.label + ".out";
        outbound.from = hub;
        if (emit(in)) copy_adapters(e.ref(), in.ref());
        if (emit(outbound)) copy_adapters(e.ref(), outbound.ref());
    }

    for (auto& cap : out.capabilities) {
        std::vector<SystemId> path;
        for (std::size_t k = 0; k < cap.path.size(); ++k) {
            if (k > 0 && scope.count(cap.path[k - 1]) && scope.count(cap.path[k])) path.push_back(hub);
            path.push_back(cap.path[k]);
        }
        cap.path = std::move(path);
    }

    rep.hub_links = links.size();
    rep.interface_delta = static_cast<std::ptrdiff_t>(rep.rerouted_instances) - static_cast<std::ptrdiff_t>(rep.hub_links);
    rep.full_mesh_interfaces = scope.size() * (scope.size() - 1);
    rep.hub_interfaces = 2 * scope.size();
    if (rep.hub_interfaces > rep.full_mesh_interfaces)
        rep.warning = "a hub over " + std::to_string(scope.size()) + " systems needs more interfaces (" +
                      std::to_string(rep.hub_interfaces) + ") than a full mesh (" +
                      std::to_string(rep.full_mesh_interfaces) + ")";
    return res;
}

inline std::string format_infrastructure(const InfrastructureReport& r) {
    std::ostringstream os;
    os << "hub: " << r.hub_id << '\n'
       << "scope size: " << r.scope_size << '\n'
       << "interfaces before: " << r.rerouted_instances << '\n'
       << "interfaces after: " << r.hub_links << '\n'
       << "delta: " << r.interface_delta << '\n'
       << "full mesh vs hub: " << r.full_mesh_interfaces << " vs " << r.hub_interfaces << '\n';
    if (r.warning) os << "warning: " << *r.warning << '\n';
    return os.str();
}

} // namespace sosm

#endif
