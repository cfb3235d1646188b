#ifndef SOSM_COMPATIBILITY_HPP
#define SOSM_COMPATIBILITY_HPP

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

enum class CompatStatus { compatible, compatible_with_warning, incompatible };

inline std::string_view to_string(CompatStatus s) {
    switch (s) {
    case CompatStatus::compatible: return "compatible";
    case CompatStatus::compatible_with_warning: return "compatible_with_warning";
    case CompatStatus::incompatible: return "incompatible";
    }
    return "?";
}

struct ExchangeCompat {
    ExchangeRef ref;
    CompatStatus status = CompatStatus::compatible;
    std::vector<Hop> failing_hops;

    friend bool operator==(const ExchangeCompat&, const ExchangeCompat&) = default;
};

/// One entry per exchange instance, sorted by (from, to, label).
struct CompatReport {
    std::vector<ExchangeCompat> entries;

    std::size_t count(CompatStatus s) const {
        return static_cast<std::size_t>(
            std::count_if(entries.begin(), entries.end(), [s](const auto& e) { return e.status == s; }));
    }
    const ExchangeCompat* find(const ExchangeRef& r) const {
        auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.ref == r; });
        return it == entries.end() ? nullptr : &*it;
    }

    friend bool operator==(const CompatReport&, const CompatReport&) = default;
};

namespace detail {

inline bool has_adapter(const SosModel& m, const ExchangeRef& r, Hop hop, const std::string& from_v,
                        const std::string& to_v) {
    return std::any_of(m.adapters.begin(), m.adapters.end(), [&](const Adapter& a) {
        return a.exchange() == r && a.hop == hop && a.from_version == from_v && a.to_version == to_v;
    });
}

} // namespace detail

/// Two-hop version check: provider->infrastructure and
/// infrastructure->client each pass on equal versions or a matching adapter
/// declared for that exchange instance.
inline CompatReport check_compatibility(const SosModel& model) {
    CompatReport r;
    for (const auto& e : model.exchanges) {
        ExchangeCompat ec{e.ref(), CompatStatus::compatible, {}};
        if (!e.versions) {
            ec.status = CompatStatus::compatible_with_warning;
        } else {
            const auto& v = *e.versions;
            if (v.provider != v.infrastructure &&
                !detail::has_adapter(model, ec.ref, Hop::provider_to_infra, v.provider, v.infrastructure))
                ec.failing_hops.push_back(Hop::provider_to_infra);
            if (v.infrastructure != v.client &&
                !detail::has_adapter(model, ec.ref, Hop::infra_to_client, v.infrastructure, v.client))
                ec.failing_hops.push_back(Hop::infra_to_client);
            if (!ec.failing_hops.empty()) ec.status = CompatStatus::incompatible;
        }
        r.entries.push_back(std::move(ec));
    }
    std::sort(r.entries.begin(), r.entries.end(), [](const auto& a, const auto& b) { return a.ref < b.ref; });
    return r;
}

inline std::string format_compat(const CompatReport& r) {
    std::ostringstream os;
    for (const auto& e : r.entries) {
        os << to_string(e.ref) << ": " << to_string(e.status);
        if (!e.failing_hops.empty()) {
            os << " (failing:";
            for (auto h : e.failing_hops) os << ' ' << (h == Hop::provider_to_infra ? "provider->infra" : "infra->client");
            os << ')';
        }
        os << '\n';
    }
    os << "compatible: " << r.count(CompatStatus::compatible)
       << ", with warning: " << r.count(CompatStatus::compatible_with_warning)
       << ", incompatible: " << r.count(CompatStatus::incompatible) << '\n';
    return os.str();
}

struct VersionChange {
    ExchangeRef ref;
    Side side = Side::provider;
    std::string new_version;
};

struct AppliedChange {
    ExchangeRef ref;
    Side side = Side::provider;
    std::string old_version;
    std::string new_version;

    friend bool operator==(const AppliedChange&, const AppliedChange&) = default;
};

struct BrokenCapability {
    std::string name;
    CellKey hop;

    friend bool operator==(const BrokenCapability&, const BrokenCapability&) = default;
};

struct ImpactReport {
    std::vector<AppliedChange> changed;
    std::vector<ExchangeRef> newly_incompatible; // sorted
    std::set<SystemId> affected_systems;
    std::vector<BrokenCapability> broken_capabilities;

    bool empty() const {
        return changed.empty() && newly_incompatible.empty() && affected_systems.empty() &&
               broken_capabilities.empty();
    }
};

/// Applies version changes to a copy of the model; throws on unknown or
/// unversioned exchanges and malformed versions.
inline SosModel apply_version_changes(SosModel model, const std::vector<VersionChange>& changes,
                                      std::vector<AppliedChange>* applied = nullptr) {
    for (const auto& c : changes) {
        if (!is_valid_version(c.new_version)) throw QueryError("malformed version \"" + c.new_version + "\"");
        auto* e = model.find_exchange(c.ref);
        if (!e) throw QueryError("unknown exchange " + to_string(c.ref));
        if (!e->versions) throw QueryError("exchange " + to_string(c.ref) + " is unversioned");
        auto& slot = e->versions->at(c.side);
        if (slot == c.new_version) continue;
        if (applied) applied->push_back({c.ref, c.side, slot, c.new_version});
        slot = c.new_version;
    }
    return model;
}

/// What breaks when versions move without the matching changes elsewhere.
///
/// A capability is reported broken at the first hop whose cell became fully
/// incompatible: one compatible instance in a cell still carries the
/// service.
inline ImpactReport evolution_impact(const SosModel& model, const std::vector<VersionChange>& changes) {
    ImpactReport r;
    auto after = apply_version_changes(model, changes, &r.changed);
    auto before_rep = check_compatibility(model);
    auto after_rep = check_compatibility(after);

    for (const auto& e : after_rep.entries) {
        if (e.status != CompatStatus::incompatible) continue;
        const auto* prev = before_rep.find(e.ref);
        if (prev && prev->status == CompatStatus::incompatible) continue;
        r.newly_incompatible.push_back(e.ref);
        r.affected_systems.insert(e.ref.from);
        r.affected_systems.insert(e.ref.to);
    }

    auto cell_dead = [](const CompatReport& rep, SystemId from, SystemId to) {
        bool any = false;
        for (const auto& e : rep.entries) {
            if (e.ref.from != from || e.ref.to != to) continue;
            any = true;
            if (e.status != CompatStatus::incompatible) return false;
        }
        return any;
    };
    for (const auto& c : model.capabilities) {
        for (std::size_t k = 1; k < c.path.size(); ++k) {
            auto a = c.path[k - 1], b = c.path[k];
            if (cell_dead(after_rep, a, b) && !cell_dead(before_rep, a, b)) {
                r.broken_capabilities.push_back({c.name, {a, b}});
                break;
            }
        }
    }
    return r;
}

/// Expands a system-wide bump into per-instance changes over the versioned
/// exchanges the system provides (from = system).
inline std::vector<VersionChange> expand_system_change(const SosModel& model, SystemId system, Side side,
                                                       const std::string& version) {
    std::vector<VersionChange> out;
    for (const auto& e : model.exchanges)
        if (e.from == system && e.versions) out.push_back({e.ref(), side, version});
    return out;
}

inline std::string format_impact(const ImpactReport& r) {
    std::ostringstream os;
    for (const auto& c : r.changed)
        os << "changed " << to_string(c.ref) << ' ' << to_string(c.side) << ": " << c.old_version << " -> "
           << c.new_version << '\n';
    for (const auto& ref : r.newly_incompatible) os << "newly incompatible " << to_string(ref) << '\n';
    os << "affected systems: {";
    bool first = true;
    for (auto id : r.affected_systems) {
        os << (first ? "" : ",") << id;
        first = false;
    }
    os << "}\n";
    for (const auto& b : r.broken_capabilities)
        os << "broken capability \"" << b.name << "\" at " << b.hop.first << "->" << b.hop.second << '\n';
    return os.str();
}

} // namespace sosm

#endif
