#ifndef SOSM_TIMELINE_HPP
#define SOSM_TIMELINE_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sosm/compatibility.hpp"
#include "sosm/governance.hpp"
#include "sosm/matrix.hpp"
#include "sosm/model.hpp"

namespace sosm {

/// Time-ordered snapshots of one SoS: timestamps strictly increase and every
/// snapshot carries the same model name.
class Bundle {
public:
    explicit Bundle(std::vector<SosModel> snapshots) : snapshots_(std::move(snapshots)) {
        if (snapshots_.empty()) throw ModelError("a bundle needs at least one snapshot");
        for (std::size_t i = 0; i < snapshots_.size(); ++i) {
            const auto& s = snapshots_[i];
            if (!s.timestamp) throw ModelError("snapshot " + std::to_string(i + 1) + " has no timestamp");
            if (s.name != snapshots_.front().name)
                throw ModelError("snapshot " + std::to_string(i + 1) + " is named \"" + s.name + "\", expected \"" +
                                 snapshots_.front().name + "\"");
            if (i > 0 && !(*snapshots_[i - 1].timestamp < *s.timestamp))
                throw ModelError("snapshot timestamps are not strictly increasing (" + *snapshots_[i - 1].timestamp +
                                 " then " + *s.timestamp + ")");
        }
    }

    const std::vector<SosModel>& snapshots() const noexcept { return snapshots_; }
    std::size_t size() const noexcept { return snapshots_.size(); }

private:
    std::vector<SosModel> snapshots_;
};

// ---------------------------------------------------------------------------
// Diff

template <typename T>
struct FieldChange {
    T old_value;
    T new_value;
    friend bool operator==(const FieldChange&, const FieldChange&) = default;
};

struct SystemChange {
    SystemId id = 0;
    std::optional<FieldChange<std::string>> name;
    std::optional<FieldChange<std::string>> provider;
    friend bool operator==(const SystemChange&, const SystemChange&) = default;
};

struct OwnerChange {
    SystemId id = 0;
    std::string old_owner;
    std::string new_owner;
    friend bool operator==(const OwnerChange&, const OwnerChange&) = default;
};

/// A missing side (unversioned exchange) is std::nullopt.
struct VersionDelta {
    ExchangeRef ref;
    Side side = Side::provider;
    std::optional<std::string> old_version;
    std::optional<std::string> new_version;
    friend bool operator==(const VersionDelta&, const VersionDelta&) = default;
};

struct ExchangeChange {
    ExchangeRef ref;
    std::optional<FieldChange<std::string>> description;
    std::optional<FieldChange<ExchangeKind>> kind;
    std::optional<FieldChange<std::set<InteropLevel>>> levels;
    std::optional<FieldChange<std::optional<ContractClass>>> contract_override;
    friend bool operator==(const ExchangeChange&, const ExchangeChange&) = default;
};

struct ModelDiff {
    std::optional<FieldChange<std::string>> name;
    std::optional<FieldChange<int>> oim_level;
    std::optional<FieldChange<std::optional<std::string>>> timestamp;
    std::vector<SystemNode> added_systems;
    std::vector<SystemNode> removed_systems;
    std::vector<SystemChange> system_changes;
    std::vector<OwnerChange> owner_changes;
    std::vector<Exchange> added_exchanges;
    std::vector<Exchange> removed_exchanges;
    std::vector<ExchangeChange> exchange_changes;
    std::vector<VersionDelta> version_changes;
    std::vector<Adapter> added_adapters;
    std::vector<Adapter> removed_adapters;
    std::vector<Capability> added_capabilities;
    std::vector<Capability> removed_capabilities;

    /// True when nothing but the timestamp differs; timestamps index the
    /// snapshots of a bundle rather than describe their content.
    bool empty() const {
        return !name && !oim_level && added_systems.empty() && removed_systems.empty() && system_changes.empty() &&
               owner_changes.empty() && added_exchanges.empty() && removed_exchanges.empty() &&
               exchange_changes.empty() && version_changes.empty() && added_adapters.empty() &&
               removed_adapters.empty() && added_capabilities.empty() && removed_capabilities.empty();
    }
};

namespace detail {

inline bool adapter_less(const Adapter& x, const Adapter& y) {
    return std::tie(x.from, x.to, x.exchange_label, x.hop, x.from_version, x.to_version) <
           std::tie(y.from, y.to, y.exchange_label, y.hop, y.from_version, y.to_version);
}

template <typename T, typename Less>
void set_difference_into(std::vector<T> a, std::vector<T> b, Less less, std::vector<T>& only_a,
                         std::vector<T>& only_b) {
    std::sort(a.begin(), a.end(), less);
    std::sort(b.begin(), b.end(), less);
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a), less);
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b), less);
}

} // namespace detail

/// Entity identity: system id and exchange (label, from, to). Output is
/// ordered by id, then label.
inline ModelDiff diff(const SosModel& before, const SosModel& after) {
    ModelDiff d;
    if (before.name != after.name) d.name = FieldChange<std::string>{before.name, after.name};
    if (before.oim_level != after.oim_level) d.oim_level = FieldChange<int>{before.oim_level, after.oim_level};
    if (before.timestamp != after.timestamp)
        d.timestamp = FieldChange<std::optional<std::string>>{before.timestamp, after.timestamp};

    std::map<SystemId, const SystemNode*> sa, sb;
    for (const auto& s : before.systems) sa[s.id] = &s;
    for (const auto& s : after.systems) sb[s.id] = &s;
    for (const auto& [id, s] : sa)
        if (!sb.count(id)) d.removed_systems.push_back(*s);
    for (const auto& [id, s] : sb) {
        auto it = sa.find(id);
        if (it == sa.end()) {
            d.added_systems.push_back(*s);
            continue;
        }
        const auto& o = *it->second;
        SystemChange sc{id, std::nullopt, std::nullopt};
        if (o.name != s->name) sc.name = FieldChange<std::string>{o.name, s->name};
        if (o.provider != s->provider) sc.provider = FieldChange<std::string>{o.provider, s->provider};
        if (sc.name || sc.provider) d.system_changes.push_back(std::move(sc));
        if (o.owner != s->owner) d.owner_changes.push_back({id, o.owner, s->owner});
    }

    std::map<ExchangeRef, const Exchange*> ea, eb;
    for (const auto& e : before.exchanges) ea[e.ref()] = &e;
    for (const auto& e : after.exchanges) eb[e.ref()] = &e;
    for (const auto& [ref, e] : ea)
        if (!eb.count(ref)) d.removed_exchanges.push_back(*e);
    for (const auto& [ref, e] : eb) {
        auto it = ea.find(ref);
        if (it == ea.end()) {
            d.added_exchanges.push_back(*e);
            continue;
        }
        const auto& o = *it->second;
        ExchangeChange ec;
        ec.ref = ref;
        if (o.description != e->description) ec.description = FieldChange<std::string>{o.description, e->description};
        if (o.kind != e->kind) ec.kind = FieldChange<ExchangeKind>{o.kind, e->kind};
        if (o.levels != e->levels) ec.levels = FieldChange<std::set<InteropLevel>>{o.levels, e->levels};
        if (o.contract_override != e->contract_override)
            ec.contract_override = FieldChange<std::optional<ContractClass>>{o.contract_override, e->contract_override};
        if (ec.description || ec.kind || ec.levels || ec.contract_override) d.exchange_changes.push_back(std::move(ec));

        for (auto side : {Side::provider, Side::infrastructure, Side::client}) {
            std::optional<std::string> ov, nv;
            if (o.versions) ov = o.versions->at(side);
            if (e->versions) nv = e->versions->at(side);
            if (ov != nv) d.version_changes.push_back({ref, side, ov, nv});
        }
    }

    detail::set_difference_into(before.adapters, after.adapters, detail::adapter_less, d.removed_adapters,
                                d.added_adapters);
    auto cap_less = [](const Capability& x, const Capability& y) {
        return std::tie(x.name, x.path) < std::tie(y.name, y.path);
    };
    detail::set_difference_into(before.capabilities, after.capabilities, cap_less, d.removed_capabilities,
                                d.added_capabilities);
    return d;
}

/// Replays a diff onto `base`; apply_diff(a, diff(a, b)) is structurally
/// equal to b.
inline SosModel apply_diff(SosModel base, const ModelDiff& d) {
    if (d.name) base.name = d.name->new_value;
    if (d.oim_level) base.oim_level = d.oim_level->new_value;
    if (d.timestamp) base.timestamp = d.timestamp->new_value;

    auto& sys = base.systems;
    for (const auto& r : d.removed_systems)
        std::erase_if(sys, [&](const SystemNode& s) { return s.id == r.id; });
    for (const auto& a : d.added_systems) sys.push_back(a);
    auto system_at = [&](SystemId id) -> SystemNode& {
        auto it = std::find_if(sys.begin(), sys.end(), [id](const auto& s) { return s.id == id; });
        if (it == sys.end()) throw ModelError("diff references unknown system " + std::to_string(id));
        return *it;
    };
    for (const auto& c : d.system_changes) {
        auto& s = system_at(c.id);
        if (c.name) s.name = c.name->new_value;
        if (c.provider) s.provider = c.provider->new_value;
    }
    for (const auto& c : d.owner_changes) system_at(c.id).owner = c.new_owner;

    auto& xs = base.exchanges;
    for (const auto& r : d.removed_exchanges)
        std::erase_if(xs, [&](const Exchange& e) { return e.ref() == r.ref(); });
    for (const auto& a : d.added_exchanges) xs.push_back(a);
    auto exchange_at = [&](const ExchangeRef& ref) -> Exchange& {
        auto* e = base.find_exchange(ref);
        if (!e) throw ModelError("diff references unknown exchange " + to_string(ref));
        return *e;
    };
    for (const auto& c : d.exchange_changes) {
        auto& e = exchange_at(c.ref);
        if (c.description) e.description = c.description->new_value;
        if (c.kind) e.kind = c.kind->new_value;
        if (c.levels) e.levels = c.levels->new_value;
        if (c.contract_override) e.contract_override = c.contract_override->new_value;
    }
    for (const auto& v : d.version_changes) {
        auto& e = exchange_at(v.ref);
        if (!e.versions) e.versions = VersionTriple{};
        e.versions->at(v.side) = v.new_version.value_or("");
    }
    for (auto& e : xs)
        if (e.versions && e.versions->provider.empty() && e.versions->infrastructure.empty() &&
            e.versions->client.empty())
            e.versions.reset();

    for (const auto& r : d.removed_adapters) {
        auto it = std::find(base.adapters.begin(), base.adapters.end(), r);
        if (it != base.adapters.end()) base.adapters.erase(it);
    }
    for (const auto& a : d.added_adapters) base.adapters.push_back(a);
    for (const auto& r : d.removed_capabilities) {
        auto it = std::find(base.capabilities.begin(), base.capabilities.end(), r);
        if (it != base.capabilities.end()) base.capabilities.erase(it);
    }
    for (const auto& a : d.added_capabilities) base.capabilities.push_back(a);
    return base;
}

inline std::string format_diff(const ModelDiff& d) {
    std::ostringstream os;
    if (d.name) os << "  name: " << d.name->old_value << " -> " << d.name->new_value << '\n';
    if (d.oim_level) os << "  oim: " << d.oim_level->old_value << " -> " << d.oim_level->new_value << '\n';
    for (const auto& s : d.added_systems) os << "  + system " << s.id << " \"" << s.name << "\"\n";
    for (const auto& s : d.removed_systems) os << "  - system " << s.id << " \"" << s.name << "\"\n";
    for (const auto& c : d.system_changes) {
        if (c.name) os << "  ~ system " << c.id << " name: " << c.name->old_value << " -> " << c.name->new_value << '\n';
        if (c.provider)
            os << "  ~ system " << c.id << " provider: " << c.provider->old_value << " -> " << c.provider->new_value
               << '\n';
    }
    for (const auto& c : d.owner_changes)
        os << "  ~ system " << c.id << " owner: " << c.old_owner << " -> " << c.new_owner << '\n';
    for (const auto& e : d.added_exchanges) os << "  + exchange " << to_string(e.ref()) << '\n';
    for (const auto& e : d.removed_exchanges) os << "  - exchange " << to_string(e.ref()) << '\n';
    for (const auto& c : d.exchange_changes) os << "  ~ exchange " << to_string(c.ref) << " attributes\n";
    for (const auto& v : d.version_changes)
        os << "  ~ version " << to_string(v.ref) << ' ' << to_string(v.side) << ": " << v.old_version.value_or("-")
           << " -> " << v.new_version.value_or("-") << '\n';
    for (const auto& a : d.added_adapters)
        os << "  + adapter " << to_string(a.exchange()) << ' ' << to_string(a.hop) << ' ' << a.from_version << "->"
           << a.to_version << '\n';
    for (const auto& a : d.removed_adapters)
        os << "  - adapter " << to_string(a.exchange()) << ' ' << to_string(a.hop) << ' ' << a.from_version << "->"
           << a.to_version << '\n';
    for (const auto& c : d.added_capabilities) os << "  + capability \"" << c.name << "\"\n";
    for (const auto& c : d.removed_capabilities) os << "  - capability \"" << c.name << "\"\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Bundle analyses

struct SnapshotSummary {
    std::string timestamp;
    std::size_t incompatible = 0;
};

struct BundleReport {
    std::vector<ModelDiff> diffs; // diffs[i] = snapshot i -> i+1
    std::vector<SnapshotSummary> summaries;
};

inline BundleReport bundle_report(const Bundle& bundle) {
    BundleReport r;
    const auto& snaps = bundle.snapshots();
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        r.summaries.push_back(
            {snaps[i].timestamp.value_or(""), check_compatibility(snaps[i]).count(CompatStatus::incompatible)});
        if (i > 0) r.diffs.push_back(diff(snaps[i - 1], snaps[i]));
    }
    return r;
}

using OwnerPair = std::pair<std::string, std::string>; // first < second

/// Fraction of snapshots in which each pair of distinct owners shares at
/// least one contract cell. Pairs that co-exist somewhere but never share a
/// contract are listed with 0.
inline std::map<OwnerPair, double> intertwining(const Bundle& bundle) {
    std::map<OwnerPair, std::size_t> shared;
    std::set<OwnerPair> coexisting;
    for (const auto& snap : bundle.snapshots()) {
        std::set<std::string> owners;
        for (const auto& s : snap.systems) owners.insert(s.owner);
        for (auto a = owners.begin(); a != owners.end(); ++a)
            for (auto b = std::next(a); b != owners.end(); ++b) coexisting.insert({*a, *b});

        std::set<OwnerPair> here;
        for (const auto& c : contract_map(snap, build_matrix(snap)).cells) {
            if (c.classification != ContractClass::contract || c.src_owner == c.dst_owner) continue;
            here.insert(std::minmax(c.src_owner, c.dst_owner));
        }
        for (const auto& p : here) ++shared[p];
    }
    std::map<OwnerPair, double> out;
    const double n = static_cast<double>(bundle.size());
    for (const auto& p : coexisting) {
        auto it = shared.find(p);
        out[p] = it == shared.end() ? 0.0 : static_cast<double>(it->second) / n;
    }
    return out;
}

inline std::string format_bundle_report(const Bundle& bundle, const BundleReport& r) {
    std::ostringstream os;
    for (std::size_t i = 0; i < r.summaries.size(); ++i) {
        os << "snapshot " << (i + 1) << " t=" << r.summaries[i].timestamp
           << " incompatible: " << r.summaries[i].incompatible << '\n';
        if (i + 1 < r.summaries.size()) {
            const auto& d = r.diffs[i];
            os << "diff " << (i + 1) << "->" << (i + 2) << (d.empty() ? ": no changes\n" : ":\n");
            if (!d.empty()) os << format_diff(d);
        }
    }
    auto tw = intertwining(bundle);
    if (!tw.empty()) {
        os << "intertwining:\n";
        for (const auto& [p, v] : tw) os << "  " << p.first << " | " << p.second << ": " << v << '\n';
    }
    return os.str();
}

} // namespace sosm

#endif
