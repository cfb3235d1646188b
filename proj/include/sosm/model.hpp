#ifndef SOSM_MODEL_HPP
#define SOSM_MODEL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace sosm {

using SystemId = std::int32_t;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The model itself is inconsistent (bad reference, duplicate key, ...).
class ModelError : public Error {
public:
    using Error::Error;
};

/// A query was malformed (unknown id, source equals target, bad size, ...).
class QueryError : public Error {
public:
    using Error::Error;
};

enum class ExchangeKind { service, product };
enum class InteropLevel { physical, procedural, operational };
enum class ContractClass { internal, contract };
enum class Hop { provider_to_infra, infra_to_client };
enum class Side { provider, infrastructure, client };

inline constexpr InteropLevel kAllLevels[] = {
    InteropLevel::physical, InteropLevel::procedural, InteropLevel::operational};

inline std::string_view to_string(ExchangeKind k) {
    return k == ExchangeKind::service ? "service" : "product";
}

inline std::string_view to_string(InteropLevel l) {
    switch (l) {
    case InteropLevel::physical: return "physical";
    case InteropLevel::procedural: return "procedural";
    case InteropLevel::operational: return "operational";
    }
    return "?";
}

inline std::string_view to_string(ContractClass c) {
    return c == ContractClass::internal ? "internal" : "contract";
}

inline std::string_view to_string(Hop h) {
    return h == Hop::provider_to_infra ? "provider" : "client";
}

inline std::string_view to_string(Side s) {
    switch (s) {
    case Side::provider: return "provider";
    case Side::infrastructure: return "infrastructure";
    case Side::client: return "client";
    }
    return "?";
}

inline std::optional<ExchangeKind> kind_from_string(std::string_view s) {
    if (s == "service") return ExchangeKind::service;
    if (s == "product") return ExchangeKind::product;
    return std::nullopt;
}

inline std::optional<InteropLevel> level_from_string(std::string_view s) {
    for (auto l : kAllLevels)
        if (to_string(l) == s) return l;
    return std::nullopt;
}

inline std::optional<ContractClass> contract_from_string(std::string_view s) {
    if (s == "internal") return ContractClass::internal;
    if (s == "contract") return ContractClass::contract;
    return std::nullopt;
}

inline std::optional<Hop> hop_from_string(std::string_view s) {
    if (s == "provider") return Hop::provider_to_infra;
    if (s == "client") return Hop::infra_to_client;
    return std::nullopt;
}

inline std::optional<Side> side_from_string(std::string_view s) {
    if (s == "provider") return Side::provider;
    if (s == "infrastructure" || s == "infra") return Side::infrastructure;
    if (s == "client") return Side::client;
    return std::nullopt;
}

/// True for "MAJOR.MINOR" with non-negative decimal integers.
inline bool is_valid_version(std::string_view v) {
    auto dot = v.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == v.size()) return false;
    auto digits = [](std::string_view s) {
        return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    return digits(v.substr(0, dot)) && digits(v.substr(dot + 1));
}

struct VersionTriple {
    std::string provider;
    std::string infrastructure;
    std::string client;

    const std::string& at(Side s) const {
        return s == Side::provider ? provider : s == Side::infrastructure ? infrastructure : client;
    }
    std::string& at(Side s) {
        return s == Side::provider ? provider : s == Side::infrastructure ? infrastructure : client;
    }

    friend bool operator==(const VersionTriple&, const VersionTriple&) = default;
};

struct SystemNode {
    SystemId id = 0;
    std::string name;
    std::string owner;
    std::string provider;

    friend bool operator==(const SystemNode&, const SystemNode&) = default;
};

/// Identity of one exchange instance: the same label may appear in several cells.
struct ExchangeRef {
    std::string label;
    SystemId from = 0;
    SystemId to = 0;

    friend bool operator==(const ExchangeRef&, const ExchangeRef&) = default;
    friend bool operator<(const ExchangeRef& a, const ExchangeRef& b) {
        return std::tie(a.from, a.to, a.label) < std::tie(b.from, b.to, b.label);
    }
};

inline std::string to_string(const ExchangeRef& r) {
    std::ostringstream os;
    os << '[' << r.label << "] " << r.from << "->" << r.to;
    return os.str();
}

struct Exchange {
    std::string label;
    SystemId from = 0;
    SystemId to = 0;
    std::string description;
    ExchangeKind kind = ExchangeKind::service;
    std::optional<VersionTriple> versions;
    std::set<InteropLevel> levels;
    std::optional<ContractClass> contract_override;

    ExchangeRef ref() const { return {label, from, to}; }

    friend bool operator==(const Exchange&, const Exchange&) = default;
};

struct Adapter {
    std::string exchange_label;
    SystemId from = 0;
    SystemId to = 0;
    Hop hop = Hop::provider_to_infra;
    std::string from_version;
    std::string to_version;

    ExchangeRef exchange() const { return {exchange_label, from, to}; }

    friend bool operator==(const Adapter&, const Adapter&) = default;
};

struct Capability {
    std::string name;
    std::vector<SystemId> path;

    friend bool operator==(const Capability&, const Capability&) = default;
};

struct SosModel {
    std::string name;
    int oim_level = 0;
    std::vector<SystemNode> systems;
    std::vector<Exchange> exchanges;
    std::vector<Adapter> adapters;
    std::vector<Capability> capabilities;
    std::optional<std::string> timestamp;

    const SystemNode* find_system(SystemId id) const {
        auto it = std::find_if(systems.begin(), systems.end(),
                               [id](const SystemNode& s) { return s.id == id; });
        return it == systems.end() ? nullptr : &*it;
    }

    const Exchange* find_exchange(const ExchangeRef& r) const {
        auto it = std::find_if(exchanges.begin(), exchanges.end(),
                               [&r](const Exchange& e) { return e.ref() == r; });
        return it == exchanges.end() ? nullptr : &*it;
    }
    Exchange* find_exchange(const ExchangeRef& r) {
        return const_cast<Exchange*>(std::as_const(*this).find_exchange(r));
    }

    std::vector<SystemId> system_ids() const {
        std::vector<SystemId> ids;
        ids.reserve(systems.size());
        for (const auto& s : systems) ids.push_back(s.id);
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    /// Owner of a declared system; throws on unknown ids.
    const std::string& owner_of(SystemId id) const {
        const auto* s = find_system(id);
        if (!s) throw QueryError("unknown system id " + std::to_string(id));
        return s->owner;
    }

    friend bool operator==(const SosModel&, const SosModel&) = default;
};

/// Equality that ignores declaration order of every entity list.
inline bool structurally_equal(SosModel a, SosModel b) {
    auto canon = [](SosModel& m) {
        std::sort(m.systems.begin(), m.systems.end(),
                  [](const auto& x, const auto& y) { return x.id < y.id; });
        std::sort(m.exchanges.begin(), m.exchanges.end(),
                  [](const auto& x, const auto& y) { return x.ref() < y.ref(); });
        std::sort(m.adapters.begin(), m.adapters.end(), [](const auto& x, const auto& y) {
            return std::tie(x.from, x.to, x.exchange_label, x.hop, x.from_version, x.to_version) <
                   std::tie(y.from, y.to, y.exchange_label, y.hop, y.from_version, y.to_version);
        });
        std::sort(m.capabilities.begin(), m.capabilities.end(), [](const auto& x, const auto& y) {
            return std::tie(x.name, x.path) < std::tie(y.name, y.path);
        });
    };
    canon(a);
    canon(b);
    return a == b;
}

// ---------------------------------------------------------------------------
// Validation

enum class Severity { error, warning };

enum class EntityKind { model, system, exchange, adapter, capability };

struct Diagnostic {
    Severity severity = Severity::error;
    EntityKind entity = EntityKind::model;
    std::size_t index = 0;   // position in the entity list of the model
    std::string location;    // human-readable entity reference
    std::string message;
    std::optional<int> line; // set when the diagnostic comes from a source file
};

inline std::string format_diagnostic(const Diagnostic& d) {
    std::ostringstream os;
    os << (d.severity == Severity::error ? "error" : "warning") << ": ";
    if (d.line) os << "line " << *d.line << ": ";
    os << d.location << ": " << d.message;
    return os.str();
}

namespace detail {

inline std::string system_loc(const SystemNode& s) { return "system " + std::to_string(s.id); }
inline std::string exchange_loc(const Exchange& e) { return "exchange " + to_string(e.ref()); }
inline std::string adapter_loc(const Adapter& a) {
    return "adapter " + to_string(a.exchange()) + " " + std::string(to_string(a.hop));
}
inline std::string capability_loc(const Capability& c) { return "capability \"" + c.name + "\""; }

inline bool has_edge(const SosModel& m, SystemId from, SystemId to) {
    return std::any_of(m.exchanges.begin(), m.exchanges.end(),
                       [&](const Exchange& e) { return e.from == from && e.to == to; });
}

} // namespace detail

/// Structural errors only; these are what a parser must reject.
inline std::vector<Diagnostic> structural_errors(const SosModel& m) {
    std::vector<Diagnostic> out;
    auto err = [&](EntityKind k, std::size_t i, std::string loc, std::string msg) {
        out.push_back({Severity::error, k, i, std::move(loc), std::move(msg), std::nullopt});
    };

    if (m.oim_level < 0 || m.oim_level > 4)
        err(EntityKind::model, 0, "sos \"" + m.name + "\"",
            "oim level " + std::to_string(m.oim_level) + " out of range 0..4");

    std::set<SystemId> ids;
    for (std::size_t i = 0; i < m.systems.size(); ++i) {
        const auto& s = m.systems[i];
        if (s.id <= 0) err(EntityKind::system, i, detail::system_loc(s), "system id must be positive");
        if (!ids.insert(s.id).second)
            err(EntityKind::system, i, detail::system_loc(s), "duplicate system id " + std::to_string(s.id));
        if (s.name.empty()) err(EntityKind::system, i, detail::system_loc(s), "empty system name");
    }

    auto check_id = [&](EntityKind k, std::size_t i, const std::string& loc, SystemId id) {
        if (!ids.count(id)) err(k, i, loc, "unknown system id " + std::to_string(id));
    };

    std::set<ExchangeRef> refs;
    for (std::size_t i = 0; i < m.exchanges.size(); ++i) {
        const auto& e = m.exchanges[i];
        auto loc = detail::exchange_loc(e);
        if (e.label.empty()) err(EntityKind::exchange, i, loc, "empty exchange label");
        check_id(EntityKind::exchange, i, loc, e.from);
        check_id(EntityKind::exchange, i, loc, e.to);
        if (e.from == e.to) err(EntityKind::exchange, i, loc, "self-loop exchange (from equals to)");
        if (!refs.insert(e.ref()).second)
            err(EntityKind::exchange, i, loc, "duplicate exchange (label, from, to)");
        if (e.versions) {
            for (auto side : {Side::provider, Side::infrastructure, Side::client})
                if (!is_valid_version(e.versions->at(side)))
                    err(EntityKind::exchange, i, loc, "malformed version \"" + e.versions->at(side) + "\"");
        }
    }

    for (std::size_t i = 0; i < m.adapters.size(); ++i) {
        const auto& a = m.adapters[i];
        auto loc = detail::adapter_loc(a);
        if (!refs.count(a.exchange())) err(EntityKind::adapter, i, loc, "adapter references unknown exchange");
        for (const auto* v : {&a.from_version, &a.to_version})
            if (!is_valid_version(*v)) err(EntityKind::adapter, i, loc, "malformed version \"" + *v + "\"");
        if (a.from_version == a.to_version)
            err(EntityKind::adapter, i, loc, "identity adapter (" + a.from_version + "->" + a.to_version + ")");
    }

    for (std::size_t i = 0; i < m.capabilities.size(); ++i) {
        const auto& c = m.capabilities[i];
        auto loc = detail::capability_loc(c);
        if (c.path.size() < 2) err(EntityKind::capability, i, loc, "capability path needs at least two systems");
        for (std::size_t k = 0; k < c.path.size(); ++k) {
            check_id(EntityKind::capability, i, loc, c.path[k]);
            if (k > 0 && c.path[k] == c.path[k - 1])
                err(EntityKind::capability, i, loc, "repeated consecutive system " + std::to_string(c.path[k]));
        }
    }
    return out;
}

/// Returns every error and warning for the model; never throws.
///
/// Errors cover every structural invariant plus mixed contract overrides
/// within one matrix cell. Warnings flag exchanges without a version
/// triple, exchanges that declare no interoperability level, and
/// capabilities whose path is not a chain of non-empty cells.
inline std::vector<Diagnostic> validate_model(const SosModel& m) {
    auto out = structural_errors(m);
    auto warn = [&](EntityKind k, std::size_t i, std::string loc, std::string msg) {
        out.push_back({Severity::warning, k, i, std::move(loc), std::move(msg), std::nullopt});
    };

    std::map<std::pair<SystemId, SystemId>, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < m.exchanges.size(); ++i) {
        const auto& e = m.exchanges[i];
        cells[{e.from, e.to}].push_back(i);
        if (!e.versions) warn(EntityKind::exchange, i, detail::exchange_loc(e), "unversioned exchange");
        if (e.levels.empty())
            warn(EntityKind::exchange, i, detail::exchange_loc(e), "undeclared interoperability levels");
    }
    for (const auto& [key, idx] : cells) {
        std::set<std::optional<ContractClass>> overrides;
        for (auto i : idx) overrides.insert(m.exchanges[i].contract_override);
        if (overrides.size() > 1)
            out.push_back({Severity::error, EntityKind::exchange, idx.front(),
                           "cell (" + std::to_string(key.first) + "," + std::to_string(key.second) + ")",
                           "mixed contract overrides within one cell", std::nullopt});
    }
    for (std::size_t i = 0; i < m.capabilities.size(); ++i) {
        const auto& c = m.capabilities[i];
        for (std::size_t k = 1; k < c.path.size(); ++k) {
            if (!detail::has_edge(m, c.path[k - 1], c.path[k])) {
                warn(EntityKind::capability, i, detail::capability_loc(c),
                     "capability path broken at " + std::to_string(c.path[k - 1]) + "->" +
                         std::to_string(c.path[k]));
                break;
            }
        }
    }
    return out;
}

inline bool has_errors(const std::vector<Diagnostic>& ds) {
    return std::any_of(ds.begin(), ds.end(), [](const auto& d) { return d.severity == Severity::error; });
}

} // namespace sosm

#endif
