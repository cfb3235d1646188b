#ifndef SOSM_JSON_IO_HPP
#define SOSM_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "sosm/model.hpp"

namespace sosm {

namespace detail {

template <typename Enum, typename Fn>
Enum enum_or_throw(const nlohmann::json& j, Fn parse, const char* what) {
    auto v = parse(j.get<std::string>());
    if (!v) throw ModelError(std::string("invalid ") + what + " \"" + j.get<std::string>() + "\"");
    return *v;
}

} // namespace detail

inline nlohmann::json model_to_json(const SosModel& m) {
    using nlohmann::json;
    json j;
    j["name"] = m.name;
    j["oim"] = m.oim_level;
    j["timestamp"] = m.timestamp ? json(*m.timestamp) : json(nullptr);

    j["systems"] = json::array();
    for (const auto& s : m.systems)
        j["systems"].push_back({{"id", s.id}, {"name", s.name}, {"owner", s.owner}, {"provider", s.provider}});

    j["exchanges"] = json::array();
    for (const auto& e : m.exchanges) {
        json x{{"label", e.label},
               {"from", e.from},
               {"to", e.to},
               {"description", e.description},
               {"kind", std::string(to_string(e.kind))}};
        x["versions"] = e.versions ? json{{"provider", e.versions->provider},
                                          {"infrastructure", e.versions->infrastructure},
                                          {"client", e.versions->client}}
                                   : json(nullptr);
        x["levels"] = json::array();
        for (auto l : e.levels) x["levels"].push_back(std::string(to_string(l)));
        x["contract"] = e.contract_override ? json(std::string(to_string(*e.contract_override))) : json(nullptr);
        j["exchanges"].push_back(std::move(x));
    }

    j["adapters"] = json::array();
    for (const auto& a : m.adapters)
        j["adapters"].push_back({{"exchange", a.exchange_label},
                                 {"from", a.from},
                                 {"to", a.to},
                                 {"hop", std::string(to_string(a.hop))},
                                 {"from_version", a.from_version},
                                 {"to_version", a.to_version}});

    j["capabilities"] = json::array();
    for (const auto& c : m.capabilities) j["capabilities"].push_back({{"name", c.name}, {"path", c.path}});
    return j;
}

/// Reads the JSON export schema back; throws ModelError on shape or structural errors.
inline SosModel model_from_json(const nlohmann::json& j) {
    SosModel m;
    try {
        m.name = j.at("name").get<std::string>();
        m.oim_level = j.at("oim").get<int>();
        if (j.contains("timestamp") && !j["timestamp"].is_null()) m.timestamp = j["timestamp"].get<std::string>();

        for (const auto& s : j.value("systems", nlohmann::json::array()))
            m.systems.push_back({s.at("id").get<SystemId>(), s.at("name").get<std::string>(),
                                 s.value("owner", std::string{}), s.value("provider", std::string{})});

        for (const auto& x : j.value("exchanges", nlohmann::json::array())) {
            Exchange e;
            e.label = x.at("label").get<std::string>();
            e.from = x.at("from").get<SystemId>();
            e.to = x.at("to").get<SystemId>();
            e.description = x.value("description", std::string{});
            if (x.contains("kind")) e.kind = detail::enum_or_throw<ExchangeKind>(x["kind"], kind_from_string, "kind");
            if (x.contains("versions") && !x["versions"].is_null()) {
                const auto& v = x["versions"];
                e.versions = VersionTriple{v.at("provider").get<std::string>(), v.at("infrastructure").get<std::string>(),
                                           v.at("client").get<std::string>()};
            }
            for (const auto& l : x.value("levels", nlohmann::json::array()))
                e.levels.insert(detail::enum_or_throw<InteropLevel>(l, level_from_string, "level"));
            if (x.contains("contract") && !x["contract"].is_null())
                e.contract_override = detail::enum_or_throw<ContractClass>(x["contract"], contract_from_string, "contract");
            m.exchanges.push_back(std::move(e));
        }

        for (const auto& a : j.value("adapters", nlohmann::json::array()))
            m.adapters.push_back({a.at("exchange").get<std::string>(), a.at("from").get<SystemId>(),
                                  a.at("to").get<SystemId>(),
                                  detail::enum_or_throw<Hop>(a.at("hop"), hop_from_string, "hop"),
                                  a.at("from_version").get<std::string>(), a.at("to_version").get<std::string>()});

        for (const auto& c : j.value("capabilities", nlohmann::json::array()))
            m.capabilities.push_back({c.at("name").get<std::string>(), c.at("path").get<std::vector<SystemId>>()});
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed model json: ") + e.what());
    }

    auto errors = structural_errors(m);
    if (!errors.empty()) throw ModelError(errors.front().location + ": " + errors.front().message);
    return m;
}

} // namespace sosm

#endif
