#ifndef SOSM_EXPORT_HPP
#define SOSM_EXPORT_HPP

#include <sstream>
#include <string>

#include "sosm/json_io.hpp"
#include "sosm/model.hpp"

namespace sosm {

enum class ModelFormat { dot, json, sosm };

namespace detail {

inline std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string to_dot(const SosModel& m) {
    std::ostringstream os;
    os << "digraph " << quote(m.name) << " {\n";
    for (const auto& s : m.systems) os << "  " << s.id << " [label=" << quote(std::to_string(s.id) + ": " + s.name) << "];\n";
    for (const auto& e : m.exchanges) os << "  " << e.from << " -> " << e.to << " [label=" << quote(e.label) << "];\n";
    os << "}\n";
    return os.str();
}

inline std::string to_sosm(const SosModel& m) {
    std::ostringstream os;
    os << "sos " << quote(m.name) << " oim=" << m.oim_level;
    if (m.timestamp) os << " t=" << *m.timestamp;
    os << '\n';
    for (const auto& s : m.systems) {
        os << "system " << s.id << ' ' << quote(s.name) << " owner=" << quote(s.owner);
        if (!s.provider.empty()) os << " provider=" << quote(s.provider);
        os << '\n';
    }
    for (const auto& e : m.exchanges) {
        os << "exchange " << e.label << " from=" << e.from << " to=" << e.to << " desc=" << quote(e.description);
        if (e.kind != ExchangeKind::service) os << " kind=" << to_string(e.kind);
        if (e.versions)
            os << " versions=" << e.versions->provider << '/' << e.versions->infrastructure << '/' << e.versions->client;
        if (!e.levels.empty()) {
            os << " levels=";
            bool first = true;
            for (auto l : e.levels) {
                os << (first ? "" : ",") << to_string(l);
                first = false;
            }
        }
        if (e.contract_override) os << " contract=" << to_string(*e.contract_override);
        os << '\n';
    }
    for (const auto& a : m.adapters)
        os << "adapter " << a.exchange_label << " from=" << a.from << " to=" << a.to << " hop=" << to_string(a.hop)
           << " map=" << a.from_version << "->" << a.to_version << '\n';
    for (const auto& c : m.capabilities) {
        os << "capability " << quote(c.name) << " path=";
        for (std::size_t i = 0; i < c.path.size(); ++i) os << (i ? "->" : "") << c.path[i];
        os << '\n';
    }
    return os.str();
}

} // namespace detail

/// Serializes a model. `json` is lossless (parse_model reads it back);
/// `sosm` writes the line format; `dot` emits one node per system and one
/// edge per exchange instance.
inline std::string export_model(const SosModel& m, ModelFormat format) {
    switch (format) {
    case ModelFormat::dot: return detail::to_dot(m);
    case ModelFormat::json: return model_to_json(m).dump(2) + "\n";
    case ModelFormat::sosm: return detail::to_sosm(m);
    }
    return {};
}

} // namespace sosm

#endif
