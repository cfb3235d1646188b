#ifndef SOSM_PARSE_HPP
#define SOSM_PARSE_HPP

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sosm/json_io.hpp"
#include "sosm/model.hpp"

namespace sosm {

/// Error located in a model file. `syntax()` distinguishes malformed text
/// from a well-formed file that describes an inconsistent model.
class ParseError : public Error {
public:
    ParseError(int line, std::string message, bool syntax)
        : Error("line " + std::to_string(line) + ": " + message), line_(line), message_(std::move(message)),
          syntax_(syntax) {}

    int line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }
    bool syntax() const noexcept { return syntax_; }

private:
    int line_;
    std::string message_;
    bool syntax_;
};

namespace detail {

struct Token {
    std::string text;
    bool quoted = false; // the whole token was a quoted string
};

inline std::vector<Token> tokenize(std::string_view line, int lineno) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size() || line[i] == '#') break;
        Token tok;
        bool any_quote = false;
        bool only_quote = line[i] == '"';
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            if (line[i] == '"') {
                any_quote = true;
                ++i;
                bool closed = false;
                while (i < line.size()) {
                    char c = line[i++];
                    if (c == '\\' && i < line.size()) {
                        tok.text += line[i++];
                    } else if (c == '"') {
                        closed = true;
                        break;
                    } else {
                        tok.text += c;
                    }
                }
                if (!closed) throw ParseError(lineno, "unterminated string", true);
                if (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') only_quote = false;
            } else if (line[i] == '#') {
                break;
            } else {
                tok.text += line[i++];
            }
        }
        tok.quoted = any_quote && only_quote;
        out.push_back(std::move(tok));
    }
    return out;
}

inline SystemId parse_id(std::string_view s, int lineno) {
    SystemId v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError(lineno, "expected integer, got \"" + std::string(s) + "\"", true);
    return v;
}

struct KeyValues {
    std::map<std::string, std::string, std::less<>> values;
    int line = 0;

    bool has(std::string_view k) const { return values.find(k) != values.end(); }
    const std::string& get(std::string_view k) const {
        auto it = values.find(k);
        if (it == values.end()) throw ParseError(line, "missing " + std::string(k) + "=", true);
        return it->second;
    }
};

inline KeyValues key_values(const std::vector<Token>& toks, std::size_t first, int lineno,
                            std::initializer_list<std::string_view> allowed) {
    KeyValues kv;
    kv.line = lineno;
    for (std::size_t i = first; i < toks.size(); ++i) {
        auto eq = toks[i].text.find('=');
        if (toks[i].quoted || eq == std::string::npos)
            throw ParseError(lineno, "expected key=value, got \"" + toks[i].text + "\"", true);
        std::string key = toks[i].text.substr(0, eq);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ParseError(lineno, "unknown attribute \"" + key + "\"", true);
        if (!kv.values.emplace(key, toks[i].text.substr(eq + 1)).second)
            throw ParseError(lineno, "duplicate attribute \"" + key + "\"", true);
    }
    return kv;
}

inline std::vector<std::string> split(std::string_view s, std::string_view sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + sep.size();
    }
    return out;
}

inline bool is_iso_date(std::string_view s) {
    auto digits = [&](std::size_t from, std::size_t n) {
        if (s.size() < from + n) return false;
        for (std::size_t i = from; i < from + n; ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    if (!(digits(0, 4) && s.size() >= 10 && s[4] == '-' && digits(5, 2) && s[7] == '-' && digits(8, 2))) return false;
    int month = (s[5] - '0') * 10 + (s[6] - '0');
    int day = (s[8] - '0') * 10 + (s[9] - '0');
    if (month < 1 || month > 12 || day < 1 || day > 31) return false;
    if (s.size() == 10) return true;
    // YYYY-MM-DDTHH:MM[:SS][Z]
    if (s[10] != 'T' || !digits(11, 2) || s.size() < 16 || s[13] != ':' || !digits(14, 2)) return false;
    std::size_t i = 16;
    if (i < s.size() && s[i] == ':') {
        if (!digits(i + 1, 2)) return false;
        i += 3;
    }
    if (i < s.size() && s[i] == 'Z') ++i;
    return i == s.size();
}

inline std::vector<std::string> split_arrow(std::string_view s) { return split(s, "->"); }

} // namespace detail

/// Parses `.sosm` text, or the JSON export when the text starts with '{'.
///
/// Syntax problems raise ParseError with `syntax() == true`; a well-formed
/// file describing an invalid model raises ParseError with `syntax() ==
/// false`, located at the line of the offending declaration.
inline SosModel parse_model(std::string_view text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(1, std::string("invalid json: ") + e.what(), true);
        }
        try {
            return model_from_json(j);
        } catch (const ModelError& e) {
            throw ParseError(1, e.what(), false);
        }
    }

    using namespace detail;
    SosModel m;
    bool have_header = false;
    int header_line = 0;
    std::vector<int> system_lines, exchange_lines, adapter_lines, capability_lines;

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto toks = tokenize(raw, lineno);
        if (toks.empty()) continue;
        const std::string& kw = toks[0].text;
        if (toks[0].quoted) throw ParseError(lineno, "expected a keyword", true);

        if (kw == "sos") {
            if (have_header) throw ParseError(lineno, "duplicate sos header", true);
            if (toks.size() < 2 || !toks[1].quoted) throw ParseError(lineno, "sos requires a quoted name", true);
            auto kv = key_values(toks, 2, lineno, {"oim", "t"});
            m.name = toks[1].text;
            m.oim_level = parse_id(kv.get("oim"), lineno);
            if (m.oim_level < 0 || m.oim_level > 4)
                throw ParseError(lineno, "oim level " + std::to_string(m.oim_level) + " out of range 0..4", false);
            if (kv.has("t")) {
                if (!is_iso_date(kv.get("t")))
                    throw ParseError(lineno, "malformed timestamp \"" + kv.get("t") + "\"", true);
                m.timestamp = kv.get("t");
            }
            have_header = true;
            header_line = lineno;
        } else if (kw == "system") {
            if (toks.size() < 3 || !toks[2].quoted)
                throw ParseError(lineno, "expected: system <id> \"<name>\" owner=\"...\"", true);
            auto kv = key_values(toks, 3, lineno, {"owner", "provider"});
            SystemNode s;
            s.id = parse_id(toks[1].text, lineno);
            s.name = toks[2].text;
            s.owner = kv.get("owner");
            if (kv.has("provider")) s.provider = kv.get("provider");
            m.systems.push_back(std::move(s));
            system_lines.push_back(lineno);
        } else if (kw == "exchange") {
            if (toks.size() < 2 || toks[1].text.find('=') != std::string::npos)
                throw ParseError(lineno, "exchange requires a label", true);
            auto kv = key_values(toks, 2, lineno, {"from", "to", "desc", "kind", "versions", "levels", "contract"});
            Exchange e;
            e.label = toks[1].text;
            e.from = parse_id(kv.get("from"), lineno);
            e.to = parse_id(kv.get("to"), lineno);
            if (kv.has("desc")) e.description = kv.get("desc");
            if (kv.has("kind")) {
                auto k = kind_from_string(kv.get("kind"));
                if (!k) throw ParseError(lineno, "unknown kind \"" + kv.get("kind") + "\"", true);
                e.kind = *k;
            }
            if (kv.has("versions")) {
                auto parts = split(kv.get("versions"), "/");
                if (parts.size() != 3)
                    throw ParseError(lineno, "malformed version triple \"" + kv.get("versions") + "\"", false);
                for (const auto& p : parts)
                    if (!is_valid_version(p)) throw ParseError(lineno, "malformed version \"" + p + "\"", false);
                e.versions = VersionTriple{parts[0], parts[1], parts[2]};
            }
            if (kv.has("levels")) {
                for (const auto& l : split(kv.get("levels"), ",")) {
                    auto lv = level_from_string(l);
                    if (!lv) throw ParseError(lineno, "unknown interoperability level \"" + l + "\"", true);
                    e.levels.insert(*lv);
                }
            }
            if (kv.has("contract")) {
                auto c = contract_from_string(kv.get("contract"));
                if (!c) throw ParseError(lineno, "unknown contract class \"" + kv.get("contract") + "\"", true);
                e.contract_override = *c;
            }
            m.exchanges.push_back(std::move(e));
            exchange_lines.push_back(lineno);
        } else if (kw == "adapter") {
            if (toks.size() < 2) throw ParseError(lineno, "adapter requires an exchange label", true);
            auto kv = key_values(toks, 2, lineno, {"from", "to", "hop", "map"});
            Adapter a;
            a.exchange_label = toks[1].text;
            a.from = parse_id(kv.get("from"), lineno);
            a.to = parse_id(kv.get("to"), lineno);
            auto hop = hop_from_string(kv.get("hop"));
            if (!hop) throw ParseError(lineno, "hop must be provider or client", true);
            a.hop = *hop;
            auto vers = split_arrow(kv.get("map"));
            if (vers.size() != 2) throw ParseError(lineno, "map must be <version>-><version>", true);
            a.from_version = vers[0];
            a.to_version = vers[1];
            m.adapters.push_back(std::move(a));
            adapter_lines.push_back(lineno);
        } else if (kw == "capability") {
            if (toks.size() < 2 || !toks[1].quoted) throw ParseError(lineno, "capability requires a quoted name", true);
            auto kv = key_values(toks, 2, lineno, {"path"});
            Capability c;
            c.name = toks[1].text;
            for (const auto& id : split_arrow(kv.get("path"))) c.path.push_back(parse_id(id, lineno));
            m.capabilities.push_back(std::move(c));
            capability_lines.push_back(lineno);
        } else {
            throw ParseError(lineno, "unknown keyword \"" + kw + "\"", true);
        }
    }
    if (!have_header) throw ParseError(lineno == 0 ? 1 : lineno, "missing sos header", true);

    auto errors = structural_errors(m);
    if (!errors.empty()) {
        auto line_of = [&](const Diagnostic& d) {
            switch (d.entity) {
            case EntityKind::system: return system_lines[d.index];
            case EntityKind::exchange: return exchange_lines[d.index];
            case EntityKind::adapter: return adapter_lines[d.index];
            case EntityKind::capability: return capability_lines[d.index];
            case EntityKind::model: break;
            }
            return header_line;
        };
        const Diagnostic* firstErr = &errors.front();
        for (const auto& d : errors)
            if (line_of(d) < line_of(*firstErr)) firstErr = &d;
        throw ParseError(line_of(*firstErr), firstErr->message, false);
    }
    return m;
}

inline SosModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

} // namespace sosm

#endif
