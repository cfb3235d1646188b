#ifndef SOSM_CLI_HPP
#define SOSM_CLI_HPP

#include <algorithm>
#include <iostream>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sosm/clustering.hpp"
#include "sosm/compatibility.hpp"
#include "sosm/emergence.hpp"
#include "sosm/export.hpp"
#include "sosm/governance.hpp"
#include "sosm/matrix.hpp"
#include "sosm/model.hpp"
#include "sosm/parse.hpp"
#include "sosm/timeline.hpp"

namespace sosm::cli {

enum ExitCode : int { kOk = 0, kInvalidModel = 1, kFindings = 2, kUsage = 3 };

namespace detail {

/// Thrown inside handlers to leave with a specific exit code.
struct Exit {
    int code;
    std::string message;
};

inline std::string join_ids(const auto& ids, std::string_view sep = ",") {
    std::string out;
    bool first = true;
    for (auto id : ids) {
        out += (first ? "" : std::string(sep)) + std::to_string(id);
        first = false;
    }
    return out;
}

inline SosModel load(const std::string& path) {
    try {
        return load_model(path);
    } catch (const ParseError& e) {
        throw Exit{e.syntax() ? kUsage : kInvalidModel, path + ":" + std::to_string(e.line()) + ": " + e.message()};
    } catch (const Error& e) {
        throw Exit{kUsage, e.what()};
    }
}

inline VersionChange parse_set(const std::string& s) {
    static const std::regex re(R"(^(.+)@(-?\d+)->(-?\d+):([a-z]+)=(.+)$)");
    std::smatch mt;
    if (!std::regex_match(s, mt, re)) throw Exit{kUsage, "malformed --set \"" + s + "\""};
    auto side = side_from_string(mt[4].str());
    if (!side) throw Exit{kUsage, "unknown side \"" + mt[4].str() + "\""};
    return {{mt[1].str(), std::stoi(mt[2].str()), std::stoi(mt[3].str())}, *side, mt[5].str()};
}

inline Bridge parse_bridge(const std::string& s, const std::vector<SosModel>& models) {
    static const std::regex re(R"(^(.+)\.(\d+)(<->|->)(.+)\.(\d+):(.+)$)");
    std::smatch mt;
    if (!std::regex_match(s, mt, re)) throw Exit{kUsage, "malformed --bridge \"" + s + "\""};
    auto model_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < models.size(); ++i)
            if (models[i].name == name) return i;
        throw Exit{kUsage, "--bridge names unknown model \"" + name + "\""};
    };
    Bridge b;
    b.a = {model_index(mt[1].str()), std::stoi(mt[2].str())};
    b.b = {model_index(mt[4].str()), std::stoi(mt[5].str())};
    b.bidirectional = mt[3].str() == "<->";
    b.label = mt[6].str();
    b.description = b.label;
    return b;
}

inline std::set<SystemId> parse_id_list(const std::string& s) {
    std::set<SystemId> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.insert(std::stoi(item));
        } catch (const std::exception&) {
            throw Exit{kUsage, "malformed id \"" + item + "\""};
        }
    }
    return out;
}

inline std::string matrix_json(const CouplingMatrix& m) {
    nlohmann::json j;
    j["order"] = m.order();
    j["cells"] = nlohmann::json::array();
    for (const auto& [key, xs] : m.cells()) {
        std::vector<std::string> labels;
        for (const auto& e : xs) labels.push_back(e.label);
        j["cells"].push_back({{"from", key.first}, {"to", key.second}, {"labels", labels}});
    }
    return j.dump(2) + "\n";
}

inline std::string compat_json(const CompatReport& r) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : r.entries) {
        nlohmann::json hops = nlohmann::json::array();
        for (auto h : e.failing_hops) hops.push_back(std::string(to_string(h)));
        j.push_back({{"label", e.ref.label},
                     {"from", e.ref.from},
                     {"to", e.ref.to},
                     {"status", std::string(to_string(e.status))},
                     {"failing_hops", hops}});
    }
    return j.dump(2) + "\n";
}

inline ModelFormat model_format(const std::string& f) {
    if (f == "json") return ModelFormat::json;
    if (f == "dot") return ModelFormat::dot;
    return ModelFormat::sosm;
}

} // namespace detail

/// Runs one `sosm` invocation. `args` excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    using namespace detail;
    CLI::App app{"N-squared coupling-matrix analysis of systems of systems", "sosm"};
    app.require_subcommand(1);

    std::string file;
    std::vector<std::string> files;
    std::string format = "text";
    bool strict = false;
    auto add_file = [&](CLI::App* sub) { sub->add_option("model", file, "Model file (.sosm or .json)")->required(); };
    auto add_format = [&](CLI::App* sub, std::vector<std::string> allowed) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember(allowed));
    };
    auto add_strict = [&](CLI::App* sub) { sub->add_flag("--strict", strict, "Exit 2 when findings exist"); };

    auto* validate = app.add_subcommand("validate", "Report model errors and warnings");
    add_file(validate);
    add_strict(validate);

    std::string order_spec;
    auto* matrix = app.add_subcommand("matrix", "Render the coupling matrix");
    add_file(matrix);
    add_format(matrix, {"text", "csv", "json", "dot"});
    matrix->add_option("--order", order_spec, "Comma-separated row/column order");

    SystemId from = 0, to = 0;
    int max_hops = 6;
    auto* paths = app.add_subcommand("paths", "Enumerate emergent-service chains");
    add_file(paths);
    paths->add_option("--from", from, "Source system")->required();
    paths->add_option("--to", to, "Target system")->required();
    paths->add_option("--max-hops", max_hops, "Maximum hops per chain")->capture_default_str();

    auto* scc = app.add_subcommand("scc", "Interaction loops (strongly connected components)");
    add_file(scc);
    auto* sources = app.add_subcommand("sources", "Sources and sinks");
    add_file(sources);

    std::optional<SystemId> system;
    auto* connectivity = app.add_subcommand("connectivity", "Connectivity indices");
    add_file(connectivity);
    connectivity->add_option("--system", system, "Single system");

    double pow = 2.0;
    std::string method;
    auto* cluster = app.add_subcommand("cluster", "Block-diagonal clustering");
    add_file(cluster);
    cluster->add_option("--pow", pow, "Cluster size exponent")->capture_default_str();
    cluster->add_option("--method", method, "exhaustive|greedy")->check(CLI::IsMember({"exhaustive", "greedy"}));

    auto* compat = app.add_subcommand("compat", "Version compatibility");
    add_file(compat);
    add_format(compat, {"text", "json"});
    add_strict(compat);

    std::vector<std::string> sets;
    std::string side_name, to_version;
    auto* impact = app.add_subcommand("impact", "Asynchronous-evolution impact of version changes");
    add_file(impact);
    add_strict(impact);
    impact->add_option("--set", sets, "<label>@<from>-><to>:<side>=<version>");
    auto* impact_system = impact->add_option("--system", system, "Bump every versioned exchange provided by N");
    impact->add_option("--side", side_name, "provider|infrastructure|client")->needs(impact_system);
    impact->add_option("--to", to_version, "New version for --system")->needs(impact_system);

    auto* contracts = app.add_subcommand("contracts", "Ownership and contract cells");
    add_file(contracts);
    add_format(contracts, {"text", "csv"});

    std::size_t top = 0;
    auto* integrators = app.add_subcommand("integrators", "Exchanges ranked by connectivity");
    add_file(integrators);
    integrators->add_option("--top", top, "Show only the first N entries (0 = all)");

    auto* interop = app.add_subcommand("interop", "Undeclared interoperability levels");
    add_file(interop);
    add_strict(interop);

    std::vector<std::string> bridges;
    auto* compose = app.add_subcommand("compose", "Merge models with bridges");
    compose->add_option("models", files, "Model files")->required();
    compose->add_option("--bridge", bridges, "A.4<->B.4:label or A.2->B.2:label");
    add_format(compose, {"text", "json", "dot", "sosm"});

    std::string scope_spec, hub;
    auto* infra = app.add_subcommand("infra", "Reroute a scope through a common infrastructure");
    add_file(infra);
    infra->add_option("--scope", scope_spec, "Comma-separated system ids")->required();
    infra->add_option("--hub", hub, "Hub system name")->required();
    add_format(infra, {"text", "json", "dot", "sosm"});

    auto* timeline = app.add_subcommand("timeline", "Diff a time-ordered bundle of snapshots");
    timeline->add_option("models", files, "Snapshot files in time order")->required();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*validate) {
            auto m = load(file);
            auto ds = validate_model(m);
            std::size_t errors = 0, warnings = 0;
            for (const auto& d : ds) {
                err << format_diagnostic(d) << '\n';
                (d.severity == Severity::error ? errors : warnings)++;
            }
            out << m.name << ": " << m.systems.size() << " systems, " << m.exchanges.size() << " exchanges, "
                << errors << " errors, " << warnings << " warnings\n";
            if (errors) return kInvalidModel;
            return strict && warnings ? kFindings : kOk;
        }
        if (*compose) {
            std::vector<SosModel> models;
            for (const auto& f : files) models.push_back(load(f));
            std::vector<Bridge> bs;
            for (const auto& b : bridges) bs.push_back(parse_bridge(b, models));
            auto c = compose_sos(models, bs);
            if (format == "text") {
                out << "composed: " << c.model.name << '\n'
                    << "models: " << c.model_count << '\n'
                    << "systems: " << c.model.systems.size() << '\n'
                    << "exchanges: " << c.model.exchanges.size() << '\n'
                    << "bridges: " << c.bridge_count << " (" << c.bridge_exchanges << " exchanges)\n"
                    << "configurations (n^2): " << c.configurations << '\n'
                    << "directed inter-SoS pairs (n(n-1)): " << c.directed_pairs << '\n';
            } else {
                out << export_model(c.model, model_format(format));
            }
            return kOk;
        }
        if (*timeline) {
            std::vector<SosModel> snaps;
            for (const auto& f : files) snaps.push_back(load(f));
            Bundle bundle(std::move(snaps));
            out << format_bundle_report(bundle, bundle_report(bundle));
            return kOk;
        }

        auto model = load(file);
        auto mat = build_matrix(model);

        if (*matrix) {
            if (!order_spec.empty()) {
                std::vector<SystemId> order;
                std::stringstream ss(order_spec);
                std::string item;
                while (std::getline(ss, item, ',')) order.push_back(std::stoi(item));
                mat = permute(mat, order);
            }
            if (format == "csv")
                out << render(mat, MatrixFormat::csv);
            else if (format == "json")
                out << matrix_json(mat);
            else if (format == "dot")
                out << export_model(model, ModelFormat::dot);
            else
                out << render(mat, MatrixFormat::text);
        } else if (*paths) {
            for (const auto& c : emergent_paths(mat, from, to, max_hops)) out << format_chain(c) << '\n';
        } else if (*scc) {
            for (const auto& comp : strongly_connected_components(mat)) out << '{' << join_ids(comp) << "}\n";
        } else if (*sources) {
            auto ss = sources_and_sinks(mat);
            out << "sources: {" << join_ids(ss.sources) << "}\n";
            out << "sinks: {" << join_ids(ss.sinks) << "}\n";
        } else if (*connectivity) {
            std::vector<SystemId> ids = system ? std::vector<SystemId>{*system} : mat.order();
            out << "system,in_cells,out_cells,in_instances,out_instances,total_instances\n";
            for (auto id : ids) {
                auto ci = connectivity_index(mat, id);
                out << id << ',' << ci.in_cells << ',' << ci.out_cells << ',' << ci.in_instances << ','
                    << ci.out_instances << ',' << ci.total_instances << '\n';
            }
        } else if (*cluster) {
            bool exhaustive = method.empty() ? mat.size() <= kExhaustiveLimit : method == "exhaustive";
            auto c = exhaustive ? cluster_exhaustive(mat, pow) : cluster_greedy(mat, pow);
            out << format_clustering(mat, c);
            out << "order: " << join_ids(c.order) << '\n';
        } else if (*compat) {
            auto r = check_compatibility(model);
            out << (format == "json" ? compat_json(r) : format_compat(r));
            if (strict && r.count(CompatStatus::incompatible)) return kFindings;
        } else if (*impact) {
            std::vector<VersionChange> changes;
            for (const auto& s : sets) changes.push_back(parse_set(s));
            if (system) {
                auto side = side_from_string(side_name);
                if (!side || to_version.empty()) throw Exit{kUsage, "--system requires --side and --to"};
                auto expanded = expand_system_change(model, *system, *side, to_version);
                if (expanded.empty()) err << "note: system " << *system << " provides no versioned exchange\n";
                changes.insert(changes.end(), expanded.begin(), expanded.end());
            }
            auto r = evolution_impact(model, changes);
            out << format_impact(r);
            if (strict && (!r.newly_incompatible.empty() || !r.broken_capabilities.empty())) return kFindings;
        } else if (*contracts) {
            auto cm = contract_map(model, mat);
            if (format == "csv") {
                out << contract_csv(cm);
            } else {
                for (const auto& c : cm.cells)
                    out << '(' << c.from << ',' << c.to << ") " << to_string(c.classification)
                        << (c.overridden ? " (override)" : "") << ": " << c.src_owner << " -> " << c.dst_owner << '\n';
                out << "internal: " << cm.internal_count << ", contract: " << cm.contract_count << '\n';
            }
        } else if (*integrators) {
            auto r = integrator_report(model, mat);
            if (top && r.size() > top) r.resize(top);
            for (const auto& e : r)
                out << to_string(e.exchange) << " score=" << e.score << " owner=" << e.suggested_owner << '\n';
        } else if (*interop) {
            auto gaps = interop_gaps(model);
            for (const auto& g : gaps) {
                out << to_string(g.exchange) << " missing:";
                for (auto l : g.missing) out << ' ' << to_string(l);
                out << '\n';
            }
            if (strict && !gaps.empty()) return kFindings;
        } else if (*infra) {
            auto res = introduce_infrastructure(model, parse_id_list(scope_spec), hub);
            if (res.report.warning) err << "warning: " << *res.report.warning << '\n';
            if (format == "text")
                out << format_infrastructure(res.report);
            else
                out << export_model(res.model, model_format(format));
        }
        return kOk;
    } catch (const Exit& e) {
        err << "sosm: " << e.message << '\n';
        return e.code;
    } catch (const ModelError& e) {
        err << "sosm: " << e.what() << '\n';
        return kInvalidModel;
    } catch (const Error& e) {
        err << "sosm: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "sosm: " << e.what() << '\n';
        return kUsage;
    }
}

} // namespace sosm::cli

#endif
