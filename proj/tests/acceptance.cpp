// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sosm/sosm.hpp"

using namespace sosm;
using sosm::test::efs;
using sosm::test::efs_no_adapters;
using sosm::test::models_dir;

namespace {

using Cells = std::map<CellKey, std::vector<std::string>>;

// Hand transcription of the EFS coupling matrix.
const Cells kEfsCells = {
    {{1, 2}, {"1.1", "1.3"}}, {{1, 4}, {"1.2", "1.4"}},
    {{2, 1}, {"2.1"}},        {{2, 4}, {"2.3"}},        {{2, 7}, {"2.2", "2.4"}}, {{2, 9}, {"2.4"}},
    {{3, 2}, {"3.1"}},        {{3, 6}, {"3.1"}},        {{3, 9}, {"3.2"}},
    {{4, 2}, {"4.4"}},        {{4, 7}, {"4.2", "4.3"}},
    {{5, 2}, {"5.1", "5.2"}},
    {{6, 3}, {"6.3"}},        {{6, 9}, {"6.1", "6.2"}},
    {{7, 2}, {"7.1"}},
    {{8, 1}, {"8.2"}},        {{8, 3}, {"8.2"}},        {{8, 4}, {"8.2"}},        {{8, 9}, {"8.2"}},
    {{9, 2}, {"9.1"}},        {{9, 3}, {"9.2"}},
};

// Printed ownership classifications; (8,9) is not printed and is classified by owner.
const std::map<CellKey, ContractClass> kPrintedClasses = {
    {{1, 2}, ContractClass::internal}, {{1, 4}, ContractClass::contract}, {{2, 1}, ContractClass::internal},
    {{2, 4}, ContractClass::contract}, {{2, 7}, ContractClass::contract}, {{2, 9}, ContractClass::contract},
    {{3, 2}, ContractClass::contract}, {{3, 6}, ContractClass::contract}, {{3, 9}, ContractClass::contract},
    {{4, 2}, ContractClass::contract}, {{4, 7}, ContractClass::contract}, {{5, 2}, ContractClass::internal},
    {{6, 3}, ContractClass::contract}, {{6, 9}, ContractClass::contract}, {{7, 2}, ContractClass::internal},
    {{8, 1}, ContractClass::contract}, {{8, 3}, ContractClass::contract}, {{8, 4}, ContractClass::internal},
    {{9, 2}, ContractClass::contract}, {{9, 3}, ContractClass::contract},
};

struct Check {
    std::string detail;
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

template <class T>
std::string str(const T& xs) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& x : xs) {
        os << (first ? "" : ",") << x;
        first = false;
    }
    os << '}';
    return os.str();
}

std::vector<std::string> chain_texts(const CouplingMatrix& m, SystemId s, SystemId t, int hops) {
    std::vector<std::string> out;
    for (const auto& c : emergent_paths(m, s, t, hops)) out.push_back(format_chain(c));
    return out;
}

Check fixture_fidelity() {
    Check c;
    auto m = build_matrix(efs());
    Cells got;
    for (const auto& [key, xs] : m.cells())
        for (const auto& e : xs) got[key].push_back(e.label);
    c.expect(got == kEfsCells, "matrix cells differ from the transcription");
    // every off-diagonal empty cell in the transcription is empty in the render
    auto csv = render(m, MatrixFormat::csv);
    c.expect(csv.find("\n1,1,1.1;1.3,,1.2;1.4,,,,,\n") != std::string::npos, "csv row 1");
    c.expect(csv.find("\n8,8.2,,8.2,8.2,,,,8,8.2\n") != std::string::npos, "csv row 8");
    c.detail = std::to_string(m.cells().size()) + " cells, " + std::to_string(m.instance_count()) +
               " instances, (1,2)=[1.1],[1.3], (8,9)=[8.2]";
    return c;
}

Check sources() {
    Check c;
    auto ss = sources_and_sinks(build_matrix(efs()));
    c.expect(ss.sources == std::set<SystemId>{5, 8}, "sources " + str(ss.sources));
    c.expect(ss.sinks.empty(), "sinks " + str(ss.sinks));
    c.detail = "sources " + str(ss.sources) + ", sinks " + str(ss.sinks);
    return c;
}

Check scc() {
    Check c;
    auto comps = strongly_connected_components(build_matrix(efs()));
    std::vector<std::vector<SystemId>> expected{{1, 2, 3, 4, 6, 7, 9}, {5}, {8}};
    c.expect(comps == expected, "components differ from expected");
    c.expect(comps == oracle::scc_classes(efs()), "components differ from closure oracle");
    for (const auto& k : comps) c.detail += str(k) + " ";
    return c;
}

Check compatibility() {
    Check c;
    const ExchangeRef k11{"1.1", 1, 2};
    auto without = *check_compatibility(efs_no_adapters()).find(k11);
    auto with = *check_compatibility(efs()).find(k11);
    c.expect(without.status == CompatStatus::incompatible, "without adapters");
    c.expect(without.failing_hops.size() == 2, "both hops should fail without adapters");
    c.expect(with.status == CompatStatus::compatible, "with adapters");
    c.detail = "[1.1] 1.6/4.3/2.2: " + std::string(to_string(without.status)) + " without adapters, " +
               std::string(to_string(with.status)) + " with adapters";
    return c;
}

Check contracts() {
    Check c;
    auto cm = contract_map(efs(), build_matrix(efs()));
    c.expect(cm.internal_count == 5, "internal " + std::to_string(cm.internal_count));
    c.expect(cm.contract_count == 16, "contract " + std::to_string(cm.contract_count));
    std::size_t matched = 0;
    for (const auto& cell : cm.cells) {
        auto it = kPrintedClasses.find({cell.from, cell.to});
        if (it == kPrintedClasses.end()) {
            c.expect(cell.from == 8 && cell.to == 9 && cell.classification == ContractClass::contract,
                     "unexpected cell (" + std::to_string(cell.from) + "," + std::to_string(cell.to) + ")");
            continue;
        }
        bool ok = it->second == cell.classification;
        c.expect(ok, "cell (" + std::to_string(cell.from) + "," + std::to_string(cell.to) + ")");
        matched += ok;
    }
    c.detail = std::to_string(cm.internal_count) + " internal, " + std::to_string(cm.contract_count) + " contract, " +
               std::to_string(matched) + "/" + std::to_string(kPrintedClasses.size()) + " printed cells match";
    return c;
}

Check clustering_oracle() {
    Check c;
    std::mt19937 rng(101);
    const int trials = 120;
    for (int t = 0; t < trials; ++t) {
        int n = 1 + static_cast<int>(rng() % 8);
        auto model = oracle::random_model(rng, n, 0.3);
        auto m = build_matrix(model);
        auto ex = cluster_exhaustive(m, 2);
        auto gr = cluster_greedy(m, 2);
        auto o = oracle::best_partition(model, 2);
        c.expect(ex.clusters == o.clusters && ex.cost == o.cost, "trial " + std::to_string(t) + ": oracle mismatch");
        c.expect(gr.cost >= ex.cost, "trial " + std::to_string(t) + ": greedy beat exhaustive");
    }
    c.detail = std::to_string(trials) + " random models, n <= 8";
    return c;
}

Check path_oracle() {
    Check c;
    std::mt19937 rng(202);
    const int trials = 100;
    std::size_t compared = 0;
    for (int t = 0; t < trials; ++t) {
        int n = 2 + static_cast<int>(rng() % 6);
        auto model = oracle::random_dag(rng, n, 0.5);
        auto m = build_matrix(model);
        for (SystemId s = 1; s <= n; ++s)
            for (SystemId d = 1; d <= n; ++d) {
                if (s == d) continue;
                std::vector<std::vector<SystemId>> got;
                for (const auto& ch : emergent_paths(m, s, d, n - 1)) got.push_back(ch.systems);
                c.expect(got == oracle::simple_paths(model, s, d, n - 1),
                         "trial " + std::to_string(t) + " " + std::to_string(s) + "->" + std::to_string(d));
                ++compared;
            }
    }
    c.detail = std::to_string(trials) + " random DAGs, " + std::to_string(compared) + " (s,t) pairs";
    return c;
}

Check infrastructure() {
    Check c;
    std::vector<std::pair<SystemId, SystemId>> links;
    for (int a = 1; a <= 4; ++a)
        for (int b = 1; b <= 4; ++b)
            if (a != b) links.push_back({a, b});
    auto mesh = sosm::test::tiny(4, links);
    auto r = introduce_infrastructure(mesh, {1, 2, 3, 4}, "hub");
    c.expect(r.report.full_mesh_interfaces == 12, "full mesh interfaces");
    c.expect(r.report.hub_interfaces == 8, "hub interfaces");
    c.expect(r.report.hub_links == 8, "hub links");
    auto before = oracle::transitive_closure(mesh);
    auto after = oracle::transitive_closure(r.model);
    for (SystemId s = 1; s <= 4; ++s) {
        auto reach = after[s];
        reach.erase(r.report.hub_id);
        c.expect(reach == before[s], "reachability from " + std::to_string(s));
    }
    c.detail = std::to_string(r.report.full_mesh_interfaces) + " vs " + std::to_string(r.report.hub_interfaces) +
               " interfaces, closure preserved";
    return c;
}

Check permutation_invariance() {
    Check c;
    std::mt19937 rng(303);
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        int n = 2 + static_cast<int>(rng() % 6);
        auto model = oracle::random_model(rng, n, 0.35);
        auto m = build_matrix(model);
        auto order = m.order();
        std::shuffle(order.begin(), order.end(), rng);
        auto p = permute(m, order);
        auto shuffled = model;
        std::shuffle(shuffled.systems.begin(), shuffled.systems.end(), rng);
        std::shuffle(shuffled.exchanges.begin(), shuffled.exchanges.end(), rng);
        auto tag = "trial " + std::to_string(t) + ": ";

        c.expect(density(p) == density(m), tag + "density");
        auto a = sources_and_sinks(m), b = sources_and_sinks(p);
        c.expect(a.sources == b.sources && a.sinks == b.sinks, tag + "sources/sinks");
        c.expect(strongly_connected_components(p) == strongly_connected_components(m), tag + "scc");
        bool paths_ok = true;
        for (SystemId s = 1; s <= n; ++s)
            for (SystemId d = 1; d <= n; ++d)
                if (s != d) paths_ok = paths_ok && chain_texts(p, s, d, 3) == chain_texts(m, s, d, 3);
        c.expect(paths_ok, tag + "paths");
        c.expect(check_compatibility(shuffled) == check_compatibility(model), tag + "compat");
        c.expect(contract_map(shuffled, p) == contract_map(model, m), tag + "contracts");
    }
    c.detail = std::to_string(trials) + " random permutations";
    return c;
}

Check evolution_impact_check() {
    Check c;
    std::vector<VersionChange> changes;
    for (SystemId to : {1, 3, 4, 9}) changes.push_back({{"8.2", 8, to}, Side::infrastructure, "2.0"});
    auto r = evolution_impact(efs(), changes);
    c.expect(r.newly_incompatible.size() == 4, "newly incompatible " + std::to_string(r.newly_incompatible.size()));
    c.expect(r.affected_systems == std::set<SystemId>{1, 3, 4, 8, 9}, "affected " + str(r.affected_systems));
    c.expect(r.broken_capabilities.size() == 1 && r.broken_capabilities[0].hop == CellKey{8, 1},
             "capability should break at 8->1");
    c.detail = std::to_string(r.newly_incompatible.size()) + " exchanges, affected " + str(r.affected_systems);
    if (!r.broken_capabilities.empty())
        c.detail += ", capability broken at " + std::to_string(r.broken_capabilities[0].hop.first) + "->" +
                    std::to_string(r.broken_capabilities[0].hop.second);
    return c;
}

Check timeline() {
    Check c;
    c.expect(diff(efs(), efs()).empty(), "diff(m,m) not empty");
    auto dir = models_dir() + "/timeline/efs_";
    Bundle b({load_model(dir + "2024-06-01.sosm"), load_model(dir + "2024-07-01.sosm"),
              load_model(dir + "2024-08-01.sosm")});
    auto r = bundle_report(b);
    std::size_t non_empty = 0;
    for (const auto& d : r.diffs) non_empty += !d.empty();
    c.expect(non_empty == 1, "non-empty diffs " + std::to_string(non_empty));
    c.expect(!r.diffs.empty() && !r.diffs[0].empty(), "change should appear in snapshot 2");
    std::vector<std::size_t> counts;
    for (const auto& s : r.summaries) counts.push_back(s.incompatible);
    c.expect(counts == std::vector<std::size_t>{0, 1, 1}, "incompatible counts " + str(counts));
    c.detail = std::to_string(non_empty) + " non-empty diff, incompatible per snapshot " + str(counts);
    return c;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
        {"fixture fidelity", fixture_fidelity},
        {"sources and sinks", sources},
        {"strongly connected components", scc},
        {"version compatibility", compatibility},
        {"contract map", contracts},
        {"clustering oracle equivalence", clustering_oracle},
        {"path oracle equivalence", path_oracle},
        {"infrastructure arithmetic", infrastructure},
        {"permutation invariance", permutation_invariance},
        {"evolution impact", evolution_impact_check},
        {"timeline", timeline},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            c = criteria[i].second();
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        bool ok = c.failures.empty();
        failed += !ok;
        std::printf("%s [%zu] %s: %s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), c.detail.c_str());
        for (std::size_t k = 0; k < c.failures.size() && k < 5; ++k) std::printf("    %s\n", c.failures[k].c_str());
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed ? 1 : 0;
}
