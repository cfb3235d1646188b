#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sosm/governance.hpp"

using namespace sosm;
using sosm::test::efs;
using sosm::test::tiny;

namespace {

const ContractCell* find_cell(const ContractMap& cm, SystemId a, SystemId b) {
    for (const auto& c : cm.cells)
        if (c.from == a && c.to == b) return &c;
    return nullptr;
}

SosModel mesh(int k) {
    std::vector<std::pair<SystemId, SystemId>> links;
    for (int a = 1; a <= k; ++a)
        for (int b = 1; b <= k; ++b)
            if (a != b) links.push_back({a, b});
    return tiny(k, links);
}

} // namespace

TEST(ContractMap, Efs) {
    auto cm = contract_map(efs(), build_matrix(efs()));
    EXPECT_EQ(cm.cells.size(), 21u);
    EXPECT_EQ(cm.internal_count, 5u);
    EXPECT_EQ(cm.contract_count, 16u);

    auto c14 = find_cell(cm, 1, 4);
    ASSERT_NE(c14, nullptr);
    EXPECT_EQ(c14->classification, ContractClass::contract);
    EXPECT_EQ(c14->labels, (std::vector<std::string>{"1.2", "1.4"}));
    EXPECT_EQ(find_cell(cm, 5, 2)->classification, ContractClass::internal);

    auto c27 = find_cell(cm, 2, 7);
    EXPECT_EQ(c27->classification, ContractClass::contract);
    EXPECT_TRUE(c27->overridden);
    EXPECT_EQ(find_cell(cm, 8, 9)->classification, ContractClass::contract);
}

TEST(ContractMap, Csv) {
    auto csv = contract_csv(contract_map(efs(), build_matrix(efs())));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "from,to,labels,src_owner,dst_owner,classification");
    EXPECT_NE(csv.find("\n1,4,1.2;1.4,Fire brigade,Local Civil Authority,contract\n"), std::string::npos) << csv;
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 22);
}

TEST(ContractMap, InvariantUnderOwnerRenaming) {
    auto m = efs();
    auto before = contract_map(m, build_matrix(m));
    for (auto& s : m.systems) s.owner = "renamed " + s.owner;
    auto after = contract_map(m, build_matrix(m));
    ASSERT_EQ(before.cells.size(), after.cells.size());
    for (std::size_t i = 0; i < before.cells.size(); ++i)
        EXPECT_EQ(before.cells[i].classification, after.cells[i].classification);
}

TEST(ContractMap, MixedOverridesThrow) {
    auto m = efs();
    m.find_exchange({"2.2", 2, 7})->contract_override.reset();
    EXPECT_THROW(contract_map(m, build_matrix(m)), ModelError);
}

TEST(Integrators, EfsTopEntriesTouchTheHeadquarter) {
    auto r = integrator_report(efs(), build_matrix(efs()));
    ASSERT_EQ(r.size(), 27u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(r[i].exchange.from == 2 || r[i].exchange.to == 2);
    for (std::size_t i = 1; i < r.size(); ++i) EXPECT_GE(r[i - 1].score, r[i].score);
    auto it = std::find_if(r.begin(), r.end(), [](const auto& e) { return e.exchange == ExchangeRef{"1.1", 1, 2}; });
    ASSERT_NE(it, r.end());
    EXPECT_EQ(it->score, 19u);
    EXPECT_EQ(it->suggested_owner, "Fire brigade");
}

TEST(Integrators, SingleExchangeAndTie) {
    auto m = tiny(2, {{1, 2}});
    m.systems[1].owner = "P";
    auto r = integrator_report(m, build_matrix(m));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].score, 2u);
    EXPECT_EQ(r[0].suggested_owner, "O"); // tie goes to the source
}

TEST(Integrators, HigherEndpointWins) {
    auto m = tiny(3, {{1, 2}, {3, 2}});
    m.systems[1].owner = "Hub";
    auto r = integrator_report(m, build_matrix(m));
    for (const auto& e : r) EXPECT_EQ(e.suggested_owner, "Hub");
}

TEST(InteropGaps, MissingLevels) {
    auto m = tiny(2, {{1, 2}, {2, 1}});
    m.exchanges[0].levels = {InteropLevel::physical, InteropLevel::procedural, InteropLevel::operational};
    m.exchanges[1].levels = {InteropLevel::physical};
    auto gaps = interop_gaps(m);
    ASSERT_EQ(gaps.size(), 1u);
    EXPECT_EQ(gaps[0].exchange, (ExchangeRef{"2.1", 2, 1}));
    EXPECT_EQ(gaps[0].missing, (std::vector<InteropLevel>{InteropLevel::procedural, InteropLevel::operational}));
    EXPECT_EQ(interop_gaps(efs()).size(), 27u);
}

TEST(ComposeSos, TwoNations) {
    auto a = efs(), b = efs();
    a.name = "A";
    b.name = "B";
    auto c = compose_sos({a, b}, {{{0, 4}, {1, 4}, "coord", "", true}, {{0, 8}, {1, 8}, "wx", "", false}});
    EXPECT_EQ(c.model.systems.size(), 18u);
    EXPECT_EQ(c.model.exchanges.size(), 54u + 3u);
    EXPECT_EQ(c.bridge_exchanges, 3u);
    EXPECT_EQ(c.id_map[1].at(4), 13);
    EXPECT_EQ(c.model.find_system(13)->name, "B.4");
    EXPECT_EQ(c.configurations, 4u);
    EXPECT_EQ(c.directed_pairs, 2u);
    EXPECT_TRUE(validate_model(c.model).empty() || !has_errors(validate_model(c.model)));
}

TEST(ComposeSos, EfsBridgesAllPairsOfTwo) {
    auto a = efs(), b = efs();
    a.name = "A";
    b.name = "B";
    std::vector<Bridge> bridges;
    for (SystemId id : {1, 2, 4, 8}) bridges.push_back({{0, id}, {1, id}, "br", "", true});
    auto c = compose_sos({a, b}, bridges);
    EXPECT_EQ(c.model.exchanges.size(), 54u + 8u);
}

TEST(ComposeSos, ThreeModelsCounts) {
    auto x = tiny(2, {{1, 2}}), y = tiny(2, {{2, 1}}), z = tiny(1, {});
    x.name = "x";
    y.name = "y";
    z.name = "z";
    auto c = compose_sos({x, y, z}, {});
    EXPECT_EQ(c.configurations, 9u);
    EXPECT_EQ(c.directed_pairs, 6u);
    EXPECT_EQ(c.model.systems.size(), 5u);
}

TEST(ComposeSos, Errors) {
    auto a = efs(), b = efs();
    a.name = "A";
    b.name = "B";
    EXPECT_THROW(compose_sos({a, b}, {{{0, 4}, {1, 40}, "x", "", false}}), QueryError);
    EXPECT_THROW(compose_sos({a, b}, {{{0, 4}, {2, 4}, "x", "", false}}), QueryError);
    EXPECT_THROW(compose_sos({a, a}, {}), QueryError);
    EXPECT_THROW(compose_sos({}, {}), QueryError);
    // the same bridge twice duplicates an instance
    EXPECT_THROW(compose_sos({a, b}, {{{0, 4}, {1, 4}, "x", "", false}, {{0, 4}, {1, 4}, "x", "", false}}), ModelError);
}

TEST(Infrastructure, FullMeshOfFour) {
    auto r = introduce_infrastructure(mesh(4), {1, 2, 3, 4}, "bus");
    EXPECT_EQ(r.report.hub_id, 5);
    EXPECT_EQ(r.report.full_mesh_interfaces, 12u);
    EXPECT_EQ(r.report.hub_interfaces, 8u);
    EXPECT_EQ(r.report.rerouted_instances, 12u);
    EXPECT_EQ(r.report.hub_links, 8u);
    EXPECT_EQ(r.report.interface_delta, 4);
    EXPECT_FALSE(r.report.warning);
    EXPECT_FALSE(has_errors(validate_model(r.model)));
}

TEST(Infrastructure, EfsPreservesReachability) {
    std::set<SystemId> scope{1, 2, 3, 4};
    auto r = introduce_infrastructure(efs(), scope, "Common picture");
    EXPECT_EQ(r.report.hub_id, 10);
    EXPECT_FALSE(has_errors(validate_model(r.model)));
    auto before = oracle::transitive_closure(efs());
    auto after = oracle::transitive_closure(r.model);
    for (auto s : efs().system_ids()) {
        auto reach = after[s];
        reach.erase(10);
        EXPECT_EQ(reach, before[s]) << "from " << s;
    }
    // capability path gains the hub between in-scope neighbours
    EXPECT_EQ(r.model.capabilities[0].path, (std::vector<SystemId>{8, 1, 10, 2, 9}));
    for (const auto& st : check_capabilities(r.model, build_matrix(r.model))) EXPECT_TRUE(st.intact());
}

TEST(Infrastructure, SmallScopeWarns) {
    auto r = introduce_infrastructure(mesh(3), {1, 2}, "hub");
    EXPECT_EQ(r.report.full_mesh_interfaces, 2u);
    EXPECT_EQ(r.report.hub_interfaces, 4u);
    ASSERT_TRUE(r.report.warning);
    EXPECT_NE(r.report.warning->find("(4)"), std::string::npos);
}

TEST(Infrastructure, Errors) {
    EXPECT_THROW(introduce_infrastructure(efs(), {1}, "h"), QueryError);
    EXPECT_THROW(introduce_infrastructure(efs(), {1, 99}, "h"), QueryError);
    EXPECT_THROW(introduce_infrastructure(efs(), {1, 2}, ""), QueryError);
}
