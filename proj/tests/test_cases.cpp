// Case data model: bundled fixtures, their structural invariants, the strict
// JSON schema, and the validation catalogue.

#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "sparsched/fixtures.hpp"
#include "test_util.hpp"

using namespace sparsched;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("bundled fixtures validate and carry the advertised shape") {
    const NetworkCase net = make_ieee24_fixture();
    CHECK_NOTHROW(net.validate());
    CHECK(net.name == "ieee24-5bess");
    CHECK(net.buses.size() == 24);
    CHECK(net.reference_bus == 13);
    CHECK(net.lines.size() == 34);
    CHECK(net.generators.size() == 14);
    CHECK(net.bess.size() == 5);
    CHECK(net.profiles.wind.size() == 3);

    // Hourly peak load sums to the design value across buses.
    double peak = 0.0;
    for (int t = 0; t < kHorizon; ++t) {
        double tot = 0.0;
        for (const auto& [b, v] : net.profiles.load) {
            (void)b;
            tot += v[t];
        }
        peak = std::max(peak, tot);
    }
    CHECK_THAT(peak, WithinRel(2000.0, 1e-9));

    // Generation fleet can cover peak load alone.
    double fleet = 0.0;
    for (const auto& g : net.generators) fleet += g.p_max;
    CHECK(fleet > peak);

    const MicrogridCase mg = make_microgrid_fixture();
    CHECK_NOTHROW(mg.validate());
    CHECK(mg.name == "microgrid-1bess");
    CHECK(mg.generators.size() == 1);
    CHECK(mg.bess.size() == 1);
    CHECK(mg.profiles.buy_price.size() == 24);
    for (int t = 0; t < kHorizon; ++t) {
        CHECK(mg.profiles.sell_price[t] < mg.profiles.buy_price[t]);
    }
    // The tie plus local resources can always cover load.
    double gmax = 0.0;
    for (const auto& g : mg.generators) gmax += g.p_max;
    for (int t = 0; t < kHorizon; ++t) {
        CHECK(mg.load()[t] <= mg.profiles.tie_limit_mw + gmax +
                                  mg.bess[0].p_disc_max);
    }
}

TEST_CASE("stripping storage removes it and nothing else") {
    const NetworkCase base = make_ieee24_fixture();
    const NetworkCase bare = strip_bess(base);
    CHECK_NOTHROW(bare.validate());
    CHECK(bare.bess.empty());
    CHECK(bare.name == base.name + "-nobess");
    CHECK(bare.generators.size() == base.generators.size());
    CHECK(bare.lines.size() == base.lines.size());

    const MicrogridCase mg = strip_bess(make_microgrid_fixture());
    CHECK(mg.bess.empty());
    CHECK_NOTHROW(mg.validate());
}

TEST_CASE("fixture lookup by name tags the case kind") {
    const AnyCase a = fixture_by_name("ieee24-5bess");
    CHECK(a.kind == AnyCase::Kind::Network);
    CHECK(a.network.name == "ieee24-5bess");
    const AnyCase b = fixture_by_name("microgrid-1bess");
    CHECK(b.kind == AnyCase::Kind::Microgrid);
    const AnyCase c = fixture_by_name("ieee24-nobess");
    CHECK(c.kind == AnyCase::Kind::Network);
    CHECK(c.network.bess.empty());
    const AnyCase d = fixture_by_name("microgrid-nobess");
    CHECK(d.kind == AnyCase::Kind::Microgrid);
    CHECK(d.microgrid.bess.empty());
    CHECK_THROWS_AS(fixture_by_name("no-such-case"), ConfigError);
}

TEST_CASE("network JSON round trip preserves every field") {
    testutil::TempDir tmp;
    const NetworkCase c = make_ieee24_fixture();
    save_case(to_json(c), tmp.file("net.json"));
    const AnyCase back = load_case(tmp.file("net.json"));
    REQUIRE(back.kind == AnyCase::Kind::Network);
    const NetworkCase& r = back.network;
    CHECK(r.name == c.name);
    CHECK(r.buses == c.buses);
    CHECK(r.reference_bus == c.reference_bus);
    REQUIRE(r.generators.size() == c.generators.size());
    for (std::size_t i = 0; i < c.generators.size(); ++i) {
        CHECK(r.generators[i].name == c.generators[i].name);
        CHECK(r.generators[i].bus == c.generators[i].bus);
        CHECK(r.generators[i].p_min == c.generators[i].p_min);
        CHECK(r.generators[i].p_max == c.generators[i].p_max);
        CHECK(r.generators[i].ramp == c.generators[i].ramp);
        CHECK(r.generators[i].cost == c.generators[i].cost);
        CHECK(r.generators[i].no_load_cost == c.generators[i].no_load_cost);
        CHECK(r.generators[i].startup_cost == c.generators[i].startup_cost);
    }
    REQUIRE(r.lines.size() == c.lines.size());
    for (std::size_t i = 0; i < c.lines.size(); ++i) {
        CHECK(r.lines[i].name == c.lines[i].name);
        CHECK(r.lines[i].from_bus == c.lines[i].from_bus);
        CHECK(r.lines[i].to_bus == c.lines[i].to_bus);
        CHECK(r.lines[i].susceptance == c.lines[i].susceptance);
        CHECK(r.lines[i].limit == c.lines[i].limit);
    }
    REQUIRE(r.bess.size() == c.bess.size());
    for (std::size_t i = 0; i < c.bess.size(); ++i) {
        CHECK(r.bess[i].name == c.bess[i].name);
        CHECK(r.bess[i].bus == c.bess[i].bus);
        CHECK(r.bess[i].e_max == c.bess[i].e_max);
        CHECK(r.bess[i].e_initial == c.bess[i].e_initial);
        CHECK(r.bess[i].p_char_max == c.bess[i].p_char_max);
        CHECK(r.bess[i].p_disc_max == c.bess[i].p_disc_max);
        CHECK(r.bess[i].eta_char == c.bess[i].eta_char);
        CHECK(r.bess[i].eta_disc == c.bess[i].eta_disc);
        CHECK(r.bess[i].econ.capital_cost == c.bess[i].econ.capital_cost);
        CHECK(r.bess[i].econ.salvage_value == c.bess[i].econ.salvage_value);
        CHECK(r.bess[i].econ.soh_eol == c.bess[i].econ.soh_eol);
        CHECK(r.bess[i].econ.soh_now == c.bess[i].econ.soh_now);
    }
    CHECK(r.profiles.temperature_c == c.profiles.temperature_c);
    CHECK(r.profiles.load == c.profiles.load);
    REQUIRE(r.profiles.wind.size() == c.profiles.wind.size());
    for (std::size_t i = 0; i < c.profiles.wind.size(); ++i) {
        CHECK(r.profiles.wind[i].name == c.profiles.wind[i].name);
        CHECK(r.profiles.wind[i].bus == c.profiles.wind[i].bus);
        CHECK(r.profiles.wind[i].mw == c.profiles.wind[i].mw);
    }
    // A resave of the reloaded case is byte-identical.
    save_case(to_json(r), tmp.file("net2.json"));
    CHECK(testutil::slurp(tmp.file("net.json")) ==
          testutil::slurp(tmp.file("net2.json")));
}

TEST_CASE("microgrid JSON round trip preserves every field") {
    testutil::TempDir tmp;
    const MicrogridCase c = make_microgrid_fixture();
    save_case(to_json(c), tmp.file("mg.json"));
    const AnyCase back = load_case(tmp.file("mg.json"));
    REQUIRE(back.kind == AnyCase::Kind::Microgrid);
    const MicrogridCase& r = back.microgrid;
    CHECK(r.name == c.name);
    CHECK(r.generators.size() == c.generators.size());
    CHECK(r.bess.size() == c.bess.size());
    CHECK(r.load() == c.load());
    CHECK(r.profiles.buy_price == c.profiles.buy_price);
    CHECK(r.profiles.sell_price == c.profiles.sell_price);
    CHECK(r.profiles.tie_limit_mw == c.profiles.tie_limit_mw);
    CHECK(r.profiles.reserve_fraction == c.profiles.reserve_fraction);
    CHECK(r.profiles.solar.size() == c.profiles.solar.size());
    save_case(to_json(r), tmp.file("mg2.json"));
    CHECK(testutil::slurp(tmp.file("mg.json")) ==
          testutil::slurp(tmp.file("mg2.json")));
}

TEST_CASE("strict schema rejects unknown keys and malformed files") {
    testutil::TempDir tmp;
    const auto path = tmp.file("case.json");

    auto load_text = [&](const std::string& text) {
        testutil::spit(path, text);
        return load_case(path);
    };

    CHECK_THROWS_AS(load_case(tmp.file("missing.json")), Error);
    CHECK_THROWS_AS(load_text("this is not json"), CaseError);
    CHECK_THROWS_AS(load_text("{}"), CaseError);  // no type
    CHECK_THROWS_AS(load_text(R"({"type": "thermal"})"), CaseError);

    // Unknown top-level key.
    nlohmann::json j = to_json(make_microgrid_fixture());
    j["surprise"] = 1;
    testutil::spit(path, j.dump());
    CHECK_THROWS_AS(load_case(path), CaseError);

    // Unknown nested keys at each level.
    j = to_json(make_microgrid_fixture());
    j["generators"][0]["fuel"] = "diesel";
    testutil::spit(path, j.dump());
    CHECK_THROWS_AS(load_case(path), CaseError);

    j = to_json(make_microgrid_fixture());
    j["bess"][0]["chemistry"] = "LFP";
    testutil::spit(path, j.dump());
    CHECK_THROWS_AS(load_case(path), CaseError);

    j = to_json(make_microgrid_fixture());
    j["profiles"]["cloud_cover"] = std::vector<double>(24, 0.0);
    testutil::spit(path, j.dump());
    CHECK_THROWS_AS(load_case(path), CaseError);

    j = to_json(make_ieee24_fixture());
    j["lines"][0]["resistance"] = 0.01;
    testutil::spit(path, j.dump());
    CHECK_THROWS_AS(load_case(path), CaseError);

    // Missing required field.
    j = to_json(make_microgrid_fixture());
    j["profiles"].erase("buy_price");
    testutil::spit(path, j.dump());
    CHECK_THROWS_AS(load_case(path), CaseError);

    // Non-numeric bus key in the network load table.
    j = to_json(make_ieee24_fixture());
    auto load = j["profiles"]["load"];
    load["west"] = std::vector<double>(24, 1.0);
    j["profiles"]["load"] = load;
    testutil::spit(path, j.dump());
    CHECK_THROWS_AS(load_case(path), CaseError);
}

TEST_CASE("validation catches structural defects") {
    // Disconnected network: drop every line touching bus 7 (it is radial).
    NetworkCase net = make_ieee24_fixture();
    std::erase_if(net.lines, [](const LineSpec& l) {
        return l.from_bus == 7 || l.to_bus == 7;
    });
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.reference_bus = 99;
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.generators[1].name = net.generators[0].name;
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.generators[0].p_min = net.generators[0].p_max + 1.0;
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.generators[0].ramp = 0.0;
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.lines[3].susceptance = -5.0;
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.lines[3].to_bus = net.lines[3].from_bus;
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.bess[0].bus = 55;
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.bess[0].e_initial = net.bess[0].e_max * 2.0;
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.bess[0].eta_char = 1.2;
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.bess[0].econ.salvage_value = net.bess[0].econ.capital_cost * 2.0;
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.bess[0].econ.soh_now = net.bess[0].econ.soh_eol;  // already at EOL
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.profiles.temperature_c.pop_back();  // 23 hours
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.profiles.load.begin()->second[5] = -1.0;
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.profiles.load.clear();
    CHECK_THROWS_AS(net.validate(), CaseError);

    net = make_ieee24_fixture();
    net.profiles.wind[0].bus = 77;
    CHECK_THROWS_AS(net.validate(), CaseError);

    MicrogridCase mg = make_microgrid_fixture();
    mg.profiles.tie_limit_mw = 0.0;
    CHECK_THROWS_AS(mg.validate(), CaseError);

    mg = make_microgrid_fixture();
    mg.profiles.reserve_fraction = 1.0;
    CHECK_THROWS_AS(mg.validate(), CaseError);

    mg = make_microgrid_fixture();
    mg.profiles.sell_price[3] = -2.0;
    CHECK_THROWS_AS(mg.validate(), CaseError);

    mg = make_microgrid_fixture();
    mg.profiles.load.clear();
    CHECK_THROWS_AS(mg.validate(), CaseError);
}

TEST_CASE("degradation economics convert SOH loss to dollars") {
    BessEconomics e;
    e.capital_cost = 200000.0;
    e.salvage_value = 20000.0;
    e.soh_eol = 0.8;
    // (200000 - 20000) / (1 - 0.8) = 900000 dollars per unit SOH.
    CHECK_THAT(e.cost_per_soh(), WithinRel(900000.0, 1e-12));
}
