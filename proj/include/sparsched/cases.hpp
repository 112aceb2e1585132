#pragma once

// Scheduling case data: generators, transmission lines, battery systems,
// hourly profiles, and the two case flavors (bulk network with DC power flow,
// single-bus microgrid with a grid tie). Cases validate themselves and load
// from / save to a strict JSON schema.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsched/common.hpp"

namespace sparsched {

struct GeneratorSpec {
    std::string name;
    int bus = 0;
    double p_min = 0.0;         // MW when committed
    double p_max = 0.0;         // MW
    double ramp = 0.0;          // MW per hour, both directions
    double cost = 0.0;          // $ per MWh
    double no_load_cost = 0.0;  // $ per committed hour
    double startup_cost = 0.0;  // $ per start
};

struct LineSpec {
    std::string name;
    int from_bus = 0;
    int to_bus = 0;
    double susceptance = 0.0;  // MW per radian of angle difference
    double limit = 0.0;        // MW, symmetric
};

struct BessEconomics {
    double capital_cost = 0.0;   // $ installed
    double salvage_value = 0.0;  // $ at end of life
    double soh_eol = 0.8;        // state of health defining end of life
    double soh_now = 1.0;        // current state of health

    // Dollars per unit of SOH lost.
    double cost_per_soh() const {
        return (capital_cost - salvage_value) / (1.0 - soh_eol);
    }
};

struct BessSpec {
    std::string name;
    int bus = 0;
    double e_max = 0.0;       // MWh
    double e_min = 0.0;       // MWh
    double e_initial = 0.0;   // MWh at hour zero (and required at hour 24)
    double p_char_max = 0.0;  // MW
    double p_char_min = 0.0;
    double p_disc_max = 0.0;
    double p_disc_min = 0.0;
    double eta_char = 0.9;
    double eta_disc = 0.9;
    BessEconomics econ;
};

struct WindFarm {
    std::string name;
    int bus = 0;
    std::vector<double> mw;  // fixed hourly injection
};

struct Profiles {
    std::vector<double> temperature_c;          // ambient per hour
    std::map<int, std::vector<double>> load;    // MW per bus per hour
    std::vector<WindFarm> wind;
    std::vector<WindFarm> solar;
    // Microgrid-only surface:
    std::vector<double> buy_price;   // $ per MWh from the grid
    std::vector<double> sell_price;  // $ per MWh to the grid
    double tie_limit_mw = 0.0;       // max grid exchange either direction
    double reserve_fraction = 0.0;   // required reserve as a load fraction
};

namespace detail {

inline void check_profile(const std::vector<double>& v, const std::string& what,
                          double lo) {
    if (static_cast<int>(v.size()) != kHorizon) {
        throw CaseError(what + " must have " + std::to_string(kHorizon) +
                        " hourly values, got " + std::to_string(v.size()));
    }
    for (double x : v) {
        if (!std::isfinite(x) || x < lo) {
            throw CaseError(what + " has bad value " + fmt_full(x));
        }
    }
}

inline void check_generator(const GeneratorSpec& g) {
    if (g.name.empty()) throw CaseError("generator with empty name");
    if (!(g.p_max > 0.0) || g.p_min < 0.0 || g.p_min > g.p_max) {
        throw CaseError("generator " + g.name + " has bad power range");
    }
    if (!(g.ramp > 0.0)) {
        throw CaseError("generator " + g.name + " needs a positive ramp");
    }
    if (g.cost < 0.0 || g.no_load_cost < 0.0 || g.startup_cost < 0.0 ||
        !std::isfinite(g.cost + g.no_load_cost + g.startup_cost)) {
        throw CaseError("generator " + g.name + " has bad costs");
    }
}

inline void check_bess(const BessSpec& s) {
    if (s.name.empty()) throw CaseError("storage with empty name");
    if (!(s.e_max > 0.0) || s.e_min < 0.0 || s.e_min > s.e_max) {
        throw CaseError("storage " + s.name + " has bad energy range");
    }
    if (s.e_initial < s.e_min || s.e_initial > s.e_max) {
        throw CaseError("storage " + s.name + " initial energy outside range");
    }
    if (!(s.p_char_max > 0.0) || s.p_char_min < 0.0 ||
        s.p_char_min > s.p_char_max || !(s.p_disc_max > 0.0) ||
        s.p_disc_min < 0.0 || s.p_disc_min > s.p_disc_max) {
        throw CaseError("storage " + s.name + " has bad power limits");
    }
    if (!(s.eta_char > 0.0) || s.eta_char > 1.0 || !(s.eta_disc > 0.0) ||
        s.eta_disc > 1.0) {
        throw CaseError("storage " + s.name + " efficiencies must lie in (0,1]");
    }
    const auto& e = s.econ;
    if (!(e.capital_cost > 0.0) || e.salvage_value < 0.0 ||
        e.salvage_value >= e.capital_cost) {
        throw CaseError("storage " + s.name + " has bad capital/salvage values");
    }
    if (!(e.soh_eol > 0.0) || !(e.soh_eol < 1.0) || e.soh_now <= e.soh_eol ||
        e.soh_now > 1.0) {
        throw CaseError("storage " + s.name +
                        " needs soh_eol < soh_now <= 1 within (0,1]");
    }
}

}  // namespace detail

struct NetworkCase {
    std::string name;
    std::vector<int> buses;
    int reference_bus = 0;
    std::vector<GeneratorSpec> generators;
    std::vector<LineSpec> lines;
    std::vector<BessSpec> bess;
    Profiles profiles;

    bool has_bus(int b) const {
        return std::find(buses.begin(), buses.end(), b) != buses.end();
    }

    void validate() const {
        if (name.empty()) throw CaseError("case has no name");
        if (buses.empty()) throw CaseError("case has no buses");
        if (std::set<int>(buses.begin(), buses.end()).size() != buses.size()) {
            throw CaseError("duplicate bus ids");
        }
        if (!has_bus(reference_bus)) {
            throw CaseError("reference bus " + std::to_string(reference_bus) +
                            " is not a bus");
        }
        if (generators.empty()) throw CaseError("case has no generators");
        std::set<std::string> names;
        for (const auto& g : generators) {
            detail::check_generator(g);
            if (!has_bus(g.bus)) {
                throw CaseError("generator " + g.name + " sits on unknown bus");
            }
            if (!names.insert(g.name).second) {
                throw CaseError("duplicate device name " + g.name);
            }
        }
        for (const auto& l : lines) {
            if (l.name.empty()) throw CaseError("line with empty name");
            if (!has_bus(l.from_bus) || !has_bus(l.to_bus) ||
                l.from_bus == l.to_bus) {
                throw CaseError("line " + l.name + " has bad endpoints");
            }
            if (!(l.susceptance > 0.0) || !(l.limit > 0.0)) {
                throw CaseError("line " + l.name +
                                " needs positive susceptance and limit");
            }
            if (!names.insert(l.name).second) {
                throw CaseError("duplicate device name " + l.name);
            }
        }
        for (const auto& s : bess) {
            detail::check_bess(s);
            if (!has_bus(s.bus)) {
                throw CaseError("storage " + s.name + " sits on unknown bus");
            }
            if (!names.insert(s.name).second) {
                throw CaseError("duplicate device name " + s.name);
            }
        }
        if (buses.size() > 1) {
            // Every bus must reach the reference through lines.
            std::map<int, std::vector<int>> adj;
            for (const auto& l : lines) {
                adj[l.from_bus].push_back(l.to_bus);
                adj[l.to_bus].push_back(l.from_bus);
            }
            std::set<int> seen{reference_bus};
            std::queue<int> q;
            q.push(reference_bus);
            while (!q.empty()) {
                const int b = q.front();
                q.pop();
                for (int n : adj[b]) {
                    if (seen.insert(n).second) q.push(n);
                }
            }
            if (seen.size() != buses.size()) {
                throw CaseError("network is not connected");
            }
        }
        detail::check_profile(profiles.temperature_c, "temperature_c", -kInf);
        for (const auto& [b, v] : profiles.load) {
            if (!has_bus(b)) {
                throw CaseError("load profile on unknown bus " + std::to_string(b));
            }
            detail::check_profile(v, "load at bus " + std::to_string(b), 0.0);
        }
        if (profiles.load.empty()) throw CaseError("case has no load");
        for (const auto& w : profiles.wind) {
            if (!has_bus(w.bus)) {
                throw CaseError("wind farm " + w.name + " sits on unknown bus");
            }
            detail::check_profile(w.mw, "wind " + w.name, 0.0);
        }
        for (const auto& w : profiles.solar) {
            if (!has_bus(w.bus)) {
                throw CaseError("solar farm " + w.name + " sits on unknown bus");
            }
            detail::check_profile(w.mw, "solar " + w.name, 0.0);
        }
    }
};

struct MicrogridCase {
    std::string name;
    std::vector<GeneratorSpec> generators;
    std::vector<BessSpec> bess;
    Profiles profiles;

    void validate() const {
        if (name.empty()) throw CaseError("case has no name");
        std::set<std::string> names;
        for (const auto& g : generators) {
            detail::check_generator(g);
            if (!names.insert(g.name).second) {
                throw CaseError("duplicate device name " + g.name);
            }
        }
        for (const auto& s : bess) {
            detail::check_bess(s);
            if (!names.insert(s.name).second) {
                throw CaseError("duplicate device name " + s.name);
            }
        }
        detail::check_profile(profiles.temperature_c, "temperature_c", -kInf);
        auto it = profiles.load.find(0);
        if (profiles.load.size() != 1 || it == profiles.load.end()) {
            throw CaseError("microgrid needs exactly one aggregate load profile");
        }
        detail::check_profile(it->second, "load", 0.0);
        detail::check_profile(profiles.buy_price, "buy_price", 0.0);
        detail::check_profile(profiles.sell_price, "sell_price", 0.0);
        for (const auto& w : profiles.wind) {
            detail::check_profile(w.mw, "wind " + w.name, 0.0);
        }
        for (const auto& w : profiles.solar) {
            detail::check_profile(w.mw, "solar " + w.name, 0.0);
        }
        if (!(profiles.tie_limit_mw > 0.0)) {
            throw CaseError("microgrid needs a positive tie_limit_mw");
        }
        if (profiles.reserve_fraction < 0.0 || profiles.reserve_fraction >= 1.0) {
            throw CaseError("reserve_fraction must lie in [0,1)");
        }
    }

    const std::vector<double>& load() const { return profiles.load.at(0); }
};

// ---------------------------------------------------------------------------
// JSON schema

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                const std::set<std::string>& allowed,
                                const std::string& ctx) {
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (!allowed.count(k)) {
            throw CaseError("unknown key '" + k + "' in " + ctx);
        }
    }
}

inline GeneratorSpec generator_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j,
                        {"name", "bus", "p_min", "p_max", "ramp", "cost",
                         "no_load_cost", "startup_cost"},
                        "generator");
    GeneratorSpec g;
    g.name = j.at("name").get<std::string>();
    g.bus = j.value("bus", 0);
    g.p_min = j.at("p_min").get<double>();
    g.p_max = j.at("p_max").get<double>();
    g.ramp = j.at("ramp").get<double>();
    g.cost = j.at("cost").get<double>();
    g.no_load_cost = j.value("no_load_cost", 0.0);
    g.startup_cost = j.value("startup_cost", 0.0);
    return g;
}

inline nlohmann::json generator_to_json(const GeneratorSpec& g) {
    return {{"name", g.name},         {"bus", g.bus},
            {"p_min", g.p_min},       {"p_max", g.p_max},
            {"ramp", g.ramp},         {"cost", g.cost},
            {"no_load_cost", g.no_load_cost}, {"startup_cost", g.startup_cost}};
}

inline BessSpec bess_from_json(const nlohmann::json& j) {
    reject_unknown_keys(
        j,
        {"name", "bus", "e_max", "e_min", "e_initial", "p_char_max", "p_char_min",
         "p_disc_max", "p_disc_min", "eta_char", "eta_disc", "capital_cost",
         "salvage_value", "soh_eol", "soh_now"},
        "bess");
    BessSpec s;
    s.name = j.at("name").get<std::string>();
    s.bus = j.value("bus", 0);
    s.e_max = j.at("e_max").get<double>();
    s.e_min = j.value("e_min", 0.0);
    s.e_initial = j.at("e_initial").get<double>();
    s.p_char_max = j.at("p_char_max").get<double>();
    s.p_char_min = j.value("p_char_min", 0.0);
    s.p_disc_max = j.at("p_disc_max").get<double>();
    s.p_disc_min = j.value("p_disc_min", 0.0);
    s.eta_char = j.at("eta_char").get<double>();
    s.eta_disc = j.at("eta_disc").get<double>();
    s.econ.capital_cost = j.at("capital_cost").get<double>();
    s.econ.salvage_value = j.at("salvage_value").get<double>();
    s.econ.soh_eol = j.at("soh_eol").get<double>();
    s.econ.soh_now = j.at("soh_now").get<double>();
    return s;
}

inline nlohmann::json bess_to_json(const BessSpec& s) {
    return {{"name", s.name},
            {"bus", s.bus},
            {"e_max", s.e_max},
            {"e_min", s.e_min},
            {"e_initial", s.e_initial},
            {"p_char_max", s.p_char_max},
            {"p_char_min", s.p_char_min},
            {"p_disc_max", s.p_disc_max},
            {"p_disc_min", s.p_disc_min},
            {"eta_char", s.eta_char},
            {"eta_disc", s.eta_disc},
            {"capital_cost", s.econ.capital_cost},
            {"salvage_value", s.econ.salvage_value},
            {"soh_eol", s.econ.soh_eol},
            {"soh_now", s.econ.soh_now}};
}

inline std::vector<WindFarm> farms_from_json(const nlohmann::json& j,
                                             const std::string& what) {
    std::vector<WindFarm> out;
    for (const auto& e : j) {
        reject_unknown_keys(e, {"name", "bus", "mw"}, what);
        WindFarm w;
        w.name = e.at("name").get<std::string>();
        w.bus = e.value("bus", 0);
        w.mw = e.at("mw").get<std::vector<double>>();
        out.push_back(std::move(w));
    }
    return out;
}

inline nlohmann::json farms_to_json(const std::vector<WindFarm>& farms) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& w : farms) {
        j.push_back({{"name", w.name}, {"bus", w.bus}, {"mw", w.mw}});
    }
    return j;
}

}  // namespace detail

inline nlohmann::json to_json(const NetworkCase& c) {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : c.generators) gens.push_back(detail::generator_to_json(g));
    nlohmann::json lines = nlohmann::json::array();
    for (const auto& l : c.lines) {
        lines.push_back({{"name", l.name},
                         {"from", l.from_bus},
                         {"to", l.to_bus},
                         {"susceptance", l.susceptance},
                         {"limit", l.limit}});
    }
    nlohmann::json bess = nlohmann::json::array();
    for (const auto& s : c.bess) bess.push_back(detail::bess_to_json(s));
    nlohmann::json load;
    for (const auto& [b, v] : c.profiles.load) load[std::to_string(b)] = v;
    return {{"type", "network"},
            {"name", c.name},
            {"buses", c.buses},
            {"reference_bus", c.reference_bus},
            {"generators", gens},
            {"lines", lines},
            {"bess", bess},
            {"profiles",
             {{"temperature_c", c.profiles.temperature_c},
              {"load", load},
              {"wind", detail::farms_to_json(c.profiles.wind)},
              {"solar", detail::farms_to_json(c.profiles.solar)}}}};
}

inline nlohmann::json to_json(const MicrogridCase& c) {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : c.generators) gens.push_back(detail::generator_to_json(g));
    nlohmann::json bess = nlohmann::json::array();
    for (const auto& s : c.bess) bess.push_back(detail::bess_to_json(s));
    return {{"type", "microgrid"},
            {"name", c.name},
            {"generators", gens},
            {"bess", bess},
            {"profiles",
             {{"temperature_c", c.profiles.temperature_c},
              {"load", c.load()},
              {"wind", detail::farms_to_json(c.profiles.wind)},
              {"solar", detail::farms_to_json(c.profiles.solar)},
              {"buy_price", c.profiles.buy_price},
              {"sell_price", c.profiles.sell_price},
              {"tie_limit_mw", c.profiles.tie_limit_mw},
              {"reserve_fraction", c.profiles.reserve_fraction}}}};
}

inline NetworkCase network_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(j,
                                {"type", "name", "buses", "reference_bus",
                                 "generators", "lines", "bess", "profiles"},
                                "network case");
    NetworkCase c;
    c.name = j.at("name").get<std::string>();
    c.buses = j.at("buses").get<std::vector<int>>();
    c.reference_bus = j.at("reference_bus").get<int>();
    for (const auto& g : j.at("generators")) {
        c.generators.push_back(detail::generator_from_json(g));
    }
    for (const auto& l : j.value("lines", nlohmann::json::array())) {
        detail::reject_unknown_keys(l, {"name", "from", "to", "susceptance", "limit"},
                                    "line");
        c.lines.push_back({l.at("name").get<std::string>(), l.at("from").get<int>(),
                           l.at("to").get<int>(), l.at("susceptance").get<double>(),
                           l.at("limit").get<double>()});
    }
    for (const auto& s : j.value("bess", nlohmann::json::array())) {
        c.bess.push_back(detail::bess_from_json(s));
    }
    const auto& p = j.at("profiles");
    detail::reject_unknown_keys(p, {"temperature_c", "load", "wind", "solar"},
                                "network profiles");
    c.profiles.temperature_c = p.at("temperature_c").get<std::vector<double>>();
    for (const auto& [k, v] : p.at("load").items()) {
        try {
            c.profiles.load[std::stoi(k)] = v.get<std::vector<double>>();
        } catch (const std::invalid_argument&) {
            throw CaseError("load key '" + k + "' is not a bus id");
        }
    }
    c.profiles.wind = detail::farms_from_json(p.value("wind", nlohmann::json::array()),
                                              "wind farm");
    c.profiles.solar = detail::farms_from_json(
        p.value("solar", nlohmann::json::array()), "solar farm");
    c.validate();
    return c;
}

inline MicrogridCase microgrid_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j, {"type", "name", "generators", "bess", "profiles"}, "microgrid case");
    MicrogridCase c;
    c.name = j.at("name").get<std::string>();
    for (const auto& g : j.value("generators", nlohmann::json::array())) {
        c.generators.push_back(detail::generator_from_json(g));
    }
    for (const auto& s : j.value("bess", nlohmann::json::array())) {
        c.bess.push_back(detail::bess_from_json(s));
    }
    const auto& p = j.at("profiles");
    detail::reject_unknown_keys(p,
                                {"temperature_c", "load", "wind", "solar",
                                 "buy_price", "sell_price", "tie_limit_mw",
                                 "reserve_fraction"},
                                "microgrid profiles");
    c.profiles.temperature_c = p.at("temperature_c").get<std::vector<double>>();
    c.profiles.load[0] = p.at("load").get<std::vector<double>>();
    c.profiles.wind = detail::farms_from_json(p.value("wind", nlohmann::json::array()),
                                              "wind farm");
    c.profiles.solar = detail::farms_from_json(
        p.value("solar", nlohmann::json::array()), "solar farm");
    c.profiles.buy_price = p.at("buy_price").get<std::vector<double>>();
    c.profiles.sell_price = p.at("sell_price").get<std::vector<double>>();
    c.profiles.tie_limit_mw = p.at("tie_limit_mw").get<double>();
    c.profiles.reserve_fraction = p.at("reserve_fraction").get<double>();
    c.validate();
    return c;
}

// Tagged load: distinguishes network and microgrid files by their "type".
struct AnyCase {
    enum class Kind { Network, Microgrid } kind = Kind::Network;
    NetworkCase network;
    MicrogridCase microgrid;
};

inline AnyCase load_case(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read " + path.string());
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw CaseError("bad case file " + path.string() + ": " + e.what());
    }
    AnyCase out;
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "network") {
            out.kind = AnyCase::Kind::Network;
            out.network = network_from_json(j);
        } else if (type == "microgrid") {
            out.kind = AnyCase::Kind::Microgrid;
            out.microgrid = microgrid_from_json(j);
        } else {
            throw CaseError("unknown case type '" + type + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw CaseError("bad case file " + path.string() + ": " + e.what());
    }
    return out;
}

inline void save_case(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

}  // namespace sparsched
