#pragma once

// Built-in benchmark cases: a modified 24-bus transmission system with five
// storage units and a single-bus microgrid with one storage unit. Both are
// constructed in code so tests and the CLI share byte-identical data.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sparsched/cases.hpp"
#include "sparsched/common.hpp"
#include "sparsched/degradation.hpp"

namespace sparsched {
namespace detail {

inline std::vector<double> scaled(const std::vector<double>& shape, double k) {
    std::vector<double> out;
    out.reserve(shape.size());
    for (double v : shape) out.push_back(v * k);
    return out;
}

}  // namespace detail

// Single-bus microgrid: one diesel genset, one small battery, rooftop solar,
// a little wind, and a price-responsive grid tie with an evening price spike.
inline MicrogridCase make_microgrid_fixture() {
    MicrogridCase c;
    c.name = "microgrid-1bess";

    GeneratorSpec diesel;
    diesel.name = "diesel";
    diesel.p_min = 0.05;
    diesel.p_max = 0.18;
    diesel.ramp = 0.18;
    diesel.cost = 95.0;
    diesel.no_load_cost = 6.0;
    diesel.startup_cost = 15.0;
    c.generators.push_back(diesel);

    BessSpec b;
    b.name = "bess1";
    b.e_max = 0.3;
    b.e_min = 0.0;
    b.e_initial = 0.15;
    b.p_char_max = 0.1;
    b.p_disc_max = 0.1;
    b.eta_char = 0.9;
    b.eta_disc = 0.9;
    b.econ.capital_cost = 60000.0;
    b.econ.salvage_value = 6000.0;
    b.econ.soh_eol = 0.8;
    b.econ.soh_now = 0.95;
    c.bess.push_back(b);

    c.profiles.load[0] = {0.95, 0.90, 0.88, 0.87, 0.90, 1.00, 1.20, 1.40,
                          1.50, 1.55, 1.60, 1.62, 1.58, 1.52, 1.50, 1.55,
                          1.70, 1.85, 2.00, 2.05, 1.95, 1.70, 1.35, 1.05};
    c.profiles.temperature_c = {20, 19, 18, 18, 18, 19, 20, 22, 24, 26, 28, 30,
                                31, 32, 32, 31, 30, 28, 26, 24, 23, 22, 21, 20};
    WindFarm solar;
    solar.name = "rooftop_pv";
    solar.bus = 0;
    solar.mw = {0.00, 0.00, 0.00, 0.00, 0.00, 0.02, 0.10, 0.25,
                0.40, 0.52, 0.58, 0.60, 0.58, 0.52, 0.40, 0.28,
                0.12, 0.03, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00};
    c.profiles.solar.push_back(solar);
    WindFarm wind;
    wind.name = "microturbine";
    wind.bus = 0;
    wind.mw = {0.12, 0.14, 0.15, 0.13, 0.10, 0.08, 0.06, 0.05,
               0.06, 0.08, 0.10, 0.10, 0.09, 0.08, 0.10, 0.12,
               0.14, 0.15, 0.16, 0.15, 0.14, 0.13, 0.12, 0.12};
    c.profiles.wind.push_back(wind);

    c.profiles.buy_price = {30, 28,  28,  28,  30, 38, 55, 62, 65, 66, 68, 68,
                            66, 64,  62,  66,  75, 90, 110, 120, 115, 80, 55, 40};
    c.profiles.sell_price.clear();
    for (double p : c.profiles.buy_price) {
        c.profiles.sell_price.push_back(0.8 * p);
    }
    c.profiles.tie_limit_mw = 2.5;
    c.profiles.reserve_fraction = 0.10;
    c.validate();
    return c;
}

// Modified 24-bus reliability test network. Parallel circuits are merged
// into single equivalents; same-bus identical units are aggregated. The
// bus 7 corridor (its only tie, line 7-8) is derated to 60 MW so the peak
// hours congest it, and bus 7 carries an oversized load share to match.
inline NetworkCase make_ieee24_fixture() {
    NetworkCase c;
    c.name = "ieee24-5bess";
    for (int b = 1; b <= 24; ++b) c.buses.push_back(b);
    c.reference_bus = 13;

    struct L {
        int from, to;
        double x;      // per-unit reactance on a 100 MVA base
        double limit;  // MW
    };
    const std::vector<L> lines = {
        {1, 2, 0.0139, 175},   {1, 3, 0.2112, 175},   {1, 5, 0.0845, 175},
        {2, 4, 0.1267, 175},   {2, 6, 0.1920, 175},   {3, 9, 0.1190, 175},
        {3, 24, 0.0839, 400},  {4, 9, 0.1037, 175},   {5, 10, 0.0883, 175},
        {6, 10, 0.0605, 175},  {7, 8, 0.0614, 60},    {8, 9, 0.1651, 175},
        {8, 10, 0.1651, 175},  {9, 11, 0.0839, 400},  {9, 12, 0.0839, 400},
        {10, 11, 0.0839, 400}, {10, 12, 0.0839, 400}, {11, 13, 0.0476, 500},
        {11, 14, 0.0418, 500}, {12, 13, 0.0476, 500}, {12, 23, 0.0966, 500},
        {13, 23, 0.0865, 500}, {14, 16, 0.0389, 500}, {15, 16, 0.0173, 500},
        {15, 21, 0.0245, 1000}, {15, 24, 0.0519, 500}, {16, 17, 0.0259, 500},
        {16, 19, 0.0231, 500}, {17, 18, 0.0144, 500}, {17, 22, 0.1053, 500},
        {18, 21, 0.0130, 1000}, {19, 20, 0.0198, 1000}, {20, 23, 0.0108, 1000},
        {21, 22, 0.0678, 500},
    };
    for (const auto& l : lines) {
        LineSpec s;
        s.name = "l" + std::to_string(l.from) + "_" + std::to_string(l.to);
        s.from_bus = l.from;
        s.to_bus = l.to;
        s.susceptance = 100.0 / l.x;  // MW per radian
        s.limit = l.limit;
        c.lines.push_back(s);
    }

    struct G {
        const char* name;
        int bus;
        double pmin, pmax, ramp, cost, no_load, startup;
    };
    const std::vector<G> gens = {
        {"ct_b1", 1, 8, 40, 40, 38.5, 30, 100},
        {"coal_b1", 1, 30, 152, 80, 13.0, 400, 900},
        {"ct_b2", 2, 8, 40, 40, 38.6, 30, 100},
        {"coal_b2", 2, 30, 152, 80, 13.1, 400, 900},
        {"oil_b7", 7, 75, 300, 180, 38.0, 350, 800},
        {"cc_b13", 13, 150, 591, 240, 20.0, 700, 1200},
        {"oil_b15", 15, 12, 60, 60, 45.0, 60, 150},
        {"coal_b15", 15, 55, 155, 80, 11.5, 420, 950},
        {"coal_b16", 16, 55, 155, 80, 11.6, 420, 950},
        {"nuke_b18", 18, 100, 400, 120, 5.5, 500, 2000},
        {"nuke_b21", 21, 100, 400, 120, 5.6, 500, 2000},
        {"hydro_b22", 22, 0, 300, 300, 1.0, 0, 0},
        {"coal_b23a", 23, 55, 310, 120, 11.7, 800, 1800},
        {"coal_b23b", 23, 140, 350, 140, 11.9, 850, 1900},
    };
    for (const auto& g : gens) {
        GeneratorSpec s;
        s.name = g.name;
        s.bus = g.bus;
        s.p_min = g.pmin;
        s.p_max = g.pmax;
        s.ramp = g.ramp;
        s.cost = g.cost;
        s.no_load_cost = g.no_load;
        s.startup_cost = g.startup;
        c.generators.push_back(s);
    }

    struct B {
        const char* name;
        int bus;
        double e_max, p_max, e_init;
    };
    const std::vector<B> fleet = {
        {"bess1", 21, 50, 20, 20},  {"bess2", 22, 10, 4, 4},
        {"bess3", 7, 10, 4, 4},     {"bess4", 14, 200, 100, 80},
        {"bess5", 9, 30, 10, 15},
    };
    for (const auto& b : fleet) {
        BessSpec s;
        s.name = b.name;
        s.bus = b.bus;
        s.e_max = b.e_max;
        s.e_initial = b.e_init;
        s.p_char_max = b.p_max;
        s.p_disc_max = b.p_max;
        s.eta_char = 0.9;
        s.eta_disc = 0.9;
        s.econ.capital_cost = 200000.0 * b.e_max;  // 200 $ per kWh installed
        s.econ.salvage_value = 0.1 * s.econ.capital_cost;
        s.econ.soh_eol = 0.8;
        s.econ.soh_now = 0.95;
        c.bess.push_back(s);
    }

    const std::vector<double> shape = {
        0.60, 0.56, 0.54, 0.53, 0.54, 0.58, 0.67, 0.76, 0.84, 0.88, 0.90, 0.91,
        0.90, 0.89, 0.88, 0.88, 0.92, 0.97, 1.00, 0.99, 0.95, 0.86, 0.74, 0.64};
    const double peak_mw = 2000.0;
    const std::map<int, double> share = {
        {1, 0.038}, {2, 0.034}, {3, 0.063},  {4, 0.026}, {5, 0.025},
        {6, 0.048}, {7, 0.070}, {8, 0.060},  {9, 0.061}, {10, 0.068},
        {13, 0.093}, {14, 0.068}, {15, 0.085}, {16, 0.035}, {18, 0.117},
        {19, 0.064}, {20, 0.045},
    };
    for (const auto& [bus, frac] : share) {
        c.profiles.load[bus] = detail::scaled(shape, frac * peak_mw);
    }

    const std::vector<double> wind_cf = {
        0.70, 0.72, 0.74, 0.73, 0.70, 0.65, 0.55, 0.45, 0.38, 0.33, 0.30, 0.28,
        0.27, 0.28, 0.30, 0.33, 0.38, 0.42, 0.45, 0.50, 0.55, 0.60, 0.65, 0.68};
    const std::vector<std::tuple<const char*, int, double>> farms = {
        {"wind_b3", 3, 150.0}, {"wind_b5", 5, 100.0}, {"wind_b16", 16, 150.0}};
    for (const auto& [name, bus, cap] : farms) {
        WindFarm w;
        w.name = name;
        w.bus = bus;
        w.mw = detail::scaled(wind_cf, cap);
        c.profiles.wind.push_back(w);
    }

    c.profiles.temperature_c = {18, 17, 16, 16, 17, 19, 22, 25, 28, 30, 32, 34,
                                35, 35, 34, 33, 31, 29, 27, 25, 23, 21, 20, 19};
    c.validate();
    return c;
}

inline NetworkCase strip_bess(NetworkCase c) {
    c.bess.clear();
    c.name += "-nobess";
    c.validate();
    return c;
}

inline MicrogridCase strip_bess(MicrogridCase c) {
    c.bess.clear();
    c.name += "-nobess";
    c.validate();
    return c;
}

inline AnyCase fixture_by_name(const std::string& name) {
    AnyCase out;
    if (name == "ieee24-5bess") {
        out.kind = AnyCase::Kind::Network;
        out.network = make_ieee24_fixture();
    } else if (name == "ieee24-nobess") {
        out.kind = AnyCase::Kind::Network;
        out.network = strip_bess(make_ieee24_fixture());
    } else if (name == "microgrid-1bess") {
        out.kind = AnyCase::Kind::Microgrid;
        out.microgrid = make_microgrid_fixture();
    } else if (name == "microgrid-nobess") {
        out.kind = AnyCase::Kind::Microgrid;
        out.microgrid = strip_bess(make_microgrid_fixture());
    } else {
        throw ConfigError(
            "unknown built-in case '" + name +
            "' (have: ieee24-5bess, ieee24-nobess, microgrid-1bess, "
            "microgrid-nobess)");
    }
    return out;
}

// The sampling plan and seed used for the bundled degradation datasets: the
// plan's box covers every operating point either benchmark case can reach.
constexpr std::uint64_t kDefaultDataSeed = 20240901;

inline SamplingPlan default_plan(std::size_t samples = 4000) {
    SamplingPlan p;
    p.samples = samples;
    p.test_fraction = 0.2;
    return p;
}

inline Dataset default_dataset(std::size_t samples = 4000,
                               std::uint64_t seed = kDefaultDataSeed) {
    return generate_dataset(default_plan(samples), seed);
}

}  // namespace sparsched
