#pragma once

// Solution extraction (typed schedules out of the raw variable map),
// independent feasibility validation with per-constraint residuals, network
// replay of the degradation prediction, and the CSV output surfaces.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "sparsched/cases.hpp"
#include "sparsched/common.hpp"
#include "sparsched/net.hpp"
#include "sparsched/sched.hpp"
#include "sparsched/solver.hpp"

namespace sparsched {

constexpr double kFlowClamp = 1e-7;  // MW below which a flow is solver dust

struct GenSchedule {
    std::vector<double> p;  // MW per hour
    std::vector<int> u;     // committed
    std::vector<int> v;     // started
};

struct BessSchedule {
    std::vector<double> charge;     // MW, clamped
    std::vector<double> discharge;  // MW, clamped
    std::vector<double> energy;     // MWh at hour end, recomputed from flows
    std::vector<double> soc;        // energy / e_max
    std::vector<double> dod;        // equivalent depth per hour
    std::vector<double> crate;      // dod / dt
    std::vector<double> bd_hour;    // model-predicted SOH loss per hour
    double bd_total = 0.0;          // model-predicted SOH loss for the day
    double cost = 0.0;              // bd_total priced at cost_per_soh
};

struct ScheduleSolution {
    SolveStatus status = SolveStatus::Timeout;
    double objective = 0.0;
    double gap = 0.0;
    double wall_time_s = 0.0;
    bool has_degradation = false;
    std::map<std::string, GenSchedule> gens;
    std::map<std::string, BessSchedule> bess;
    std::map<std::string, std::vector<double>> flows;  // per line
    std::map<int, std::vector<double>> theta;          // per bus
    std::vector<double> buy, sell;                     // microgrid tie
    double operation_cost = 0.0;
    double degradation_cost = 0.0;
    double pseudo_total = 0.0;
    std::unordered_map<std::string, double> raw;  // full solver value map
};

namespace detail {

inline double raw_value(const SolveResult& r, const std::string& name) {
    auto it = r.values.find(name);
    if (it == r.values.end()) {
        throw ExtractionError("solver solution is missing variable " + name);
    }
    return it->second;
}

inline int raw_binary(const SolveResult& r, const std::string& name) {
    const double v = raw_value(r, name);
    const double rounded = std::round(v);
    if (std::abs(v - rounded) > 1e-4 || rounded < 0.0 || rounded > 1.0) {
        throw ExtractionError("binary " + name + " has non-integral value " +
                              fmt_full(v));
    }
    return static_cast<int>(rounded);
}

inline double clamp_flow(double v) { return std::abs(v) < kFlowClamp ? 0.0 : v; }

inline void extract_generators(const std::vector<GeneratorSpec>& gens,
                               const SolveResult& r, ScheduleSolution& out) {
    for (const auto& g : gens) {
        GenSchedule gs;
        for (int t = 1; t <= kHorizon; ++t) {
            gs.p.push_back(raw_value(r, names::p(g.name, t)));
            gs.u.push_back(raw_binary(r, names::u(g.name, t)));
            gs.v.push_back(raw_binary(r, names::v(g.name, t)));
        }
        out.gens[g.name] = std::move(gs);
    }
}

inline void extract_bess(const std::vector<BessSpec>& specs, const SolveResult& r,
                         ScheduleSolution& out) {
    for (const auto& s : specs) {
        BessSchedule bs;
        double e = s.e_initial;
        for (int t = 1; t <= kHorizon; ++t) {
            const double pc = clamp_flow(raw_value(r, names::pc(s.name, t)));
            const double pd = clamp_flow(raw_value(r, names::pd(s.name, t)));
            bs.charge.push_back(pc);
            bs.discharge.push_back(pd);
            e += kDtHours * (pc * s.eta_char - pd / s.eta_disc);
            bs.energy.push_back(e);
            bs.soc.push_back(e / s.e_max);
            const double dod =
                kDtHours * (pc * s.eta_char + pd / s.eta_disc) / s.e_max;
            bs.dod.push_back(dod);
            bs.crate.push_back(dod / kDtHours);
            if (out.has_degradation) {
                // Implied per-hour prediction via the embedded output node.
                const double z =
                    raw_value(r, names::nn_prefix(s.name, t) + "_out");
                bs.bd_hour.push_back(z);  // still normalized; fixed below
            } else {
                bs.bd_hour.push_back(0.0);
            }
        }
        if (out.has_degradation) {
            bs.bd_total = raw_value(r, names::bd(s.name));
            bs.cost = s.econ.cost_per_soh() * bs.bd_total;
            out.degradation_cost += bs.cost;
        }
        out.bess[s.name] = std::move(bs);
    }
}

inline double operation_cost_of(const std::vector<GeneratorSpec>& gens,
                                const ScheduleSolution& sol) {
    double cost = 0.0;
    for (const auto& g : gens) {
        const GenSchedule& gs = sol.gens.at(g.name);
        for (int t = 0; t < kHorizon; ++t) {
            cost += gs.p[static_cast<std::size_t>(t)] * g.cost * kDtHours;
            cost += gs.u[static_cast<std::size_t>(t)] * g.no_load_cost * kDtHours;
            cost += gs.v[static_cast<std::size_t>(t)] * g.startup_cost;
        }
    }
    return cost;
}

}  // namespace detail

inline ScheduleSolution extract_solution(const NetworkCase& c,
                                         const SolveResult& r,
                                         const SparseNet* net = nullptr) {
    if (!r.has_solution()) {
        throw ExtractionError(std::string("cannot extract a schedule from a '") +
                              status_text(r.status) + "' solve");
    }
    ScheduleSolution out;
    out.status = r.status;
    out.objective = r.objective;
    out.gap = r.gap;
    out.wall_time_s = r.wall_time_s;
    out.raw = r.values;
    out.has_degradation =
        !c.bess.empty() && r.values.count(names::bd(c.bess.front().name)) > 0;
    detail::extract_generators(c.generators, r, out);
    detail::extract_bess(c.bess, r, out);
    if (out.has_degradation && net) {
        for (const auto& s : c.bess) {
            auto& bs = out.bess[s.name];
            for (auto& z : bs.bd_hour) z = net->norm.denormalize_target(z);
        }
    }
    for (const auto& l : c.lines) {
        std::vector<double>& f = out.flows[l.name];
        for (int t = 1; t <= kHorizon; ++t) {
            f.push_back(detail::raw_value(r, names::flow(l.name, t)));
        }
    }
    for (int b : c.buses) {
        std::vector<double>& th = out.theta[b];
        for (int t = 1; t <= kHorizon; ++t) {
            th.push_back(detail::raw_value(r, names::theta(b, t)));
        }
    }
    out.operation_cost = detail::operation_cost_of(c.generators, out);
    out.pseudo_total = out.operation_cost + out.degradation_cost;
    return out;
}

inline ScheduleSolution extract_solution(const MicrogridCase& c,
                                         const SolveResult& r,
                                         const SparseNet* net = nullptr) {
    if (!r.has_solution()) {
        throw ExtractionError(std::string("cannot extract a schedule from a '") +
                              status_text(r.status) + "' solve");
    }
    ScheduleSolution out;
    out.status = r.status;
    out.objective = r.objective;
    out.gap = r.gap;
    out.wall_time_s = r.wall_time_s;
    out.raw = r.values;
    out.has_degradation =
        !c.bess.empty() && r.values.count(names::bd(c.bess.front().name)) > 0;
    detail::extract_generators(c.generators, r, out);
    detail::extract_bess(c.bess, r, out);
    if (out.has_degradation && net) {
        for (const auto& s : c.bess) {
            auto& bs = out.bess[s.name];
            for (auto& z : bs.bd_hour) z = net->norm.denormalize_target(z);
        }
    }
    out.operation_cost = detail::operation_cost_of(c.generators, out);
    for (int t = 1; t <= kHorizon; ++t) {
        const double buy = detail::clamp_flow(detail::raw_value(r, names::pbuy(t)));
        const double sell =
            detail::clamp_flow(detail::raw_value(r, names::psell(t)));
        out.buy.push_back(buy);
        out.sell.push_back(sell);
        out.operation_cost +=
            buy * c.profiles.buy_price[static_cast<std::size_t>(t - 1)] * kDtHours;
        out.operation_cost -=
            sell * c.profiles.sell_price[static_cast<std::size_t>(t - 1)] * kDtHours;
        detail::raw_binary(r, names::ubuy(t));  // integrality check
        detail::raw_binary(r, names::usell(t));
    }
    out.pseudo_total = out.operation_cost + out.degradation_cost;
    return out;
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    std::string what;
    double residual = 0.0;
};

namespace detail {

struct Checker {
    std::vector<Violation> out;
    void check(const std::string& what, double residual, double tol) {
        if (!(std::abs(residual) <= tol)) {
            out.push_back({what, residual});
        }
    }
};

inline void validate_generators(const std::vector<GeneratorSpec>& gens,
                                const ScheduleSolution& sol, Checker& ck) {
    const double tol = 1e-6;
    for (const auto& g : gens) {
        const GenSchedule& gs = sol.gens.at(g.name);
        for (int t = 0; t < kHorizon; ++t) {
            const auto i = static_cast<std::size_t>(t);
            const std::string at = g.name + " t" + std::to_string(t + 1);
            if (gs.u[i]) {
                ck.check("pmax " + at, std::max(0.0, gs.p[i] - g.p_max), tol);
                ck.check("pmin " + at, std::max(0.0, g.p_min - gs.p[i]), tol);
            } else {
                ck.check("off output " + at, gs.p[i], tol);
            }
            if (t >= 1) {
                ck.check("ramp up " + at,
                         std::max(0.0, gs.p[i] - gs.p[i - 1] - g.ramp * kDtHours),
                         tol);
                ck.check("ramp down " + at,
                         std::max(0.0, gs.p[i - 1] - gs.p[i] - g.ramp * kDtHours),
                         tol);
            }
            const int prev_u = t >= 1 ? gs.u[i - 1] : 0;
            ck.check("startup logic " + at,
                     std::max(0, gs.u[i] - prev_u - gs.v[i]), 0.0);
            ck.check("startup bound " + at, std::max(0, gs.v[i] - gs.u[i]), 0.0);
            if (t >= 1) {
                ck.check("restart spacing " + at,
                         std::max(0, gs.v[i] + gs.u[i - 1] - 1), 0.0);
            }
        }
    }
}

inline void validate_bess(const std::vector<BessSpec>& specs,
                          const ScheduleSolution& sol, Checker& ck) {
    const double tol = 1e-6;
    for (const auto& s : specs) {
        const BessSchedule& bs = sol.bess.at(s.name);
        double e_raw_prev = s.e_initial;
        for (int t = 1; t <= kHorizon; ++t) {
            const auto i = static_cast<std::size_t>(t - 1);
            const std::string at = s.name + " t" + std::to_string(t);
            const int uc = static_cast<int>(
                std::round(sol.raw.at(names::uc(s.name, t))));
            const int ud = static_cast<int>(
                std::round(sol.raw.at(names::ud(s.name, t))));
            ck.check("charge/discharge exclusivity " + at,
                     std::max(0, uc + ud - 1), 0.0);
            ck.check("charge gate " + at,
                     std::max(0.0, bs.charge[i] - uc * s.p_char_max), tol);
            ck.check("charge floor " + at,
                     std::max(0.0, uc * s.p_char_min - bs.charge[i]), tol);
            ck.check("discharge gate " + at,
                     std::max(0.0, bs.discharge[i] - ud * s.p_disc_max), tol);
            ck.check("discharge floor " + at,
                     std::max(0.0, ud * s.p_disc_min - bs.discharge[i]), tol);
            ck.check("simultaneous flow " + at,
                     std::min(bs.charge[i], bs.discharge[i]), 1e-6);
            // Energy recursion against the solver's own energy variable.
            const double e_raw = sol.raw.at(names::e(s.name, t));
            const double expect =
                e_raw_prev + kDtHours * (sol.raw.at(names::pc(s.name, t)) *
                                             s.eta_char -
                                         sol.raw.at(names::pd(s.name, t)) /
                                             s.eta_disc);
            ck.check("energy recursion " + at, e_raw - expect, tol);
            ck.check("energy ceiling " + at, std::max(0.0, e_raw - s.e_max), tol);
            ck.check("energy floor " + at, std::max(0.0, s.e_min - e_raw), tol);
            e_raw_prev = e_raw;
        }
        ck.check("terminal energy " + s.name,
                 sol.raw.at(names::e(s.name, kHorizon)) - s.e_initial, tol);
    }
}

}  // namespace detail

inline std::vector<Violation> validate_solution(const NetworkCase& c,
                                                const ScheduleSolution& sol) {
    detail::Checker ck;
    const double tol = 1e-6;
    detail::validate_generators(c.generators, sol, ck);
    detail::validate_bess(c.bess, sol, ck);
    for (const auto& l : c.lines) {
        const auto& f = sol.flows.at(l.name);
        const auto& th_from = sol.theta.at(l.from_bus);
        const auto& th_to = sol.theta.at(l.to_bus);
        for (int t = 0; t < kHorizon; ++t) {
            const auto i = static_cast<std::size_t>(t);
            const std::string at = l.name + " t" + std::to_string(t + 1);
            ck.check("line limit " + at, std::max(0.0, std::abs(f[i]) - l.limit),
                     tol);
            ck.check("dc flow " + at,
                     f[i] - l.susceptance * (th_from[i] - th_to[i]), 1e-5);
        }
    }
    for (int b : c.buses) {
        for (int t = 1; t <= kHorizon; ++t) {
            double lhs = 0.0;
            for (const auto& g : c.generators) {
                if (g.bus == b) {
                    lhs += sol.gens.at(g.name).p[static_cast<std::size_t>(t - 1)];
                }
            }
            for (const auto& s : c.bess) {
                if (s.bus == b) {
                    lhs += sol.raw.at(names::pd(s.name, t));
                    lhs -= sol.raw.at(names::pc(s.name, t));
                }
            }
            for (const auto& l : c.lines) {
                if (l.to_bus == b) {
                    lhs += sol.flows.at(l.name)[static_cast<std::size_t>(t - 1)];
                }
                if (l.from_bus == b) {
                    lhs -= sol.flows.at(l.name)[static_cast<std::size_t>(t - 1)];
                }
            }
            double load = 0.0;
            auto it = c.profiles.load.find(b);
            if (it != c.profiles.load.end()) {
                load = it->second[static_cast<std::size_t>(t - 1)];
            }
            const double rhs = load - detail::fixed_injection(c.profiles, b, t);
            ck.check("balance bus " + std::to_string(b) + " t" + std::to_string(t),
                     lhs - rhs, tol);
        }
    }
    ck.check("cost accounting", sol.pseudo_total - sol.objective,
             1e-6 * std::max(1.0, std::abs(sol.objective)));
    return std::move(ck.out);
}

inline std::vector<Violation> validate_solution(const MicrogridCase& c,
                                                const ScheduleSolution& sol) {
    detail::Checker ck;
    const double tol = 1e-6;
    detail::validate_generators(c.generators, sol, ck);
    detail::validate_bess(c.bess, sol, ck);
    const double tie = c.profiles.tie_limit_mw;
    for (int t = 1; t <= kHorizon; ++t) {
        const auto i = static_cast<std::size_t>(t - 1);
        const std::string at = "t" + std::to_string(t);
        const int ubuy =
            static_cast<int>(std::round(sol.raw.at(names::ubuy(t))));
        const int usell =
            static_cast<int>(std::round(sol.raw.at(names::usell(t))));
        ck.check("buy/sell exclusivity " + at, std::max(0, ubuy + usell - 1), 0.0);
        ck.check("buy gate " + at, std::max(0.0, sol.buy[i] - ubuy * tie), tol);
        ck.check("sell gate " + at, std::max(0.0, sol.sell[i] - usell * tie), tol);
        double gen = 0.0, headroom = 0.0;
        for (const auto& g : c.generators) {
            const double p = sol.gens.at(g.name).p[i];
            gen += p;
            headroom += g.p_max - p;
        }
        double storage = 0.0;
        for (const auto& s : c.bess) {
            storage += sol.raw.at(names::pd(s.name, t));
            storage -= sol.raw.at(names::pc(s.name, t));
        }
        const double load = c.load()[i];
        const double renew = detail::fixed_injection(c.profiles, 0, t);
        ck.check("balance " + at,
                 gen + storage + sol.buy[i] - sol.sell[i] - (load - renew), tol);
        const double reserve =
            tie - sol.buy[i] + sol.sell[i] + headroom -
            c.profiles.reserve_fraction * load;
        ck.check("reserve " + at, std::min(0.0, reserve), tol);
    }
    ck.check("cost accounting", sol.pseudo_total - sol.objective,
             1e-6 * std::max(1.0, std::abs(sol.objective)));
    return std::move(ck.out);
}

// ---------------------------------------------------------------------------
// Degradation replay

struct DegradationReplay {
    std::string name;
    double bd = 0.0;    // summed per-hour forward passes over the schedule
    double cost = 0.0;  // priced at the unit's cost per SOH point
    std::vector<double> bd_hour;
};

// Run the trained network forward over an extracted schedule, outside any
// MILP. With the same network this must agree with the embedded prediction;
// with a different (for example dense) network it reprices the schedule.
inline std::vector<DegradationReplay> recompute_degradation(
    const SparseNet& net, const std::vector<BessSpec>& specs,
    const ScheduleSolution& sol, const std::vector<double>& temperature_c) {
    std::vector<DegradationReplay> out;
    for (const auto& s : specs) {
        const BessSchedule& bs = sol.bess.at(s.name);
        DegradationReplay rep;
        rep.name = s.name;
        for (int t = 0; t < kHorizon; ++t) {
            const auto i = static_cast<std::size_t>(t);
            CycleFeatures f;
            f.soc_start = (t == 0 ? s.e_initial : bs.energy[i - 1]) / s.e_max;
            f.dod = bs.dod[i];
            f.temp_c = temperature_c[i];
            f.c_rate = bs.crate[i];
            f.soh = s.econ.soh_now;
            const double pred = forward(net, f);
            rep.bd_hour.push_back(pred);
            rep.bd += pred;
        }
        rep.cost = s.econ.cost_per_soh() * rep.bd;
        out.push_back(std::move(rep));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV surfaces

namespace detail {

inline std::ofstream open_csv(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    return f;
}

}  // namespace detail

inline void write_solution_csvs(const std::filesystem::path& dir,
                                const ScheduleSolution& sol,
                                const BuildInfo* info = nullptr) {
    std::filesystem::create_directories(dir);
    {
        auto f = detail::open_csv(dir / "dispatch.csv");
        f << "t,device,p_mw,committed,started\n";
        for (int t = 1; t <= kHorizon; ++t) {
            const auto i = static_cast<std::size_t>(t - 1);
            for (const auto& [name, gs] : sol.gens) {
                f << t << ',' << name << ',' << fmt_full(gs.p[i]) << ','
                  << gs.u[i] << ',' << gs.v[i] << '\n';
            }
            if (!sol.buy.empty()) {
                f << t << ",tie_buy," << fmt_full(sol.buy[i]) << ','
                  << (sol.buy[i] > 0 ? 1 : 0) << ",0\n";
                f << t << ",tie_sell," << fmt_full(sol.sell[i]) << ','
                  << (sol.sell[i] > 0 ? 1 : 0) << ",0\n";
            }
        }
    }
    {
        auto f = detail::open_csv(dir / "bess.csv");
        f << "unit,t,soc,charge_mw,discharge_mw,dod,crate,bd\n";
        for (const auto& [name, bs] : sol.bess) {
            for (int t = 1; t <= kHorizon; ++t) {
                const auto i = static_cast<std::size_t>(t - 1);
                f << name << ',' << t << ',' << fmt_full(bs.soc[i]) << ','
                  << fmt_full(bs.charge[i]) << ',' << fmt_full(bs.discharge[i])
                  << ',' << fmt_full(bs.dod[i]) << ',' << fmt_full(bs.crate[i])
                  << ',' << fmt_full(bs.bd_hour[i]) << '\n';
            }
        }
    }
    {
        auto f = detail::open_csv(dir / "costs.csv");
        f << "component,value\n";
        f << "operation," << fmt_full(sol.operation_cost) << '\n';
        for (const auto& [name, bs] : sol.bess) {
            f << "bd_cost_" << name << ',' << fmt_full(bs.cost) << '\n';
        }
        f << "bd_cost_total," << fmt_full(sol.degradation_cost) << '\n';
        f << "pseudo_total," << fmt_full(sol.pseudo_total) << '\n';
    }
    {
        auto f = detail::open_csv(dir / "summary.csv");
        f << "key,value\n";
        f << "status," << status_text(sol.status) << '\n';
        f << "objective," << fmt_full(sol.objective) << '\n';
        f << "gap," << fmt_full(sol.gap) << '\n';
        f << "wall_time_s," << fmt_full(sol.wall_time_s) << '\n';
        if (info) {
            f << "commitment_binaries," << info->commitment_binaries << '\n';
            f << "nn_binaries," << info->nn_binaries << '\n';
            f << "total_binaries," << info->total_binaries << '\n';
        }
    }
}

}  // namespace sparsched
