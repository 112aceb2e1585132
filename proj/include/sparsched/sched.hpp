#pragma once

// Day-ahead unit-commitment model builders: a bulk network model with DC
// power flow and explicit line-limit rows, and a single-bus microgrid model
// with a grid tie, buy/sell exclusivity, and a reserve requirement. Either
// model can be extended with per-interval battery-degradation predictions by
// embedding the trained network once per storage unit and hour and charging
// the predicted capacity fade in the objective.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sparsched/cases.hpp"
#include "sparsched/common.hpp"
#include "sparsched/milp.hpp"
#include "sparsched/net.hpp"
#include "sparsched/relu_encode.hpp"

namespace sparsched {

constexpr double kDtHours = 1.0;  // interval length

// Canonical variable and row names, shared by builders, extraction, and the
// pricing pass. Hours are 1-based in names.
namespace names {

inline std::string p(const std::string& g, int t) {
    return "p_" + g + "_t" + std::to_string(t);
}
inline std::string u(const std::string& g, int t) {
    return "u_" + g + "_t" + std::to_string(t);
}
inline std::string v(const std::string& g, int t) {
    return "v_" + g + "_t" + std::to_string(t);
}
inline std::string flow(const std::string& line, int t) {
    return "f_" + line + "_t" + std::to_string(t);
}
inline std::string theta(int bus, int t) {
    return "th_b" + std::to_string(bus) + "_t" + std::to_string(t);
}
inline std::string pc(const std::string& s, int t) {
    return "pc_" + s + "_t" + std::to_string(t);
}
inline std::string pd(const std::string& s, int t) {
    return "pd_" + s + "_t" + std::to_string(t);
}
inline std::string uc(const std::string& s, int t) {
    return "uc_" + s + "_t" + std::to_string(t);
}
inline std::string ud(const std::string& s, int t) {
    return "ud_" + s + "_t" + std::to_string(t);
}
inline std::string e(const std::string& s, int t) {
    return "e_" + s + "_t" + std::to_string(t);
}
inline std::string bd(const std::string& s) { return "bd_" + s; }
inline std::string pbuy(int t) { return "pbuy_t" + std::to_string(t); }
inline std::string psell(int t) { return "psell_t" + std::to_string(t); }
inline std::string ubuy(int t) { return "ubuy_t" + std::to_string(t); }
inline std::string usell(int t) { return "usell_t" + std::to_string(t); }

inline std::string balance(int bus, int t) {
    return "bal_b" + std::to_string(bus) + "_t" + std::to_string(t);
}
inline std::string balance_mg(int t) { return "bal_t" + std::to_string(t); }
inline std::string line_hi(const std::string& line, int t) {
    return "lim_" + line + "_t" + std::to_string(t) + "_hi";
}
inline std::string line_lo(const std::string& line, int t) {
    return "lim_" + line + "_t" + std::to_string(t) + "_lo";
}
inline std::string nn_prefix(const std::string& s, int t) {
    return "nn_" + s + "_t" + std::to_string(t);
}

}  // namespace names

struct BuildOptions {
    EncodeOptions encode;
};

struct BuildInfo {
    int commitment_binaries = 0;  // u/v/uc/ud/ubuy/usell
    int nn_binaries = 0;          // ReLU indicator binaries
    int total_binaries = 0;
    int nn_dead = 0;       // provably-off neurons across all embeddings
    int nn_always_on = 0;  // provably-on neurons across all embeddings
    int nn_embeddings = 0;
};

// ---------------------------------------------------------------------------
// Degradation coupling

// Attach the trained network to one storage unit: per hour, normalized
// feature variables are tied to the schedule (start-of-hour SOC, equivalent
// depth of discharge, ambient temperature, discharge rate, current health),
// the network is embedded, and the day's predicted SOH loss is accumulated
// into bd_<name>, charged at the unit's cost per SOH point. Storage
// variables named by the builders must already exist in the model.
inline void couple_degradation(MilpModel& model, const BessSpec& s,
                               const SparseNet& net, const Profiles& profiles,
                               const EncodeOptions& encode = {},
                               BuildInfo* info = nullptr) {
    net.check_invariants();
    detail::check_bess(s);
    const Normalization& nm = net.norm;
    const double soc_lo = s.e_min / s.e_max;
    const double soc_hi = 1.0;
    const double dod_max =
        kDtHours * std::max(s.eta_char * s.p_char_max, s.p_disc_max / s.eta_disc) /
        s.e_max;
    const double crate_max = dod_max / kDtHours;
    const double soh_now = s.econ.soh_now;

    auto check_cover = [&](int fi, double lo, double hi, const std::string& what) {
        const auto& r = nm.feature[fi];
        if (lo < r.lo - 1e-12 || hi > r.hi + 1e-12) {
            throw CouplingError(
                "schedule-reachable " + feature_names()[fi] + " range [" +
                fmt_full(lo) + ", " + fmt_full(hi) + "] for storage " + s.name +
                " (" + what + ") is not covered by the network's training range [" +
                fmt_full(r.lo) + ", " + fmt_full(r.hi) + "]");
        }
    };
    check_cover(0, soc_lo, soc_hi, "state of charge");
    check_cover(1, 0.0, dod_max, "depth of discharge per hour");
    check_cover(3, 0.0, crate_max, "discharge rate");
    check_cover(4, soh_now, soh_now, "state of health");
    if (static_cast<int>(profiles.temperature_c.size()) != kHorizon) {
        throw CouplingError("temperature profile must cover the horizon");
    }
    for (double tc : profiles.temperature_c) {
        check_cover(2, tc, tc, "ambient temperature");
    }

    const double w_t = nm.target.width();
    LinExpr bd_sum;  // sum over hours of denormalized predictions
    double bd_lb = 0.0, bd_ub = 0.0;
    for (int t = 1; t <= kHorizon; ++t) {
        const std::string prefix = names::nn_prefix(s.name, t);
        std::array<int, kNumFeatures> zin{};
        // soc_start: previous hour's closing energy over capacity.
        {
            const double zlo = nm.normalize_one(0, soc_lo);
            const double zhi = nm.normalize_one(0, soc_hi);
            if (t == 1) {
                const double z0 = nm.normalize_one(0, s.e_initial / s.e_max);
                zin[0] = model.add_continuous(prefix + "_zsoc", z0, z0);
            } else {
                zin[0] = model.add_continuous(prefix + "_zsoc", zlo, zhi);
                LinExpr eq;
                eq.add(zin[0], nm.feature[0].width());
                eq.add(model.var_index(names::e(s.name, t - 1)), -1.0 / s.e_max);
                model.add_constraint(prefix + "_zsoc_eq", eq, Sense::EQ,
                                     -nm.feature[0].lo);
            }
        }
        // dod: hourly equivalent depth from charge and discharge flows. Under
        // charge/discharge exclusivity this equals |delta SOC| exactly.
        const double flow_coef_c = kDtHours * s.eta_char / s.e_max;
        const double flow_coef_d = kDtHours / (s.eta_disc * s.e_max);
        {
            zin[1] = model.add_continuous(prefix + "_zdod", nm.normalize_one(1, 0.0),
                                          nm.normalize_one(1, dod_max));
            LinExpr eq;
            eq.add(zin[1], nm.feature[1].width());
            eq.add(model.var_index(names::pc(s.name, t)), -flow_coef_c);
            eq.add(model.var_index(names::pd(s.name, t)), -flow_coef_d);
            model.add_constraint(prefix + "_zdod_eq", eq, Sense::EQ,
                                 -nm.feature[1].lo);
        }
        {
            const double z = nm.normalize_one(2, profiles.temperature_c[t - 1]);
            zin[2] = model.add_continuous(prefix + "_ztemp", z, z);
        }
        {
            zin[3] = model.add_continuous(prefix + "_zcrate",
                                          nm.normalize_one(3, 0.0),
                                          nm.normalize_one(3, crate_max));
            LinExpr eq;
            eq.add(zin[3], nm.feature[3].width());
            eq.add(model.var_index(names::pc(s.name, t)), -flow_coef_c / kDtHours);
            eq.add(model.var_index(names::pd(s.name, t)), -flow_coef_d / kDtHours);
            model.add_constraint(prefix + "_zcrate_eq", eq, Sense::EQ,
                                 -nm.feature[3].lo);
        }
        {
            const double z = nm.normalize_one(4, soh_now);
            zin[4] = model.add_continuous(prefix + "_zsoh", z, z);
        }
        const EncodeResult enc = encode_network(model, net, zin, prefix, encode);
        bd_sum.add(enc.out_var, w_t);
        bd_sum.add_constant(nm.target.lo);
        bd_lb += nm.target.lo + w_t * model.var(enc.out_var).lb;
        bd_ub += nm.target.lo + w_t * model.var(enc.out_var).ub;
        if (info) {
            info->nn_binaries += enc.binaries;
            info->nn_dead += enc.dead;
            info->nn_always_on += enc.always_on;
            ++info->nn_embeddings;
        }
    }
    const int bd_var = model.add_continuous(names::bd(s.name), bd_lb, bd_ub);
    LinExpr eq;
    eq.add(bd_var, 1.0).add(bd_sum, -1.0);
    model.add_constraint(names::bd(s.name) + "_eq", eq, Sense::EQ, 0.0);
    LinExpr obj;
    obj.add(bd_var, s.econ.cost_per_soh());
    model.add_objective(obj);
}

// ---------------------------------------------------------------------------
// Shared commitment pieces

namespace detail {

inline void add_generator_block(MilpModel& m, const GeneratorSpec& g) {
    for (int t = 1; t <= kHorizon; ++t) {
        m.add_continuous(names::p(g.name, t), 0.0, g.p_max);
        m.add_binary(names::u(g.name, t));
        m.add_binary(names::v(g.name, t));
    }
    LinExpr obj;
    for (int t = 1; t <= kHorizon; ++t) {
        obj.add(m.var_index(names::p(g.name, t)), g.cost * kDtHours);
        obj.add(m.var_index(names::u(g.name, t)), g.no_load_cost * kDtHours);
        obj.add(m.var_index(names::v(g.name, t)), g.startup_cost);
    }
    m.add_objective(obj);
    for (int t = 1; t <= kHorizon; ++t) {
        const int p = m.var_index(names::p(g.name, t));
        const int u = m.var_index(names::u(g.name, t));
        const int v = m.var_index(names::v(g.name, t));
        const std::string base = g.name + "_t" + std::to_string(t);
        LinExpr hi;
        hi.add(p, 1.0).add(u, -g.p_max);
        m.add_constraint(base + "_pmax", hi, Sense::LE, 0.0);
        if (g.p_min > 0.0) {
            LinExpr lo;
            lo.add(p, 1.0).add(u, -g.p_min);
            m.add_constraint(base + "_pmin", lo, Sense::GE, 0.0);
        }
        if (t >= 2) {
            const int pp = m.var_index(names::p(g.name, t - 1));
            LinExpr rup;
            rup.add(p, 1.0).add(pp, -1.0);
            m.add_constraint(base + "_rup", rup, Sense::LE, g.ramp * kDtHours);
            LinExpr rdn;
            rdn.add(pp, 1.0).add(p, -1.0);
            m.add_constraint(base + "_rdn", rdn, Sense::LE, g.ramp * kDtHours);
        }
        // Units start the day offline: hour 1 commitment is a startup.
        LinExpr su;
        su.add(v, 1.0).add(u, -1.0);
        if (t >= 2) su.add(m.var_index(names::u(g.name, t - 1)), 1.0);
        m.add_constraint(base + "_su", su, Sense::GE, 0.0);
        if (t >= 2) {
            LinExpr sd;
            sd.add(v, 1.0).add(m.var_index(names::u(g.name, t - 1)), 1.0);
            m.add_constraint(base + "_sd", sd, Sense::LE, 1.0);
        }
        LinExpr vu;
        vu.add(v, 1.0).add(u, -1.0);
        m.add_constraint(base + "_vu", vu, Sense::LE, 0.0);
    }
}

inline void add_bess_block(MilpModel& m, const BessSpec& s) {
    for (int t = 1; t <= kHorizon; ++t) {
        m.add_continuous(names::pc(s.name, t), 0.0, s.p_char_max);
        m.add_continuous(names::pd(s.name, t), 0.0, s.p_disc_max);
        m.add_binary(names::uc(s.name, t));
        m.add_binary(names::ud(s.name, t));
        m.add_continuous(names::e(s.name, t), s.e_min, s.e_max);
    }
    for (int t = 1; t <= kHorizon; ++t) {
        const int pc = m.var_index(names::pc(s.name, t));
        const int pd = m.var_index(names::pd(s.name, t));
        const int uc = m.var_index(names::uc(s.name, t));
        const int ud = m.var_index(names::ud(s.name, t));
        const int e = m.var_index(names::e(s.name, t));
        const std::string base = s.name + "_t" + std::to_string(t);
        LinExpr excl;
        excl.add(uc, 1.0).add(ud, 1.0);
        m.add_constraint(base + "_excl", excl, Sense::LE, 1.0);
        LinExpr cmax;
        cmax.add(pc, 1.0).add(uc, -s.p_char_max);
        m.add_constraint(base + "_pcmax", cmax, Sense::LE, 0.0);
        if (s.p_char_min > 0.0) {
            LinExpr cmin;
            cmin.add(pc, 1.0).add(uc, -s.p_char_min);
            m.add_constraint(base + "_pcmin", cmin, Sense::GE, 0.0);
        }
        LinExpr dmax;
        dmax.add(pd, 1.0).add(ud, -s.p_disc_max);
        m.add_constraint(base + "_pdmax", dmax, Sense::LE, 0.0);
        if (s.p_disc_min > 0.0) {
            LinExpr dmin;
            dmin.add(pd, 1.0).add(ud, -s.p_disc_min);
            m.add_constraint(base + "_pdmin", dmin, Sense::GE, 0.0);
        }
        // e_t = e_{t-1} - dt*(pd/eta_d - pc*eta_c)
        LinExpr ebal;
        ebal.add(e, 1.0)
            .add(pd, kDtHours / s.eta_disc)
            .add(pc, -kDtHours * s.eta_char);
        double rhs = 0.0;
        if (t == 1) {
            rhs = s.e_initial;
        } else {
            ebal.add(m.var_index(names::e(s.name, t - 1)), -1.0);
        }
        m.add_constraint(base + "_ebal", ebal, Sense::EQ, rhs);
    }
    LinExpr term;
    term.add(m.var_index(names::e(s.name, kHorizon)), 1.0);
    m.add_constraint(s.name + "_term", term, Sense::EQ, s.e_initial);
}

inline double fixed_injection(const Profiles& p, int bus, int t) {
    double mw = 0.0;
    for (const auto& w : p.wind) {
        if (w.bus == bus) mw += w.mw[static_cast<std::size_t>(t - 1)];
    }
    for (const auto& w : p.solar) {
        if (w.bus == bus) mw += w.mw[static_cast<std::size_t>(t - 1)];
    }
    return mw;
}

inline void count_binaries(const MilpModel& m, BuildInfo* info) {
    if (!info) return;
    info->total_binaries = m.num_binaries();
    info->commitment_binaries = info->total_binaries - info->nn_binaries;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Bulk network model

inline MilpModel build_scuc(const NetworkCase& c, const SparseNet* net = nullptr,
                            const BuildOptions& opts = {},
                            BuildInfo* info = nullptr) {
    c.validate();
    MilpModel m("scuc_" + c.name);
    for (const auto& g : c.generators) detail::add_generator_block(m, g);
    for (const auto& l : c.lines) {
        for (int t = 1; t <= kHorizon; ++t) {
            m.add_continuous(names::flow(l.name, t), -kInf, kInf);
        }
    }
    for (int b : c.buses) {
        for (int t = 1; t <= kHorizon; ++t) {
            if (b == c.reference_bus) {
                m.add_continuous(names::theta(b, t), 0.0, 0.0);
            } else {
                m.add_continuous(names::theta(b, t), -kInf, kInf);
            }
        }
    }
    for (const auto& s : c.bess) detail::add_bess_block(m, s);

    // DC flow definition and explicit (dual-visible) line limit rows.
    for (const auto& l : c.lines) {
        for (int t = 1; t <= kHorizon; ++t) {
            const int f = m.var_index(names::flow(l.name, t));
            LinExpr dc;
            dc.add(f, 1.0)
                .add(m.var_index(names::theta(l.from_bus, t)), -l.susceptance)
                .add(m.var_index(names::theta(l.to_bus, t)), l.susceptance);
            m.add_constraint("dc_" + l.name + "_t" + std::to_string(t), dc,
                             Sense::EQ, 0.0);
            LinExpr hi;
            hi.add(f, 1.0);
            m.add_constraint(names::line_hi(l.name, t), hi, Sense::LE, l.limit);
            m.annotate(names::line_hi(l.name, t),
                       "line_limit line=" + l.name + " t=" + std::to_string(t) +
                           " dir=hi");
            LinExpr lo;
            lo.add(f, -1.0);
            m.add_constraint(names::line_lo(l.name, t), lo, Sense::LE, l.limit);
            m.annotate(names::line_lo(l.name, t),
                       "line_limit line=" + l.name + " t=" + std::to_string(t) +
                           " dir=lo");
        }
    }

    // Nodal balance: generation + storage discharge + imports - storage
    // charge - exports = load - fixed renewables.
    for (int b : c.buses) {
        for (int t = 1; t <= kHorizon; ++t) {
            LinExpr bal;
            for (const auto& g : c.generators) {
                if (g.bus == b) bal.add(m.var_index(names::p(g.name, t)), 1.0);
            }
            for (const auto& s : c.bess) {
                if (s.bus == b) {
                    bal.add(m.var_index(names::pd(s.name, t)), 1.0);
                    bal.add(m.var_index(names::pc(s.name, t)), -1.0);
                }
            }
            for (const auto& l : c.lines) {
                if (l.to_bus == b) bal.add(m.var_index(names::flow(l.name, t)), 1.0);
                if (l.from_bus == b) {
                    bal.add(m.var_index(names::flow(l.name, t)), -1.0);
                }
            }
            double load = 0.0;
            auto it = c.profiles.load.find(b);
            if (it != c.profiles.load.end()) {
                load = it->second[static_cast<std::size_t>(t - 1)];
            }
            const double rhs = load - detail::fixed_injection(c.profiles, b, t);
            if (bal.empty()) {
                throw CaseError("bus " + std::to_string(b) +
                                " has no devices or lines to balance its load");
            }
            m.add_constraint(names::balance(b, t), bal, Sense::EQ, rhs);
            m.annotate(names::balance(b, t), "balance bus=" + std::to_string(b) +
                                                 " t=" + std::to_string(t));
        }
    }

    if (net) {
        for (const auto& s : c.bess) {
            couple_degradation(m, s, *net, c.profiles, opts.encode, info);
        }
    }
    detail::count_binaries(m, info);
    return m;
}

// ---------------------------------------------------------------------------
// Microgrid model

inline MilpModel build_microgrid(const MicrogridCase& c,
                                 const SparseNet* net = nullptr,
                                 const BuildOptions& opts = {},
                                 BuildInfo* info = nullptr) {
    c.validate();
    MilpModel m("microgrid_" + c.name);
    for (const auto& g : c.generators) detail::add_generator_block(m, g);
    for (const auto& s : c.bess) detail::add_bess_block(m, s);
    const double tie = c.profiles.tie_limit_mw;
    for (int t = 1; t <= kHorizon; ++t) {
        m.add_continuous(names::pbuy(t), 0.0, tie);
        m.add_continuous(names::psell(t), 0.0, tie);
        m.add_binary(names::ubuy(t));
        m.add_binary(names::usell(t));
    }
    LinExpr obj;
    for (int t = 1; t <= kHorizon; ++t) {
        obj.add(m.var_index(names::pbuy(t)),
                c.profiles.buy_price[static_cast<std::size_t>(t - 1)] * kDtHours);
        obj.add(m.var_index(names::psell(t)),
                -c.profiles.sell_price[static_cast<std::size_t>(t - 1)] * kDtHours);
    }
    m.add_objective(obj);

    for (int t = 1; t <= kHorizon; ++t) {
        const int pbuy = m.var_index(names::pbuy(t));
        const int psell = m.var_index(names::psell(t));
        const int ubuy = m.var_index(names::ubuy(t));
        const int usell = m.var_index(names::usell(t));
        const std::string base = "tie_t" + std::to_string(t);
        LinExpr excl;
        excl.add(ubuy, 1.0).add(usell, 1.0);
        m.add_constraint(base + "_excl", excl, Sense::LE, 1.0);
        LinExpr bmax;
        bmax.add(pbuy, 1.0).add(ubuy, -tie);
        m.add_constraint(base + "_buymax", bmax, Sense::LE, 0.0);
        LinExpr smax;
        smax.add(psell, 1.0).add(usell, -tie);
        m.add_constraint(base + "_sellmax", smax, Sense::LE, 0.0);

        const double load = c.load()[static_cast<std::size_t>(t - 1)];
        LinExpr bal;
        for (const auto& g : c.generators) {
            bal.add(m.var_index(names::p(g.name, t)), 1.0);
        }
        for (const auto& s : c.bess) {
            bal.add(m.var_index(names::pd(s.name, t)), 1.0);
            bal.add(m.var_index(names::pc(s.name, t)), -1.0);
        }
        bal.add(pbuy, 1.0).add(psell, -1.0);
        m.add_constraint(names::balance_mg(t), bal, Sense::EQ,
                         load - detail::fixed_injection(c.profiles, 0, t));
        m.annotate(names::balance_mg(t), "balance bus=0 t=" + std::to_string(t));

        // Reserve: unused tie import headroom plus sell-back plus committed
        // generator headroom must cover a fraction of load.
        LinExpr resv;
        resv.add(pbuy, -1.0).add(psell, 1.0);
        double rhs = c.profiles.reserve_fraction * load - tie;
        for (const auto& g : c.generators) {
            resv.add(m.var_index(names::p(g.name, t)), -1.0);
            rhs -= g.p_max;
        }
        m.add_constraint("resv_t" + std::to_string(t), resv, Sense::GE, rhs);
    }

    if (net) {
        for (const auto& s : c.bess) {
            couple_degradation(m, s, *net, c.profiles, opts.encode, info);
        }
    }
    detail::count_binaries(m, info);
    return m;
}

}  // namespace sparsched
