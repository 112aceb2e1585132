#pragma once

// Locational marginal prices. The unit-commitment MILP is re-built, every
// binary is fixed at its incumbent value, and the remaining LP is solved for
// duals. The price at a bus is the dual of that bus's power-balance row: the
// cost of serving one more MW there for one hour. Line-limit duals expose
// congestion rents.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sparsched/cases.hpp"
#include "sparsched/common.hpp"
#include "sparsched/milp.hpp"
#include "sparsched/sched.hpp"
#include "sparsched/solver.hpp"

namespace sparsched {

struct CongestionEntry {
    std::string line;
    int t = 0;
    double flow = 0.0;
    double limit = 0.0;
    double dual = 0.0;  // rent on the binding direction's row
};

struct LmpResult {
    std::map<int, std::vector<double>> lmp;  // $/MWh per bus per hour
    std::vector<CongestionEntry> congestion;
    double lp_objective = 0.0;
};

namespace detail {

inline void fix_all_binaries(MilpModel& model, const SolveResult& incumbent) {
    std::vector<std::string> names;
    for (int i = 0; i < model.num_vars(); ++i) {
        const Variable& v = model.var(i);
        if (v.kind == VarKind::Binary) names.push_back(v.name);
    }
    for (const auto& n : names) {
        auto it = incumbent.values.find(n);
        if (it == incumbent.values.end()) {
            throw ExtractionError("incumbent solution is missing binary " + n);
        }
        model.fix_binary(n, it->second);
    }
}

inline SolveResult priced_lp(MilpModel& model, const SolveResult& incumbent,
                             const SolverOptions& opts) {
    fix_all_binaries(model, incumbent);
    SolveResult lp = solve(model, opts);
    if (lp.status != SolveStatus::Optimal) {
        throw ConsistencyError(
            std::string("fixed-binary pricing LP came back '") +
            status_text(lp.status) +
            "'; the incumbent schedule does not satisfy its own model");
    }
    if (lp.duals.empty()) {
        throw AdapterError("solver returned no duals for the pricing LP");
    }
    return lp;
}

}  // namespace detail

// Bulk-network prices from a solved commitment. `net` must match the model
// the incumbent was solved against (pass nullptr for a degradation-blind
// schedule).
inline LmpResult compute_lmp(const NetworkCase& c, const SparseNet* net,
                             const SolveResult& incumbent,
                             const SolverOptions& opts,
                             const BuildOptions& build = {}) {
    MilpModel model = build_scuc(c, net, build);
    SolveResult lp = detail::priced_lp(model, incumbent, opts);
    LmpResult out;
    out.lp_objective = lp.objective;
    for (int b : c.buses) {
        std::vector<double>& prices = out.lmp[b];
        for (int t = 1; t <= kHorizon; ++t) {
            prices.push_back(lp.dual(names::balance(b, t)));
        }
    }
    for (const auto& l : c.lines) {
        for (int t = 1; t <= kHorizon; ++t) {
            const double flow = lp.value(names::flow(l.name, t));
            const double d_hi = lp.dual(names::line_hi(l.name, t));
            const double d_lo = lp.dual(names::line_lo(l.name, t));
            const bool binding = std::abs(flow) >= l.limit - 1e-6 ||
                                 std::abs(d_hi) > 1e-7 || std::abs(d_lo) > 1e-7;
            if (binding) {
                const double rent =
                    std::abs(d_hi) > std::abs(d_lo) ? d_hi : d_lo;
                out.congestion.push_back({l.name, t, flow, l.limit, rent});
            }
        }
    }
    return out;
}

// Microgrid price: the dual of the single balance row, reported as bus 0.
inline LmpResult compute_lmp(const MicrogridCase& c, const SparseNet* net,
                             const SolveResult& incumbent,
                             const SolverOptions& opts,
                             const BuildOptions& build = {}) {
    MilpModel model = build_microgrid(c, net, build);
    SolveResult lp = detail::priced_lp(model, incumbent, opts);
    LmpResult out;
    out.lp_objective = lp.objective;
    std::vector<double>& prices = out.lmp[0];
    for (int t = 1; t <= kHorizon; ++t) {
        prices.push_back(lp.dual(names::balance_mg(t)));
    }
    return out;
}

inline void write_lmp_csv(const std::filesystem::path& path,
                          const LmpResult& r) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << "bus,t,lmp\n";
    for (const auto& [bus, prices] : r.lmp) {
        for (int t = 1; t <= kHorizon; ++t) {
            f << bus << ',' << t << ','
              << fmt_full(prices[static_cast<std::size_t>(t - 1)]) << '\n';
        }
    }
}

}  // namespace sparsched
