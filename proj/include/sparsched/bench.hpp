#pragma once

// Sparsity benchmark: fine-tune one pruned network per sparsity level from a
// shared dense base, embed each in the same scheduling case with the full
// per-neuron encoding (one binary per unpruned neuron), solve repeatedly for
// a median wall time, and re-price every schedule with the dense network so
// totals are comparable across sparsity levels.

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sparsched/cases.hpp"
#include "sparsched/common.hpp"
#include "sparsched/net.hpp"
#include "sparsched/sched.hpp"
#include "sparsched/solution.hpp"
#include "sparsched/solver.hpp"

namespace sparsched {

struct BenchRow {
    double sparsity = 0.0;
    int nn_binaries = 0;
    int total_binaries = 0;
    SolveStatus status = SolveStatus::Timeout;
    double objective = 0.0;
    double gap = 0.0;
    double median_time_s = 0.0;
    std::vector<double> run_times_s;
    double operation_cost = 0.0;
    double degradation_cost = 0.0;   // as predicted by the pruned network
    double pseudo_total = 0.0;       // operation + pruned-network prediction
    double updated_total = 0.0;      // operation + dense-network replay
    double test_mse = 0.0;           // pruned network on the held-out split
    int violations = 0;
    std::string error;  // nonempty when this level failed; other fields partial
};

struct BenchConfig {
    std::vector<double> sparsities{0.2, 0.3, 0.4, 0.5};
    int runs = 3;           // timing repetitions per level
    int fine_tune_epochs = 250;
    SolverOptions solver;
    BuildOptions build = {EncodeOptions{false}};  // keep every active binary

    void validate() const {
        if (sparsities.empty()) throw ConfigError("bench needs sparsity levels");
        if (runs < 1) throw ConfigError("bench runs must be >= 1");
        if (fine_tune_epochs < 1) throw ConfigError("fine_tune_epochs must be >= 1");
    }
};

namespace detail {

inline MilpModel build_model(const NetworkCase& c, const SparseNet* net,
                             const BuildOptions& o, BuildInfo* info) {
    return build_scuc(c, net, o, info);
}

inline MilpModel build_model(const MicrogridCase& c, const SparseNet* net,
                             const BuildOptions& o, BuildInfo* info) {
    return build_microgrid(c, net, o, info);
}

inline double lower_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

}  // namespace detail

// Run the benchmark on one case. `dense` must be the unpruned base network
// trained on `ds`; each sparsity level warm-starts from it. A failure at one
// level is recorded in that row's error column and the sweep continues.
template <typename CaseT>
std::vector<BenchRow> run_bench(const CaseT& c, const SparseNet& dense,
                                const Dataset& ds, const BenchConfig& cfg) {
    cfg.validate();
    std::vector<BenchRow> rows;
    for (double eps : cfg.sparsities) {
        BenchRow row;
        row.sparsity = eps;
        try {
            TrainConfig tc;
            tc.epochs = cfg.fine_tune_epochs;
            tc.sparsity = eps;
            const SparseNet net = eps == 0.0 ? dense : train_warm(dense, ds, tc);
            row.test_mse = evaluate_accuracy(net, ds, {0.05}).mse;

            BuildInfo info;
            MilpModel model = detail::build_model(c, &net, cfg.build, &info);
            row.nn_binaries = info.nn_binaries;
            row.total_binaries = info.total_binaries;

            std::optional<SolveResult> last;
            for (int r = 0; r < cfg.runs; ++r) {
                SolveResult res = solve(model, cfg.solver);
                row.run_times_s.push_back(res.wall_time_s);
                last = std::move(res);
            }
            row.median_time_s = detail::lower_median(row.run_times_s);
            row.status = last->status;
            row.objective = last->objective;
            row.gap = last->gap;

            ScheduleSolution sol = extract_solution(c, *last, &net);
            row.operation_cost = sol.operation_cost;
            row.degradation_cost = sol.degradation_cost;
            row.pseudo_total = sol.pseudo_total;
            row.violations = static_cast<int>(validate_solution(c, sol).size());
            double replay_cost = 0.0;
            for (const auto& rep : recompute_degradation(
                     dense, c.bess, sol, c.profiles.temperature_c)) {
                replay_cost += rep.cost;
            }
            row.updated_total = sol.operation_cost + replay_cost;
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "sparsity,nn_binaries,total_binaries,status,objective,gap,"
          "median_time_s,operation_cost,degradation_cost,pseudo_total,"
          "updated_total,test_mse,violations,error\n";
    for (const auto& r : rows) {
        os << fmt_full(r.sparsity) << ',' << r.nn_binaries << ','
           << r.total_binaries << ',' << status_text(r.status) << ','
           << fmt_full(r.objective) << ',' << fmt_full(r.gap) << ','
           << fmt_full(r.median_time_s) << ',' << fmt_full(r.operation_cost)
           << ',' << fmt_full(r.degradation_cost) << ','
           << fmt_full(r.pseudo_total) << ',' << fmt_full(r.updated_total)
           << ',' << fmt_full(r.test_mse) << ',' << r.violations << ','
           << r.error << '\n';
    }
    return os.str();
}

inline std::string gap_sweep_csv(const std::vector<GapSweepRow>& rows) {
    std::ostringstream os;
    os << "gap_request,status,objective,bound,wall_time_s\n";
    for (const auto& r : rows) {
        os << fmt_full(r.gap) << ',' << status_text(r.status) << ','
           << fmt_full(r.objective) << ',' << fmt_full(r.best_bound) << ','
           << fmt_full(r.wall_time_s) << '\n';
    }
    return os.str();
}

}  // namespace sparsched
