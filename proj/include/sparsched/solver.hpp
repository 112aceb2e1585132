#pragma once

// Out-of-process solve: emit MPS to a scratch directory, invoke the
// configured solver executable, parse its solution file back. The solver is
// interchangeable — anything that reads MPS and writes the documented
// "status/objective/values/duals" line format works; tools/solve-highs.py is
// the bundled reference.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#ifdef __unix__
#include <sys/wait.h>
#include <unistd.h>
#endif

#include "sparsched/common.hpp"
#include "sparsched/milp.hpp"
#include "sparsched/milp_io.hpp"

namespace sparsched {

constexpr const char* kSolverEnvVar = "SPARSCHED_SOLVER";

struct SolverOptions {
    double mip_gap = 0.001;
    double time_limit_s = 600.0;
    std::string solver_cmd;             // empty: use $SPARSCHED_SOLVER
    std::filesystem::path scratch_dir;  // empty: fresh unique directory
    bool keep_scratch = false;

    void validate() const {
        if (!(mip_gap >= 0.0) || !(mip_gap < 1.0)) {
            throw ConfigError("mip_gap must lie in [0,1), got " + fmt_full(mip_gap));
        }
        if (!(time_limit_s > 0.0)) {
            throw ConfigError("time_limit_s must be positive");
        }
    }
};

enum class SolveStatus { Optimal, FeasibleGap, Infeasible, Unbounded, Timeout };

inline const char* status_text(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::FeasibleGap: return "feasible";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::Timeout: return "timeout";
    }
    return "?";
}

struct SolveResult {
    SolveStatus status = SolveStatus::Timeout;
    double objective = 0.0;
    double best_bound = 0.0;
    double gap = 0.0;
    double wall_time_s = 0.0;    // measured around the solver process
    double solver_time_s = 0.0;  // as reported by the solver itself
    std::unordered_map<std::string, double> values;
    std::unordered_map<std::string, double> duals;

    bool has_solution() const {
        return status == SolveStatus::Optimal || status == SolveStatus::FeasibleGap;
    }

    double value(const std::string& name) const {
        auto it = values.find(name);
        if (it == values.end()) {
            throw ExtractionError("solution has no value for variable " + name);
        }
        return it->second;
    }

    double dual(const std::string& row) const {
        auto it = duals.find(row);
        if (it == duals.end()) {
            throw ExtractionError("solution has no dual for row " + row);
        }
        return it->second;
    }
};

namespace detail {

inline std::string resolve_solver_cmd(const SolverOptions& opts) {
    std::string cmd = opts.solver_cmd;
    if (cmd.empty()) {
        if (const char* env = std::getenv(kSolverEnvVar)) cmd = env;
    }
    if (cmd.empty()) {
        throw EnvironmentError(
            std::string("no solver configured: set ") + kSolverEnvVar +
            " or SolverOptions::solver_cmd to a solver executable");
    }
    if (cmd.find('\'') != std::string::npos) {
        throw EnvironmentError("solver path must not contain quotes: " + cmd);
    }
    if (cmd.find('/') != std::string::npos &&
        !std::filesystem::exists(std::filesystem::path(cmd))) {
        throw EnvironmentError("solver executable not found: " + cmd);
    }
    return cmd;
}

inline std::filesystem::path make_scratch_dir() {
    static std::atomic<unsigned> counter{0};
    const auto base = std::filesystem::temp_directory_path();
#ifdef __unix__
    const long pid = static_cast<long>(::getpid());
#else
    const long pid = 0;
#endif
    const auto dir = base / ("sparsched-" + std::to_string(pid) + "-" +
                             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir);
    return dir;
}

struct ScratchGuard {
    std::filesystem::path dir;
    bool keep = false;
    ~ScratchGuard() {
        if (!keep && !dir.empty()) {
            std::error_code ec;
            std::filesystem::remove_all(dir, ec);
        }
    }
};

inline std::string read_tail(const std::filesystem::path& p, std::size_t max_len) {
    std::ifstream f(p, std::ios::binary);
    if (!f) return "";
    std::ostringstream os;
    os << f.rdbuf();
    std::string s = os.str();
    if (s.size() > max_len) s = "..." + s.substr(s.size() - max_len);
    return s;
}

inline SolveResult parse_solution_file(const std::filesystem::path& path,
                                       const SolverOptions& opts) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw AdapterError("solver wrote no solution file at " + path.string());
    SolveResult r;
    std::string line;
    long lineno = 0;
    bool saw_status = false, saw_objective = false;
    auto next_tokens = [&](std::vector<std::string>& toks) {
        toks.clear();
        if (!std::getline(f, line)) return false;
        ++lineno;
        std::istringstream is(line);
        std::string t;
        while (is >> t) toks.push_back(t);
        return true;
    };
    std::vector<std::string> toks;
    while (next_tokens(toks)) {
        if (toks.empty()) continue;
        const std::string& key = toks[0];
        auto want = [&](std::size_t n) {
            if (toks.size() != n) {
                throw AdapterError("malformed solution line " +
                                   std::to_string(lineno) + ": '" + line + "'");
            }
        };
        auto num = [&](const std::string& t) {
            try {
                std::size_t used = 0;
                const double v = std::stod(t, &used);
                if (used != t.size()) throw std::invalid_argument(t);
                return v;
            } catch (const std::exception&) {
                throw AdapterError("bad number '" + t + "' in solution line " +
                                   std::to_string(lineno));
            }
        };
        if (key == "status") {
            want(2);
            const std::string& s = toks[1];
            if (s == "optimal") {
                r.status = SolveStatus::Optimal;
            } else if (s == "feasible") {
                r.status = SolveStatus::FeasibleGap;
            } else if (s == "infeasible") {
                r.status = SolveStatus::Infeasible;
            } else if (s == "unbounded") {
                r.status = SolveStatus::Unbounded;
            } else if (s == "timeout") {
                r.status = SolveStatus::Timeout;
            } else {
                throw AdapterError("unknown solver status '" + s + "'");
            }
            saw_status = true;
        } else if (key == "objective") {
            want(2);
            r.objective = num(toks[1]);
            saw_objective = true;
        } else if (key == "bound") {
            want(2);
            r.best_bound = num(toks[1]);
        } else if (key == "gap") {
            want(2);
            r.gap = num(toks[1]);
        } else if (key == "walltime") {
            want(2);
            r.solver_time_s = num(toks[1]);
        } else if (key == "values" || key == "duals") {
            want(2);
            const long n = std::lround(num(toks[1]));
            auto& dst = key == "values" ? r.values : r.duals;
            dst.reserve(static_cast<std::size_t>(n));
            for (long i = 0; i < n; ++i) {
                if (!next_tokens(toks) || toks.size() != 2) {
                    throw AdapterError("truncated " + key + " block in solution file");
                }
                dst[toks[0]] = num(toks[1]);
            }
        } else {
            throw AdapterError("unknown solution record '" + key + "'");
        }
    }
    if (!saw_status) throw AdapterError("solution file has no status line");
    if (r.has_solution() && !saw_objective) {
        throw AdapterError("solution claims feasibility but carries no objective");
    }
    // A claimed optimum whose reported gap exceeds the request is downgraded.
    if (r.status == SolveStatus::Optimal && r.gap > opts.mip_gap + 1e-12) {
        r.status = SolveStatus::FeasibleGap;
    }
    return r;
}

}  // namespace detail

inline SolveResult solve(const MilpModel& model, const SolverOptions& opts = {}) {
    opts.validate();
    const std::string cmd = detail::resolve_solver_cmd(opts);
    detail::ScratchGuard scratch;
    scratch.keep = opts.keep_scratch || !opts.scratch_dir.empty();
    if (opts.scratch_dir.empty()) {
        scratch.dir = detail::make_scratch_dir();
    } else {
        scratch.dir = opts.scratch_dir;
        std::filesystem::create_directories(scratch.dir);
    }
    const auto mps_path = scratch.dir / "model.mps";
    const auto sol_path = scratch.dir / "solution.sol";
    const auto log_path = scratch.dir / "solver.log";
    {
        std::ofstream f(mps_path, std::ios::binary);
        if (!f) throw Error("cannot write " + mps_path.string());
        f << emit_mps(model);
    }
    std::string full = cmd;
    if (cmd.size() > 3 && cmd.substr(cmd.size() - 3) == ".py") {
        full = "python3 '" + cmd + "'";
    } else if (cmd.find('/') != std::string::npos) {
        full = "'" + cmd + "'";
    }
    full += " '" + mps_path.string() + "' '" + sol_path.string() + "' --gap " +
            fmt_full(opts.mip_gap) + " --time-limit " + fmt_full(opts.time_limit_s) +
            " > '" + log_path.string() + "' 2>&1";
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = std::system(full.c_str());
    const auto t1 = std::chrono::steady_clock::now();
    int exit_code = rc;
#ifdef __unix__
    if (rc != -1 && WIFEXITED(rc)) exit_code = WEXITSTATUS(rc);
#endif
    if (rc == -1) {
        throw EnvironmentError("failed to launch solver command: " + full);
    }
    if (exit_code == 127) {
        throw EnvironmentError("solver executable not found: " + cmd);
    }
    if (exit_code != 0) {
        throw AdapterError("solver exited with code " + std::to_string(exit_code) +
                           ": " + detail::read_tail(log_path, 2000));
    }
    SolveResult r = detail::parse_solution_file(sol_path, opts);
    r.wall_time_s =
        std::chrono::duration<double>(t1 - t0).count();
    if (r.has_solution() &&
        static_cast<int>(r.values.size()) != model.num_vars()) {
        throw AdapterError("solver returned " + std::to_string(r.values.size()) +
                           " values for " + std::to_string(model.num_vars()) +
                           " variables");
    }
    return r;
}

// ---------------------------------------------------------------------------
// Gap sweep: identical model and options, only the MIP gap varies.

struct GapSweepRow {
    double gap = 0.0;
    SolveStatus status = SolveStatus::Timeout;
    double objective = 0.0;
    double best_bound = 0.0;
    double wall_time_s = 0.0;
};

inline std::vector<GapSweepRow> gap_sweep(const MilpModel& model,
                                          const std::vector<double>& gaps,
                                          SolverOptions opts = {}) {
    if (gaps.size() < 2) {
        throw ConfigError("gap sweep needs at least two gap values");
    }
    std::vector<GapSweepRow> rows;
    rows.reserve(gaps.size());
    for (double g : gaps) {
        opts.mip_gap = g;
        const SolveResult r = solve(model, opts);
        rows.push_back({g, r.status, r.objective, r.best_bound, r.wall_time_s});
    }
    return rows;
}

}  // namespace sparsched
