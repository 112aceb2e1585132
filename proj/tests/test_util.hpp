#pragma once

// Shared helpers for the test suites.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testutil {

// Self-deleting scratch directory under the system temp root.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        const auto base = std::filesystem::temp_directory_path();
        path_ = base / ("sparsched-test-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const {
        return path_ / name;
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    f << content;
}

// ctest exports SPARSCHED_SOLVER; standalone binary runs fall back to the
// bundled shim whose path the build bakes in.
inline void ensure_solver_env() {
#ifdef SPARSCHED_SOLVER_SHIM
    if (std::getenv("SPARSCHED_SOLVER") == nullptr) {
        ::setenv("SPARSCHED_SOLVER", SPARSCHED_SOLVER_SHIM, 0);
    }
#endif
}

}  // namespace testutil
