#pragma once

// Shared error types, deterministic RNG, and small utilities used across the
// library. Everything in this project is header-only; link no extra libs.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sparsched {

constexpr int kHorizon = 24;  // hourly day-ahead intervals
constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller violated the mathematical domain of an operation (bad feature
// vector, out-of-range argument).
class InputDomainError : public Error {
public:
    using Error::Error;
};

// Bad user-facing configuration: degenerate ranges, impossible sparsity, too
// few samples, malformed options.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A feature fell outside its normalization range; carries the feature name.
class RangeError : public Error {
public:
    RangeError(const std::string& feature, const std::string& msg)
        : Error(msg), feature_(feature) {}
    const std::string& feature() const { return feature_; }

private:
    std::string feature_;
};

// Shape/dimension mismatch or broken internal structure.
class StructuralError : public Error {
public:
    using Error::Error;
};

// Text inputs that failed to parse; carries a 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line = -1)
        : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class EmissionError : public Error {
public:
    using Error::Error;
};

class EncodingError : public Error {
public:
    using Error::Error;
};

class CaseError : public Error {
public:
    using Error::Error;
};

class CouplingError : public Error {
public:
    using Error::Error;
};

class ExtractionError : public Error {
public:
    using Error::Error;
};

// Training produced a non-finite loss; carries the epoch.
class DivergenceError : public Error {
public:
    DivergenceError(int epoch, const std::string& msg)
        : Error(msg + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}
    int epoch() const { return epoch_; }

private:
    int epoch_;
};

// The configured solver executable is missing or not runnable.
class EnvironmentError : public Error {
public:
    using Error::Error;
};

// The solver ran but produced output we could not interpret.
class AdapterError : public Error {
public:
    using Error::Error;
};

// A fixed-binary LP re-solve contradicted the MILP solution.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Deterministic RNG
//
// mt19937_64 with explicit bit-to-double mapping. The standard distributions
// are implementation-defined, so datasets and training runs built on them
// would not be reproducible across standard libraries; these mappings are.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1): never returns an endpoint.
    double uniform01_open() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform on (lo, hi]: used where the domain excludes the lower endpoint.
    double uniform_open_lo(double lo, double hi) {
        return hi - (hi - lo) * uniform01();
    }

    // Uniform integer in [0, n).
    std::size_t below(std::size_t n) {
        // Rejection-free modulo is fine here: n is tiny against 2^64 and the
        // bias (~n/2^64) is far below anything observable.
        return static_cast<std::size_t>(gen_() % n);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Formatting

// Shortest decimal text that round-trips the exact double (17 significant
// digits always round-trip; try fewer first so files stay readable).
inline std::string fmt_full(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    for (int prec = 15; prec <= 17; ++prec) {
        std::ostringstream os;
        os.precision(prec);
        os << v;
        double back = 0.0;
        std::istringstream is(os.str());
        is >> back;
        if (back == v) return os.str();
    }
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline std::string fmt_fixed(double v, int prec) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(prec);
    os << v;
    return os.str();
}

inline bool nearly_equal(double a, double b, double tol) {
    return std::abs(a - b) <= tol;
}

}  // namespace sparsched
