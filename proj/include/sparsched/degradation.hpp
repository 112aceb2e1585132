#pragma once

// Battery cycle-degradation ground truth, dataset sampling, and feature
// normalization. The closed-form model below stands in for an electrochemical
// simulator: per-cycle capacity fade grows superlinearly with depth of
// discharge, accelerates with temperature and C-rate stress, and worsens as
// the cell ages or sits away from mid state of charge.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsched/common.hpp"

namespace sparsched {

constexpr int kNumFeatures = 5;

inline const std::array<std::string, kNumFeatures>& feature_names() {
    static const std::array<std::string, kNumFeatures> names = {
        "soc_start", "dod", "temp_c", "c_rate", "soh"};
    return names;
}

// One equivalent cycle, described at its start.
struct CycleFeatures {
    double soc_start = 0.0;  // state of charge at cycle start, fraction
    double dod = 0.0;        // depth of discharge over the cycle, fraction
    double temp_c = 25.0;    // ambient temperature, Celsius
    double c_rate = 0.0;     // discharge rate relative to rated capacity
    double soh = 1.0;        // state of health entering the cycle, fraction

    double operator[](int i) const {
        switch (i) {
            case 0: return soc_start;
            case 1: return dod;
            case 2: return temp_c;
            case 3: return c_rate;
            case 4: return soh;
        }
        throw StructuralError("feature index out of range: " + std::to_string(i));
    }

    void validate() const {
        auto finite = [](double v) { return std::isfinite(v); };
        if (!finite(soc_start) || !finite(dod) || !finite(temp_c) ||
            !finite(c_rate) || !finite(soh)) {
            throw InputDomainError("cycle features must be finite");
        }
        if (soc_start < 0.0 || soc_start > 1.0) {
            throw InputDomainError("soc_start must lie in [0,1], got " +
                                   fmt_full(soc_start));
        }
        if (dod <= 0.0 || dod > 1.0) {
            throw InputDomainError("dod must lie in (0,1], got " + fmt_full(dod));
        }
        if (c_rate <= 0.0) {
            throw InputDomainError("c_rate must be positive, got " +
                                   fmt_full(c_rate));
        }
        if (soh <= 0.0 || soh > 1.0) {
            throw InputDomainError("soh must lie in (0,1], got " + fmt_full(soh));
        }
        if (soc_start - dod < -1e-12) {
            throw InputDomainError(
                "cycle would drain below empty: soc_start " + fmt_full(soc_start) +
                " < dod " + fmt_full(dod));
        }
    }
};

// Ground-truth per-cycle SOH loss. Deterministic and exact; the network is
// trained to approximate this and every test oracle recomputes it directly.
inline double cycle_degradation(const CycleFeatures& f) {
    f.validate();
    constexpr double kBase = 2.5e-5;      // fade per full cycle at reference
    constexpr double kDodExp = 1.6;       // depth stress exponent
    constexpr double kTempSens = 0.06;    // per-degree Arrhenius-like slope
    constexpr double kRateSens = 0.3;     // penalty per unit C above 1C
    constexpr double kAgeSens = 1.0;      // fade acceleration as SOH drops
    constexpr double kSocSens = 2.0;      // penalty away from 50% mid-SOC
    const double soc_mid = f.soc_start - 0.5 * f.dod;
    const double dev = soc_mid - 0.5;
    return kBase * std::pow(f.dod, kDodExp) *
           std::exp(kTempSens * (f.temp_c - 25.0)) *
           (1.0 + kRateSens * std::max(0.0, f.c_rate - 1.0)) *
           (1.0 + kAgeSens * (1.0 - f.soh)) * (1.0 + kSocSens * dev * dev);
}

struct DegradationSample {
    CycleFeatures features;
    double delta_soh = 0.0;
};

struct FeatureRange {
    double lo = 0.0;
    double hi = 1.0;
    double width() const { return hi - lo; }
};

// Affine [lo,hi] <-> [0,1] maps for the five features and the target. Feature
// ranges come from the sampling plan (closed box), the target range from the
// realized dataset extremes.
struct Normalization {
    std::array<FeatureRange, kNumFeatures> feature{};
    FeatureRange target{};

    void validate() const {
        for (int i = 0; i < kNumFeatures; ++i) {
            if (!(feature[i].width() > 0.0) || !std::isfinite(feature[i].lo) ||
                !std::isfinite(feature[i].hi)) {
                throw ConfigError("degenerate normalization range for " +
                                  feature_names()[i]);
            }
        }
        if (!(target.width() > 0.0)) {
            throw ConfigError("degenerate normalization range for target");
        }
    }

    double normalize_one(int i, double v) const {
        if (v < feature[i].lo || v > feature[i].hi) {
            throw RangeError(feature_names()[i],
                             feature_names()[i] + " value " + fmt_full(v) +
                                 " outside normalization range [" +
                                 fmt_full(feature[i].lo) + ", " +
                                 fmt_full(feature[i].hi) + "]");
        }
        return (v - feature[i].lo) / feature[i].width();
    }

    std::array<double, kNumFeatures> normalize(const CycleFeatures& f) const {
        std::array<double, kNumFeatures> z{};
        for (int i = 0; i < kNumFeatures; ++i) z[i] = normalize_one(i, f[i]);
        return z;
    }

    CycleFeatures denormalize(const std::array<double, kNumFeatures>& z) const {
        CycleFeatures f;
        f.soc_start = feature[0].lo + z[0] * feature[0].width();
        f.dod = feature[1].lo + z[1] * feature[1].width();
        f.temp_c = feature[2].lo + z[2] * feature[2].width();
        f.c_rate = feature[3].lo + z[3] * feature[3].width();
        f.soh = feature[4].lo + z[4] * feature[4].width();
        return f;
    }

    double normalize_target(double v) const {
        if (v < target.lo || v > target.hi) {
            throw RangeError("delta_soh", "target value " + fmt_full(v) +
                                              " outside normalization range [" +
                                              fmt_full(target.lo) + ", " +
                                              fmt_full(target.hi) + "]");
        }
        return (v - target.lo) / target.width();
    }

    double denormalize_target(double z) const {
        return target.lo + z * target.width();
    }
};

// Uniform sampling box for dataset generation. Feature normalization is taken
// from this box (its closure), not from realized extremes, so that boundary
// operating points — an idle interval has dod -> 0 and c_rate -> 0 — stay
// inside the normalized domain downstream.
struct SamplingPlan {
    std::size_t samples = 5000;
    double test_fraction = 0.2;
    FeatureRange soc_start{0.0, 1.0};
    FeatureRange dod{0.0, 1.0};    // sampled on (lo, hi]
    FeatureRange temp_c{0.0, 45.0};
    FeatureRange c_rate{0.0, 2.0};  // sampled on (lo, hi]
    FeatureRange soh{0.8, 1.0};

    void validate() const {
        if (samples < 1000) {
            throw ConfigError("sampling plan needs at least 1000 samples, got " +
                              std::to_string(samples));
        }
        if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
            throw ConfigError("test_fraction must lie in (0,1), got " +
                              fmt_full(test_fraction));
        }
        auto check = [](const FeatureRange& r, const std::string& name) {
            if (!(r.width() > 0.0) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
                throw ConfigError("degenerate sampling range for " + name);
            }
        };
        check(soc_start, "soc_start");
        check(dod, "dod");
        check(temp_c, "temp_c");
        check(c_rate, "c_rate");
        check(soh, "soh");
        if (soc_start.lo < 0.0 || soc_start.hi > 1.0) {
            throw ConfigError("soc_start range must lie within [0,1]");
        }
        if (dod.lo < 0.0 || dod.hi > 1.0) {
            throw ConfigError("dod range must lie within [0,1]");
        }
        if (c_rate.lo < 0.0) {
            throw ConfigError("c_rate range must be nonnegative");
        }
        if (soh.lo <= 0.0 || soh.hi > 1.0) {
            throw ConfigError("soh range must lie within (0,1]");
        }
        // Feasibility of the non-draining constraint soc_start >= dod.
        if (soc_start.hi < dod.lo) {
            throw ConfigError(
                "sampling box is infeasible: every draw would drain below empty "
                "(soc_start hi " +
                fmt_full(soc_start.hi) + " < dod lo " + fmt_full(dod.lo) + ")");
        }
    }

    Normalization normalization() const {
        Normalization n;
        n.feature[0] = soc_start;
        n.feature[1] = dod;
        n.feature[2] = temp_c;
        n.feature[3] = c_rate;
        n.feature[4] = soh;
        return n;  // target filled by the generator
    }
};

struct Dataset {
    std::vector<DegradationSample> samples;
    Normalization norm;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    std::uint64_t seed = 0;
    double test_fraction = 0.2;

    void validate() const {
        if (samples.empty()) throw StructuralError("dataset has no samples");
        norm.validate();
        std::vector<char> seen(samples.size(), 0);
        for (auto i : train_idx) {
            if (i >= samples.size() || seen[i]++) {
                throw StructuralError("train/test split is not a partition");
            }
        }
        for (auto i : test_idx) {
            if (i >= samples.size() || seen[i]++) {
                throw StructuralError("train/test split is not a partition");
            }
        }
        for (char c : seen) {
            if (!c) throw StructuralError("train/test split is not a partition");
        }
    }
};

// Deterministic generation: for each sample draw (soc_start, dod) pairs until
// the cycle does not drain below empty, then temp, c_rate, soh, in that fixed
// order; afterwards shuffle indices once for the test split. Same plan + seed
// always yields byte-identical files.
inline Dataset generate_dataset(const SamplingPlan& plan, std::uint64_t seed) {
    plan.validate();
    Rng rng(seed);
    Dataset ds;
    ds.seed = seed;
    ds.test_fraction = plan.test_fraction;
    ds.norm = plan.normalization();
    ds.samples.reserve(plan.samples);

    double t_lo = kInf, t_hi = -kInf;
    for (std::size_t k = 0; k < plan.samples; ++k) {
        CycleFeatures f;
        int guard = 0;
        for (;;) {
            f.soc_start = rng.uniform(plan.soc_start.lo, plan.soc_start.hi);
            f.dod = rng.uniform_open_lo(plan.dod.lo, plan.dod.hi);
            if (f.soc_start - f.dod >= 0.0) break;
            if (++guard > 1000000) {
                throw ConfigError(
                    "rejection sampling failed: feasible region of the sampling "
                    "box is vanishingly small");
            }
        }
        f.temp_c = rng.uniform(plan.temp_c.lo, plan.temp_c.hi);
        f.c_rate = rng.uniform_open_lo(plan.c_rate.lo, plan.c_rate.hi);
        f.soh = rng.uniform(plan.soh.lo, plan.soh.hi);
        const double y = cycle_degradation(f);
        t_lo = std::min(t_lo, y);
        t_hi = std::max(t_hi, y);
        ds.samples.push_back({f, y});
    }
    ds.norm.target = {t_lo, t_hi};
    ds.norm.validate();

    std::vector<std::size_t> order(plan.samples);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    const auto n_test = static_cast<std::size_t>(
        std::floor(plan.test_fraction * static_cast<double>(plan.samples)));
    ds.test_idx.assign(order.begin(), order.begin() + n_test);
    ds.train_idx.assign(order.begin() + n_test, order.end());
    std::sort(ds.test_idx.begin(), ds.test_idx.end());
    std::sort(ds.train_idx.begin(), ds.train_idx.end());
    ds.validate();
    return ds;
}

inline const char* kDatasetHeader = "soc_start,dod,temp_c,c_rate,soh,delta_soh";

inline std::string dataset_csv(const Dataset& ds) {
    std::string out = kDatasetHeader;
    out += '\n';
    for (const auto& s : ds.samples) {
        out += fmt_full(s.features.soc_start);
        out += ',';
        out += fmt_full(s.features.dod);
        out += ',';
        out += fmt_full(s.features.temp_c);
        out += ',';
        out += fmt_full(s.features.c_rate);
        out += ',';
        out += fmt_full(s.features.soh);
        out += ',';
        out += fmt_full(s.delta_soh);
        out += '\n';
    }
    return out;
}

inline nlohmann::json normalization_json(const Normalization& n) {
    nlohmann::json j;
    for (int i = 0; i < kNumFeatures; ++i) {
        j["features"][feature_names()[i]] = {n.feature[i].lo, n.feature[i].hi};
    }
    j["target"] = {n.target.lo, n.target.hi};
    return j;
}

inline Normalization normalization_from_json(const nlohmann::json& j) {
    Normalization n;
    try {
        for (int i = 0; i < kNumFeatures; ++i) {
            const auto& r = j.at("features").at(feature_names()[i]);
            n.feature[i] = {r.at(0).get<double>(), r.at(1).get<double>()};
        }
        n.target = {j.at("target").at(0).get<double>(),
                    j.at("target").at(1).get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad normalization json: ") + e.what());
    }
    n.validate();
    return n;
}

// Writes <csv_path> plus a json sidecar holding seed, split, and ranges.
inline void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path,
                         const std::filesystem::path& sidecar_path) {
    ds.validate();
    {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f) throw Error("cannot write " + csv_path.string());
        f << dataset_csv(ds);
    }
    nlohmann::json j = normalization_json(ds.norm);
    j["seed"] = ds.seed;
    j["test_fraction"] = ds.test_fraction;
    j["test_indices"] = ds.test_idx;
    std::ofstream f(sidecar_path, std::ios::binary);
    if (!f) throw Error("cannot write " + sidecar_path.string());
    f << j.dump(2) << '\n';
}

inline Dataset load_dataset(const std::filesystem::path& csv_path,
                            const std::filesystem::path& sidecar_path) {
    std::ifstream f(csv_path, std::ios::binary);
    if (!f) throw Error("cannot read " + csv_path.string());
    Dataset ds;
    std::string line;
    long lineno = 0;
    if (!std::getline(f, line)) throw ParseError("empty dataset file", 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kDatasetHeader) {
        throw ParseError("bad dataset header, expected '" +
                             std::string(kDatasetHeader) + "'",
                         lineno);
    }
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<double, 6> v{};
        std::size_t pos = 0;
        for (int i = 0; i < 6; ++i) {
            const auto comma = line.find(',', pos);
            const bool last = (i == 5);
            if (last != (comma == std::string::npos)) {
                throw ParseError("expected 6 comma-separated fields", lineno);
            }
            const std::string tok =
                line.substr(pos, last ? std::string::npos : comma - pos);
            try {
                std::size_t used = 0;
                v[i] = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ParseError("bad numeric field '" + tok + "'", lineno);
            }
            pos = last ? pos : comma + 1;
        }
        DegradationSample s;
        s.features = {v[0], v[1], v[2], v[3], v[4]};
        s.features.validate();
        s.delta_soh = v[5];
        ds.samples.push_back(s);
    }

    std::ifstream sf(sidecar_path, std::ios::binary);
    if (!sf) throw Error("cannot read " + sidecar_path.string());
    nlohmann::json j;
    try {
        sf >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad dataset sidecar: ") + e.what());
    }
    ds.norm = normalization_from_json(j);
    try {
        ds.seed = j.at("seed").get<std::uint64_t>();
        ds.test_fraction = j.at("test_fraction").get<double>();
        ds.test_idx = j.at("test_indices").get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad dataset sidecar: ") + e.what());
    }
    std::vector<char> is_test(ds.samples.size(), 0);
    for (auto i : ds.test_idx) {
        if (i >= ds.samples.size()) {
            throw ParseError("test index out of range: " + std::to_string(i));
        }
        is_test[i] = 1;
    }
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        if (!is_test[i]) ds.train_idx.push_back(i);
    }
    ds.validate();
    return ds;
}

}  // namespace sparsched
