// Ground-truth degradation model, sampling, normalization, and dataset I/O.
// The reference values below were computed independently (exact closed-form
// evaluation in Python) and are frozen here; the implementation must agree.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "sparsched/degradation.hpp"
#include "test_util.hpp"

using namespace sparsched;

namespace {

CycleFeatures feat(double soc, double dod, double temp, double cr, double soh) {
    CycleFeatures f;
    f.soc_start = soc;
    f.dod = dod;
    f.temp_c = temp;
    f.c_rate = cr;
    f.soh = soh;
    return f;
}

}  // namespace

TEST_CASE("closed form matches independently computed values") {
    // Reference point: no temperature, rate, or age stress; mid-SOC 0.2.
    CHECK_THAT(cycle_degradation(feat(0.4, 0.4, 25.0, 0.4, 1.0)),
               Catch::Matchers::WithinRel(6.809543555882047e-06, 1e-12));
    // All stress factors active at once.
    CHECK_THAT(cycle_degradation(feat(0.9, 0.6, 35.0, 1.5, 0.85)),
               Catch::Matchers::WithinRel(2.713654487680211e-05, 1e-12));
    // Worst corner of the sampling box.
    CHECK_THAT(cycle_degradation(feat(1.0, 1.0, 45.0, 2.0, 0.8)),
               Catch::Matchers::WithinRel(1.2948455998672533e-04, 1e-12));
    // Vanishing depth of discharge.
    CHECK_THAT(cycle_degradation(feat(0.5, 1e-6, 25.0, 0.01, 1.0)),
               Catch::Matchers::WithinRel(6.279716078777083e-15, 1e-12));
}

TEST_CASE("degradation responds to each stress in the documented direction") {
    const double base = cycle_degradation(feat(0.6, 0.3, 25.0, 0.5, 1.0));
    CHECK(cycle_degradation(feat(0.6, 0.5, 25.0, 0.5, 1.0)) > base);   // deeper
    CHECK(cycle_degradation(feat(0.6, 0.3, 35.0, 0.5, 1.0)) > base);   // hotter
    CHECK(cycle_degradation(feat(0.6, 0.3, 15.0, 0.5, 1.0)) < base);   // cooler
    CHECK(cycle_degradation(feat(0.6, 0.3, 25.0, 1.5, 1.0)) > base);   // faster
    CHECK(cycle_degradation(feat(0.6, 0.3, 25.0, 0.9, 1.0)) ==
          base);  // sub-1C rates carry no rate penalty
    CHECK(cycle_degradation(feat(0.6, 0.3, 25.0, 0.5, 0.9)) > base);   // older
    // Mid-SOC for (0.65, 0.3) is exactly 0.5: the stress-free point.
    const double centered = cycle_degradation(feat(0.65, 0.3, 25.0, 0.5, 1.0));
    CHECK(centered < base);
    CHECK(cycle_degradation(feat(0.95, 0.3, 25.0, 0.5, 1.0)) > centered);
}

TEST_CASE("invalid cycle features are rejected") {
    CHECK_THROWS_AS(cycle_degradation(feat(0.5, 0.0, 25, 0.5, 1.0)),
                    InputDomainError);  // dod must be positive
    CHECK_THROWS_AS(cycle_degradation(feat(0.5, 1.1, 25, 0.5, 1.0)),
                    InputDomainError);
    CHECK_THROWS_AS(cycle_degradation(feat(0.5, 0.3, 25, 0.0, 1.0)),
                    InputDomainError);  // c_rate must be positive
    CHECK_THROWS_AS(cycle_degradation(feat(0.5, 0.3, 25, 0.5, 0.0)),
                    InputDomainError);
    CHECK_THROWS_AS(cycle_degradation(feat(0.2, 0.5, 25, 0.5, 1.0)),
                    InputDomainError);  // would drain below empty
    CHECK_THROWS_AS(cycle_degradation(feat(1.2, 0.3, 25, 0.5, 1.0)),
                    InputDomainError);
    CHECK_THROWS_AS(
        cycle_degradation(feat(0.5, std::nan(""), 25, 0.5, 1.0)),
        InputDomainError);
    CHECK_NOTHROW(cycle_degradation(feat(0.3, 0.3, 25, 0.5, 1.0)));  // exact edge
}

TEST_CASE("normalization is the documented affine map and inverts exactly") {
    SamplingPlan plan;
    Normalization n = plan.normalization();
    n.target = {0.0, 2.0e-4};
    CHECK(n.normalize_one(2, 22.5) == 0.5);  // midpoint of [0, 45]
    CHECK(n.normalize_one(4, 0.8) == 0.0);   // soh box is [0.8, 1]
    CHECK(n.normalize_one(4, 1.0) == 1.0);

    const CycleFeatures f = feat(0.37, 0.21, 31.5, 1.25, 0.91);
    const auto z = n.normalize(f);
    for (double zi : z) {
        CHECK(zi >= 0.0);
        CHECK(zi <= 1.0);
    }
    const CycleFeatures back = n.denormalize(z);
    for (int i = 0; i < kNumFeatures; ++i) {
        CHECK_THAT(back[i], Catch::Matchers::WithinAbs(f[i], 1e-12));
    }
    CHECK_THAT(n.denormalize_target(n.normalize_target(1.3e-5)),
               Catch::Matchers::WithinRel(1.3e-5, 1e-12));

    SECTION("out-of-range inputs throw and name the offending feature") {
        try {
            n.normalize_one(2, 60.0);
            FAIL("expected RangeError");
        } catch (const RangeError& e) {
            CHECK(std::string(e.what()).find("temp_c") != std::string::npos);
        }
        CHECK_THROWS_AS(n.normalize_one(0, -0.1), RangeError);
        CHECK_THROWS_AS(n.normalize_target(3.0e-4), RangeError);
    }
}

TEST_CASE("dataset generation is deterministic and in-domain") {
    SamplingPlan plan;
    plan.samples = 1000;
    const Dataset ds = generate_dataset(plan, 42);

    REQUIRE(ds.samples.size() == 1000);
    for (const auto& s : ds.samples) {
        CHECK_NOTHROW(s.features.validate());
        CHECK(s.features.soc_start >= s.features.dod);
        // Stored target is exactly the closed form of the stored features.
        CHECK(s.delta_soh == cycle_degradation(s.features));
    }

    SECTION("same seed reproduces byte-identical data") {
        const Dataset again = generate_dataset(plan, 42);
        CHECK(dataset_csv(again) == dataset_csv(ds));
    }
    SECTION("a different seed gives different data") {
        CHECK(dataset_csv(generate_dataset(plan, 43)) != dataset_csv(ds));
    }

    SECTION("train/test partition is exact and disjoint") {
        CHECK(ds.test_idx.size() == 200);
        CHECK(ds.train_idx.size() == 800);
        std::set<std::size_t> seen(ds.train_idx.begin(), ds.train_idx.end());
        seen.insert(ds.test_idx.begin(), ds.test_idx.end());
        CHECK(seen.size() == 1000);
        CHECK(*seen.rbegin() == 999);
    }

    SECTION("feature normalization covers the plan box, target the realized range") {
        for (int i = 0; i < kNumFeatures; ++i) {
            CHECK(ds.norm.feature[i].lo == plan.normalization().feature[i].lo);
            CHECK(ds.norm.feature[i].hi == plan.normalization().feature[i].hi);
        }
        double lo = kInf, hi = -kInf;
        for (const auto& s : ds.samples) {
            lo = std::min(lo, s.delta_soh);
            hi = std::max(hi, s.delta_soh);
        }
        CHECK(ds.norm.target.lo == lo);
        CHECK(ds.norm.target.hi == hi);
    }
}

TEST_CASE("sampling plans validate their box") {
    SamplingPlan plan;
    plan.samples = 999;
    CHECK_THROWS_AS(generate_dataset(plan, 1), ConfigError);
    plan.samples = 1000;
    plan.temp_c = {30.0, 20.0};  // inverted
    CHECK_THROWS_AS(generate_dataset(plan, 1), ConfigError);
    plan = SamplingPlan{};
    plan.samples = 1000;
    plan.soc_start = {0.0, 0.2};
    plan.dod = {0.5, 1.0};  // no feasible draw: soc_start can never cover dod
    CHECK_THROWS_AS(generate_dataset(plan, 1), ConfigError);
}

TEST_CASE("dataset round-trips through CSV and sidecar exactly") {
    testutil::TempDir tmp;
    SamplingPlan plan;
    plan.samples = 1000;
    const Dataset ds = generate_dataset(plan, 7);
    save_dataset(ds, tmp.file("d.csv"), tmp.file("d.json"));
    const Dataset back = load_dataset(tmp.file("d.csv"), tmp.file("d.json"));

    REQUIRE(back.samples.size() == ds.samples.size());
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        for (int k = 0; k < kNumFeatures; ++k) {
            CHECK(back.samples[i].features[k] == ds.samples[i].features[k]);
        }
        CHECK(back.samples[i].delta_soh == ds.samples[i].delta_soh);
    }
    CHECK(back.train_idx == ds.train_idx);
    CHECK(back.test_idx == ds.test_idx);
    CHECK(back.seed == ds.seed);
    CHECK(back.norm.target.lo == ds.norm.target.lo);
    CHECK(back.norm.target.hi == ds.norm.target.hi);

    SECTION("corrupted files are rejected with parse errors") {
        testutil::spit(tmp.file("bad.csv"), "not,a,header\n1,2,3\n");
        CHECK_THROWS_AS(load_dataset(tmp.file("bad.csv"), tmp.file("d.json")),
                        ParseError);
        testutil::spit(tmp.file("short.csv"),
                       std::string(kDatasetHeader) + "\n0.5,0.2,25,0.5,1\n");
        CHECK_THROWS_AS(load_dataset(tmp.file("short.csv"), tmp.file("d.json")),
                        ParseError);
    }
}
