// MILP embedding of the network: interval propagation is checked against
// Monte-Carlo sampling and hand-computed values, and the Big-M encoding is
// checked for exactness by solving the embedded model and comparing with the
// plain forward pass.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "sparsched/net.hpp"
#include "sparsched/relu_encode.hpp"
#include "sparsched/solver.hpp"
#include "test_util.hpp"

using namespace sparsched;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Normalization unit_norm() {
    Normalization n;
    for (auto& r : n.feature) r = {0.0, 1.0};
    n.target = {0.0, 1.0};
    return n;
}

SparseNet random_net(std::uint64_t seed, double sparsity = 0.0) {
    SparseNet net;
    net.norm = unit_norm();
    Rng rng(seed);
    detail::init_dense(net, rng);
    net.sparsity = sparsity;
    const MaskPair m = prune_mask(net, sparsity);
    net.mask1 = m.mask1;
    net.mask2 = m.mask2;
    net.apply_masks();
    return net;
}

// Same two-neuron pencil-and-paper fixture as the forward-pass tests.
SparseNet hand_net() {
    SparseNet net;
    net.norm = unit_norm();
    net.mask1.fill(0);
    net.mask2.fill(0);
    net.mask1[0] = 1;
    net.mask2[0] = 1;
    net.sparsity = 28.0 / 30.0;
    net.w1[0] = 0.5;
    net.w1[1] = -0.25;
    net.w1[3] = 0.1;
    net.b1[0] = 0.05;
    net.w2[0] = 2.0;
    net.b2[0] = -0.1;
    net.w3[0] = 1.5;
    net.b3 = 0.2;
    return net;
}

InputBox full_box() {
    InputBox box;
    for (auto& b : box) b = {0.0, 1.0};
    return box;
}

// Build a model holding the five inputs (fixed or boxed) plus the embedded
// network minimizing sign * output.
struct Embedded {
    MilpModel model{"embed"};
    std::array<int, kNumFeatures> in{};
    EncodeResult enc;
};

Embedded embed(const SparseNet& net, const InputBox& box, double sign,
               const EncodeOptions& opts) {
    Embedded e;
    for (int i = 0; i < kNumFeatures; ++i) {
        e.in[i] = e.model.add_continuous("in" + std::to_string(i), box[i].lb,
                                         box[i].ub);
    }
    e.enc = encode_network(e.model, net, e.in, "nn", opts);
    LinExpr obj;
    obj.add(e.enc.out_var, sign);
    e.model.add_objective(obj);
    return e;
}

InputBox point_box(const std::array<double, kNumFeatures>& z) {
    InputBox box;
    for (int i = 0; i < kNumFeatures; ++i) box[i] = {z[i], z[i]};
    return box;
}

}  // namespace

TEST_CASE("interval propagation matches the hand-computed fixture") {
    const SparseNet net = hand_net();
    const BoundBox b = propagate_bounds(net, full_box());
    // Layer 1 neuron 0: 0.05 + 0.5 z0 - 0.25 z1 + 0.1 z3 over [0,1]^5.
    CHECK_THAT(b.hidden1[0].lb, WithinAbs(-0.2, 1e-15));
    CHECK_THAT(b.hidden1[0].ub, WithinAbs(0.65, 1e-15));
    // Layer 2 neuron 0: -0.1 + 2 * relu over [0, 0.65].
    CHECK_THAT(b.hidden2[0].lb, WithinAbs(-0.1, 1e-15));
    CHECK_THAT(b.hidden2[0].ub, WithinAbs(1.2, 1e-15));
    // Output: 0.2 + 1.5 * relu over [0, 1.2].
    CHECK_THAT(b.output.lb, WithinAbs(0.2, 1e-15));
    CHECK_THAT(b.output.ub, WithinAbs(2.0, 1e-15));
    // Masked neurons carry the empty interval.
    CHECK(b.hidden1[5].lb == 0.0);
    CHECK(b.hidden1[5].ub == 0.0);
}

TEST_CASE("propagated intervals contain every sampled activation") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (const double eps : {0.0, 0.3, 0.5}) {
        const SparseNet net = random_net(101 + int(eps * 10), eps);
        InputBox box;
        // A non-trivial sub-box keeps the intervals asymmetric.
        for (auto& b : box) {
            const double lo = 0.3 * uni(rng);
            b = {lo, lo + 0.4 + 0.3 * uni(rng)};
        }
        const BoundBox bb = propagate_bounds(net, box);
        for (int s = 0; s < 200; ++s) {
            std::array<double, kNumFeatures> z{};
            for (int i = 0; i < kNumFeatures; ++i) {
                z[i] = box[i].lb + (box[i].ub - box[i].lb) * uni(rng);
            }
            const ForwardTrace t = forward_z(net, z);
            for (int j = 0; j < kHidden1; ++j) {
                if (!net.mask1[j]) continue;
                CHECK(t.pre1[j] >= bb.hidden1[j].lb - 1e-9);
                CHECK(t.pre1[j] <= bb.hidden1[j].ub + 1e-9);
            }
            for (int k = 0; k < kHidden2; ++k) {
                if (!net.mask2[k]) continue;
                CHECK(t.pre2[k] >= bb.hidden2[k].lb - 1e-9);
                CHECK(t.pre2[k] <= bb.hidden2[k].ub + 1e-9);
            }
            CHECK(t.z_out >= bb.output.lb - 1e-9);
            CHECK(t.z_out <= bb.output.ub + 1e-9);
        }
    }
}

TEST_CASE("layer-1 intervals are tight at their vertex inputs") {
    const SparseNet net = random_net(55);
    const InputBox box = full_box();
    const BoundBox bb = propagate_bounds(net, box);
    for (int j = 0; j < kHidden1; ++j) {
        std::array<double, kNumFeatures> at_lb{}, at_ub{};
        for (int i = 0; i < kNumFeatures; ++i) {
            const double w = net.w1[j * kNumFeatures + i];
            at_lb[i] = w >= 0.0 ? box[i].lb : box[i].ub;
            at_ub[i] = w >= 0.0 ? box[i].ub : box[i].lb;
        }
        CHECK_THAT(forward_z(net, at_lb).pre1[j], WithinAbs(bb.hidden1[j].lb, 1e-12));
        CHECK_THAT(forward_z(net, at_ub).pre1[j], WithinAbs(bb.hidden1[j].ub, 1e-12));
    }
}

TEST_CASE("point boxes reproduce the forward trace") {
    const SparseNet net = random_net(77, 0.3);
    const std::array<double, kNumFeatures> z = {0.15, 0.85, 0.3, 0.6, 0.95};
    const BoundBox bb = propagate_bounds(net, point_box(z));
    const ForwardTrace t = forward_z(net, z);
    for (int j = 0; j < kHidden1; ++j) {
        if (!net.mask1[j]) continue;
        CHECK_THAT(bb.hidden1[j].lb, WithinRel(t.pre1[j], 1e-12));
        CHECK_THAT(bb.hidden1[j].ub, WithinRel(t.pre1[j], 1e-12));
    }
    CHECK_THAT(bb.output.lb, WithinRel(t.z_out, 1e-12));
}

TEST_CASE("hand fixture encodes with the expected structure and M values") {
    const SparseNet net = hand_net();
    MilpModel m("hand");
    std::array<int, kNumFeatures> in{};
    for (int i = 0; i < kNumFeatures; ++i) {
        in[i] = m.add_continuous("in" + std::to_string(i), 0.0, 1.0);
    }
    const EncodeResult r = encode_network(m, net, in, "nn", {false});
    CHECK(r.binaries == 2);
    CHECK(r.dead == 0);
    CHECK(r.always_on == 0);
    CHECK(m.num_binaries() == 2);
    CHECK(r.neurons.size() == std::size_t(kHiddenTotal));

    const NeuronEncoding& n1 = r.neurons[0];
    CHECK(n1.layer == 1);
    CHECK_THAT(n1.m_minus, WithinAbs(0.2, 1e-15));
    CHECK_THAT(n1.m_plus, WithinAbs(0.65, 1e-15));
    CHECK(m.var(n1.a_var).name == "nn_l1_n0_a");
    CHECK(m.var(n1.a_var).ub == n1.m_plus);
    CHECK(m.var(n1.delta_var).name == "nn_l1_n0_d");
    CHECK(m.var(n1.delta_var).kind == VarKind::Binary);

    // Masked neurons appear as placeholders without variables.
    CHECK(r.neurons[1].a_var == -1);
    CHECK(r.neurons[1].delta_var == -1);

    const NeuronEncoding& n2 = r.neurons[kHidden1];
    CHECK(n2.layer == 2);
    CHECK_THAT(n2.m_minus, WithinAbs(0.1, 1e-15));
    CHECK_THAT(n2.m_plus, WithinAbs(1.2, 1e-15));

    // Gadget rows exist; the bias is folded into each right-hand side.
    const Constraint& lo = m.con(m.con_index("nn_l1_n0_lo"));
    CHECK(lo.sense == Sense::GE);
    CHECK_THAT(lo.rhs, WithinAbs(0.05, 1e-15));
    const Constraint& up = m.con(m.con_index("nn_l1_n0_up"));
    CHECK(up.sense == Sense::LE);
    CHECK_THAT(up.rhs, WithinAbs(0.25, 1e-15));  // M- plus folded bias
    CHECK(up.terms.at(n1.delta_var) == n1.m_minus);
    const Constraint& cap = m.con(m.con_index("nn_l1_n0_cap"));
    CHECK(cap.terms.at(n1.delta_var) == -n1.m_plus);
    CHECK(cap.rhs == 0.0);

    const Variable& out = m.var(r.out_var);
    CHECK(out.name == "nn_out");
    CHECK_THAT(out.lb, WithinAbs(0.2, 1e-15));
    CHECK_THAT(out.ub, WithinAbs(2.0, 1e-15));
    CHECK(m.con_index("nn_out_eq") >= 0);
}

TEST_CASE("binary count follows the active-neuron law in full mode") {
    for (const double eps : {0.2, 0.3, 0.4, 0.5, 0.7}) {
        const SparseNet net = random_net(31, eps);
        Embedded full = embed(net, full_box(), 1.0, {false});
        CHECK(full.enc.binaries == net.active_neurons());
        CHECK(full.model.num_binaries() == net.active_neurons());
        // Elimination only ever removes binaries, one per stable neuron.
        Embedded slim = embed(net, full_box(), 1.0, {true});
        CHECK(slim.enc.binaries ==
              net.active_neurons() - slim.enc.dead - slim.enc.always_on);
        CHECK(slim.enc.binaries <= full.enc.binaries);
        CHECK(slim.enc.dead == full.enc.dead);
        CHECK(slim.enc.always_on == full.enc.always_on);
    }
}

TEST_CASE("solved embeddings reproduce the forward pass at fixed inputs") {
    testutil::ensure_solver_env();
    SolverOptions sopts;
    sopts.mip_gap = 0.0;
    const std::array<double, kNumFeatures> inputs[] = {
        {0.15, 0.85, 0.3, 0.6, 0.95},
        {0.5, 0.5, 0.5, 0.5, 0.5},
        {1.0, 0.0, 1.0, 0.0, 1.0},
    };
    int checked = 0;
    for (const double eps : {0.0, 0.3, 0.5, 0.7}) {
        const SparseNet net = random_net(900 + int(eps * 10), eps);
        const auto& z = inputs[checked % 3];
        for (const bool eliminate : {false, true}) {
            Embedded e = embed(net, point_box(z), 1.0, {eliminate});
            if (eliminate) {
                // Point intervals pin every neuron, so no binaries remain.
                CHECK(e.enc.binaries == 0);
            }
            const SolveResult r = solve(e.model, sopts);
            REQUIRE(r.status == SolveStatus::Optimal);
            const double want = forward_z(net, z).z_out;
            CHECK_THAT(r.value("nn_out"), WithinAbs(want, 1e-6));
        }
        ++checked;
    }
    // The hand fixture, for which the expected value is known on paper.
    Embedded e = embed(hand_net(), point_box({0.2, 0.4, 0.6, 0.8, 1.0}), 1.0,
                       {false});
    const SolveResult r = solve(e.model, sopts);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK_THAT(r.value("nn_out"), WithinAbs(0.44, 1e-9));
}

TEST_CASE("box optimization lands on genuine network outputs") {
    testutil::ensure_solver_env();
    SolverOptions sopts;
    sopts.mip_gap = 0.0;
    const SparseNet net = random_net(21, 0.3);
    const InputBox box = full_box();
    const BoundBox bb = propagate_bounds(net, box);

    // Monte-Carlo envelope of reachable outputs.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double mc_min = 1e300, mc_max = -1e300;
    for (int s = 0; s < 500; ++s) {
        std::array<double, kNumFeatures> z{};
        for (auto& v : z) v = uni(rng);
        const double y = forward_z(net, z).z_out;
        mc_min = std::min(mc_min, y);
        mc_max = std::max(mc_max, y);
    }

    for (const double sign : {1.0, -1.0}) {
        Embedded e = embed(net, box, sign, {true});
        const SolveResult r = solve(e.model, sopts);
        REQUIRE(r.status == SolveStatus::Optimal);
        const double out = r.value("nn_out");
        // The optimum must beat every sample and stay inside the interval.
        if (sign > 0) {
            CHECK(out <= mc_min + 1e-9);
            CHECK(out >= bb.output.lb - 1e-6);
        } else {
            CHECK(out >= mc_max - 1e-9);
            CHECK(out <= bb.output.ub + 1e-6);
        }
        // And the incumbent's inputs must actually produce that output.
        std::array<double, kNumFeatures> z{};
        for (int i = 0; i < kNumFeatures; ++i) {
            z[i] = std::clamp(r.value("in" + std::to_string(i)), 0.0, 1.0);
        }
        CHECK_THAT(forward_z(net, z).z_out, WithinAbs(out, 1e-6));
    }
}

TEST_CASE("stable neurons are eliminated exactly") {
    // Three live layer-1 neurons engineered dead / always-on / straddling,
    // feeding one always-on layer-2 neuron.
    SparseNet net;
    net.norm = unit_norm();
    net.mask1.fill(0);
    net.mask2.fill(0);
    net.mask1[0] = net.mask1[1] = net.mask1[2] = 1;
    net.mask2[0] = 1;
    net.sparsity = 26.0 / 30.0;
    net.w1[0 * kNumFeatures + 0] = 0.3;
    net.b1[0] = -5.0;  // [-5, -4.7] dead
    net.w1[1 * kNumFeatures + 0] = 0.2;
    net.w1[1 * kNumFeatures + 1] = 0.1;
    net.b1[1] = 3.0;  // [3, 3.3] always on
    net.w1[2 * kNumFeatures + 0] = 1.0;
    net.w1[2 * kNumFeatures + 1] = -1.0;
    net.b1[2] = 0.0;  // [-1, 1] straddles
    net.w2[0 * kHidden1 + 0] = 0.5;
    net.w2[0 * kHidden1 + 1] = 1.0;
    net.w2[0 * kHidden1 + 2] = 0.8;
    net.b2[0] = -0.5;  // [2.5, 3.6] always on
    net.w3[0] = 2.0;
    net.b3 = 0.1;
    net.check_invariants();

    const BoundBox bb = propagate_bounds(net, full_box());
    CHECK_THAT(bb.hidden1[0].ub, WithinAbs(-4.7, 1e-12));
    CHECK_THAT(bb.hidden2[0].lb, WithinAbs(2.5, 1e-12));
    CHECK_THAT(bb.hidden2[0].ub, WithinAbs(3.6, 1e-12));

    Embedded slim = embed(net, full_box(), 1.0, {true});
    CHECK(slim.enc.dead == 1);
    CHECK(slim.enc.always_on == 2);
    CHECK(slim.enc.binaries == 1);
    // Dead: variable pinned to zero, no gadget rows, no equation.
    const Variable& dead_a = slim.model.var(slim.model.var_index("nn_l1_n0_a"));
    CHECK(dead_a.lb == 0.0);
    CHECK(dead_a.ub == 0.0);
    CHECK_THROWS_AS(slim.model.con_index("nn_l1_n0_eq"), StructuralError);
    CHECK_THROWS_AS(slim.model.con_index("nn_l1_n0_lo"), StructuralError);
    // Always-on: a == x equation, interval bounds on a.
    CHECK(slim.model.con_index("nn_l1_n1_eq") >= 0);
    const Variable& on_a = slim.model.var(slim.model.var_index("nn_l1_n1_a"));
    CHECK_THAT(on_a.lb, WithinAbs(3.0, 1e-12));
    CHECK_THAT(on_a.ub, WithinAbs(3.3, 1e-12));
    // Straddling neuron keeps the full gadget.
    CHECK(slim.model.con_index("nn_l1_n2_cap") >= 0);

    Embedded full = embed(net, full_box(), 1.0, {false});
    CHECK(full.enc.binaries == 4);

    // Both encodings agree with the forward pass when solved at a point.
    testutil::ensure_solver_env();
    SolverOptions sopts;
    sopts.mip_gap = 0.0;
    const std::array<double, kNumFeatures> z = {0.7, 0.2, 0.9, 0.1, 0.5};
    const double want = forward_z(net, z).z_out;
    for (const bool eliminate : {true, false}) {
        Embedded e = embed(net, point_box(z), 1.0, {eliminate});
        const SolveResult r = solve(e.model, sopts);
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK_THAT(r.value("nn_out"), WithinAbs(want, 1e-8));
    }
}

TEST_CASE("bad input boxes and broken nets are rejected") {
    InputBox box = full_box();
    box[2] = {0.8, 0.2};  // inverted
    CHECK_THROWS_AS(check_input_box(box), InputDomainError);
    box[2] = {0.2, 1.5};  // above the unit box
    CHECK_THROWS_AS(check_input_box(box), InputDomainError);
    box[2] = {-0.3, 0.5};  // below
    CHECK_THROWS_AS(propagate_bounds(random_net(1), box), InputDomainError);

    const SparseNet net = random_net(2);
    MilpModel m("bad");
    std::array<int, kNumFeatures> in{};
    for (int i = 0; i < kNumFeatures; ++i) {
        in[i] = m.add_continuous("in" + std::to_string(i), 0.0, 1.0);
    }
    // Unbounded input variable.
    MilpModel m2("bad2");
    std::array<int, kNumFeatures> in2{};
    for (int i = 0; i < kNumFeatures; ++i) {
        in2[i] = m2.add_continuous("in" + std::to_string(i), 0.0,
                                   i == 3 ? kInf : 1.0);
    }
    CHECK_THROWS_AS(encode_network(m2, net, in2, "nn"), EncodingError);
    // In-range variable bounds outside the unit box.
    MilpModel m3("bad3");
    std::array<int, kNumFeatures> in3{};
    for (int i = 0; i < kNumFeatures; ++i) {
        in3[i] = m3.add_continuous("in" + std::to_string(i), i == 0 ? -0.5 : 0.0,
                                   1.0);
    }
    CHECK_THROWS_AS(encode_network(m3, net, in3, "nn"), EncodingError);
    // A net whose masked neurons still carry weights fails its invariants.
    SparseNet broken = random_net(3);
    broken.mask1[4] = 0;
    CHECK_THROWS_AS(encode_network(m, broken, in, "nn"), StructuralError);
}
