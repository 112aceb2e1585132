#pragma once

// Exact MILP embedding of a SparseNet: interval bound propagation over the
// masked network, then per-neuron Big-M ReLU constraints with the tightest
// box-consistent M values. Neurons whose pre-activation interval does not
// straddle zero can be eliminated (dead -> a = 0, always-on -> a = x) at the
// cost of leaving the one-binary-per-active-neuron accounting; both modes are
// exact, and the full mode keeps the binary count at its nominal law.

#include <array>
#include <string>
#include <vector>

#include "sparsched/common.hpp"
#include "sparsched/milp.hpp"
#include "sparsched/net.hpp"

namespace sparsched {

struct NeuronBounds {
    double lb = 0.0;
    double ub = 0.0;
};

// Pre-activation intervals per neuron; masked neurons carry [0,0]. The output
// entry is the affine output's interval (no ReLU on it).
struct BoundBox {
    std::array<NeuronBounds, kHidden1> hidden1{};
    std::array<NeuronBounds, kHidden2> hidden2{};
    NeuronBounds output{};
};

using InputBox = std::array<NeuronBounds, kNumFeatures>;

inline void check_input_box(const InputBox& box) {
    for (int i = 0; i < kNumFeatures; ++i) {
        const auto& b = box[i];
        if (!(b.lb <= b.ub) || !(b.lb >= -1e-9) || !(b.ub <= 1.0 + 1e-9)) {
            throw InputDomainError(
                "input interval for " + feature_names()[i] + " must lie in [0,1]: [" +
                fmt_full(b.lb) + ", " + fmt_full(b.ub) + "]");
        }
    }
}

// Interval arithmetic through the network: a positive weight propagates the
// interval as-is, a negative weight swaps the endpoints. Hidden intervals
// feeding forward are clipped through the ReLU first.
inline BoundBox propagate_bounds(const SparseNet& net, const InputBox& box) {
    check_input_box(box);
    BoundBox out;
    std::array<NeuronBounds, kHidden1> post1{};
    for (int j = 0; j < kHidden1; ++j) {
        if (!net.mask1[j]) continue;
        double lb = net.b1[j], ub = net.b1[j];
        for (int i = 0; i < kNumFeatures; ++i) {
            const double w = net.w1[j * kNumFeatures + i];
            if (w >= 0.0) {
                lb += w * box[i].lb;
                ub += w * box[i].ub;
            } else {
                lb += w * box[i].ub;
                ub += w * box[i].lb;
            }
        }
        out.hidden1[j] = {lb, ub};
        post1[j] = {std::max(0.0, lb), std::max(0.0, ub)};
    }
    std::array<NeuronBounds, kHidden2> post2{};
    for (int k = 0; k < kHidden2; ++k) {
        if (!net.mask2[k]) continue;
        double lb = net.b2[k], ub = net.b2[k];
        for (int j = 0; j < kHidden1; ++j) {
            const double w = net.w2[k * kHidden1 + j];
            if (w >= 0.0) {
                lb += w * post1[j].lb;
                ub += w * post1[j].ub;
            } else {
                lb += w * post1[j].ub;
                ub += w * post1[j].lb;
            }
        }
        out.hidden2[k] = {lb, ub};
        post2[k] = {std::max(0.0, lb), std::max(0.0, ub)};
    }
    double lb = net.b3, ub = net.b3;
    for (int k = 0; k < kHidden2; ++k) {
        const double w = net.w3[k];
        if (w >= 0.0) {
            lb += w * post2[k].lb;
            ub += w * post2[k].ub;
        } else {
            lb += w * post2[k].ub;
            ub += w * post2[k].lb;
        }
    }
    out.output = {lb, ub};
    return out;
}

struct EncodeOptions {
    // When true, neurons provably inactive get a = 0 and provably active get
    // a = x, saving their binaries. When false every unmasked neuron carries
    // the full Big-M gadget and exactly one binary.
    bool eliminate_stable = true;
};

struct NeuronEncoding {
    int layer = 0;  // 1 or 2
    int index = 0;
    double lb = 0.0, ub = 0.0;      // pre-activation interval
    double m_minus = 0.0, m_plus = 0.0;
    int a_var = -1;    // -1 for masked neurons
    int delta_var = -1;  // -1 when no binary was needed
};

struct EncodeResult {
    int out_var = -1;
    std::vector<NeuronEncoding> neurons;
    int binaries = 0;
    int dead = 0;       // ub <= 0
    int always_on = 0;  // lb >= 0
};

namespace detail {

struct LayerCtx {
    MilpModel& model;
    const EncodeOptions& opts;
    const std::string& prefix;
    EncodeResult& result;
};

// Emit one neuron's encoding; x_expr is its pre-activation as a linear
// expression over already-created variables. Returns the a-variable index,
// or -1 when the activation is identically zero and needs no variable.
inline int encode_neuron(LayerCtx& ctx, int layer, int index,
                         const LinExpr& x_expr, const NeuronBounds& nb) {
    const std::string base =
        ctx.prefix + "_l" + std::to_string(layer) + "_n" + std::to_string(index);
    NeuronEncoding enc;
    enc.layer = layer;
    enc.index = index;
    enc.lb = nb.lb;
    enc.ub = nb.ub;
    enc.m_minus = std::max(0.0, -nb.lb);
    enc.m_plus = std::max(0.0, nb.ub);
    const bool dead = nb.ub <= 0.0;
    const bool always_on = nb.lb >= 0.0;
    if (dead) ++ctx.result.dead;
    if (always_on && !dead) ++ctx.result.always_on;
    if (ctx.opts.eliminate_stable && dead) {
        enc.a_var = ctx.model.add_continuous(base + "_a", 0.0, 0.0);
        ctx.result.neurons.push_back(enc);
        return enc.a_var;
    }
    if (ctx.opts.eliminate_stable && always_on) {
        enc.a_var =
            ctx.model.add_continuous(base + "_a", std::max(0.0, nb.lb), nb.ub);
        LinExpr eq;
        eq.add(enc.a_var, 1.0).add(x_expr, -1.0);
        ctx.model.add_constraint(base + "_eq", eq, Sense::EQ, 0.0);
        ctx.result.neurons.push_back(enc);
        return enc.a_var;
    }
    // Full Big-M gadget:  a >= x,  a <= x + M-(1-delta),  a <= M+ delta,
    // a in [0, max(0, ub)].
    enc.a_var = ctx.model.add_continuous(base + "_a", 0.0, enc.m_plus);
    enc.delta_var = ctx.model.add_binary(base + "_d");
    ++ctx.result.binaries;
    LinExpr lo;
    lo.add(enc.a_var, 1.0).add(x_expr, -1.0);
    ctx.model.add_constraint(base + "_lo", lo, Sense::GE, 0.0);
    LinExpr up;
    up.add(enc.a_var, 1.0).add(x_expr, -1.0).add(enc.delta_var, enc.m_minus);
    ctx.model.add_constraint(base + "_up", up, Sense::LE, enc.m_minus);
    LinExpr cap;
    cap.add(enc.a_var, 1.0).add(enc.delta_var, -enc.m_plus);
    ctx.model.add_constraint(base + "_cap", cap, Sense::LE, 0.0);
    ctx.result.neurons.push_back(enc);
    return enc.a_var;
}

}  // namespace detail

// Embed the network over five existing model variables holding the normalized
// features. The returned output variable carries the network output (still in
// normalized target space) with its propagated interval as variable bounds.
inline EncodeResult encode_network(MilpModel& model, const SparseNet& net,
                                   const std::array<int, kNumFeatures>& input_vars,
                                   const std::string& prefix,
                                   const EncodeOptions& opts = {}) {
    net.check_invariants();
    InputBox box;
    for (int i = 0; i < kNumFeatures; ++i) {
        const Variable& v = model.var(input_vars[i]);
        if (!std::isfinite(v.lb) || !std::isfinite(v.ub)) {
            throw EncodingError("input variable " + v.name +
                                " must have finite bounds");
        }
        box[i] = {v.lb, v.ub};
    }
    try {
        check_input_box(box);
    } catch (const InputDomainError& e) {
        throw EncodingError(std::string("input variable bounds: ") + e.what());
    }
    const BoundBox bounds = propagate_bounds(net, box);
    EncodeResult result;
    detail::LayerCtx ctx{model, opts, prefix, result};
    std::array<int, kHidden1> a1;
    a1.fill(-1);
    for (int j = 0; j < kHidden1; ++j) {
        if (!net.mask1[j]) {
            NeuronEncoding enc;
            enc.layer = 1;
            enc.index = j;
            result.neurons.push_back(enc);
            continue;
        }
        LinExpr x;
        for (int i = 0; i < kNumFeatures; ++i) {
            x.add(input_vars[i], net.w1[j * kNumFeatures + i]);
        }
        x.add_constant(net.b1[j]);
        a1[j] = detail::encode_neuron(ctx, 1, j, x, bounds.hidden1[j]);
    }
    std::array<int, kHidden2> a2;
    a2.fill(-1);
    for (int k = 0; k < kHidden2; ++k) {
        if (!net.mask2[k]) {
            NeuronEncoding enc;
            enc.layer = 2;
            enc.index = k;
            result.neurons.push_back(enc);
            continue;
        }
        LinExpr x;
        for (int j = 0; j < kHidden1; ++j) {
            if (a1[j] >= 0) x.add(a1[j], net.w2[k * kHidden1 + j]);
        }
        x.add_constant(net.b2[k]);
        a2[k] = detail::encode_neuron(ctx, 2, k, x, bounds.hidden2[k]);
    }
    result.out_var = model.add_continuous(prefix + "_out", bounds.output.lb,
                                          bounds.output.ub);
    LinExpr out_eq;
    out_eq.add(result.out_var, 1.0);
    for (int k = 0; k < kHidden2; ++k) {
        if (a2[k] >= 0) out_eq.add(a2[k], -net.w3[k]);
    }
    model.add_constraint(prefix + "_out_eq", out_eq, Sense::EQ, net.b3);
    return result;
}

}  // namespace sparsched
