#pragma once

// Sparse feed-forward ReLU network 5 -> 20 -> 10 -> 1 with structured neuron
// masks, deterministic mini-batch gradient descent, magnitude pruning, and a
// text serialization format. All math is in normalized [0,1] feature/target
// space; forward() denormalizes at the boundary.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "sparsched/common.hpp"
#include "sparsched/degradation.hpp"

namespace sparsched {

constexpr int kHidden1 = 20;
constexpr int kHidden2 = 10;
constexpr int kHiddenTotal = kHidden1 + kHidden2;
constexpr int kMaxPrunable = kHiddenTotal - 2;  // one survivor per layer

struct SparseNet {
    // Row-major weights: w1[j*kNumFeatures+i] feeds hidden-1 neuron j from
    // input i; w2[k*kHidden1+j]; w3[k] feeds the output from hidden-2 k.
    std::array<double, kHidden1 * kNumFeatures> w1{};
    std::array<double, kHidden1> b1{};
    std::array<double, kHidden2 * kHidden1> w2{};
    std::array<double, kHidden2> b2{};
    std::array<double, kHidden2> w3{};
    double b3 = 0.0;
    std::array<std::uint8_t, kHidden1> mask1{};
    std::array<std::uint8_t, kHidden2> mask2{};
    double sparsity = 0.0;  // requested pruned fraction of the 30 neurons
    Normalization norm;

    SparseNet() {
        mask1.fill(1);
        mask2.fill(1);
    }

    int active_neurons() const {
        int n = 0;
        for (auto m : mask1) n += m;
        for (auto m : mask2) n += m;
        return n;
    }

    int pruned_neurons() const { return kHiddenTotal - active_neurons(); }

    double realized_sparsity() const {
        return static_cast<double>(pruned_neurons()) / kHiddenTotal;
    }

    // Zero all parameters touching masked neurons, so a masked neuron is
    // genuinely absent rather than merely skipped at forward time.
    void apply_masks() {
        for (int j = 0; j < kHidden1; ++j) {
            if (mask1[j]) continue;
            for (int i = 0; i < kNumFeatures; ++i) w1[j * kNumFeatures + i] = 0.0;
            b1[j] = 0.0;
            for (int k = 0; k < kHidden2; ++k) w2[k * kHidden1 + j] = 0.0;
        }
        for (int k = 0; k < kHidden2; ++k) {
            if (mask2[k]) continue;
            for (int j = 0; j < kHidden1; ++j) w2[k * kHidden1 + j] = 0.0;
            b2[k] = 0.0;
            w3[k] = 0.0;
        }
    }

    void check_invariants() const {
        bool any1 = false, any2 = false;
        for (auto m : mask1) any1 = any1 || m;
        for (auto m : mask2) any2 = any2 || m;
        if (!any1 || !any2) {
            throw StructuralError("each hidden layer needs >= 1 active neuron");
        }
        auto check_zero = [](double v, const char* what) {
            if (v != 0.0) {
                throw StructuralError(std::string("masked neuron has nonzero ") +
                                      what);
            }
        };
        for (int j = 0; j < kHidden1; ++j) {
            if (mask1[j]) continue;
            for (int i = 0; i < kNumFeatures; ++i) {
                check_zero(w1[j * kNumFeatures + i], "incoming weight");
            }
            check_zero(b1[j], "bias");
            for (int k = 0; k < kHidden2; ++k) {
                check_zero(w2[k * kHidden1 + j], "outgoing weight");
            }
        }
        for (int k = 0; k < kHidden2; ++k) {
            if (mask2[k]) continue;
            for (int j = 0; j < kHidden1; ++j) {
                check_zero(w2[k * kHidden1 + j], "incoming weight");
            }
            check_zero(b2[k], "bias");
            check_zero(w3[k], "outgoing weight");
        }
        const int expect = static_cast<int>(
            std::ceil(sparsity * kHiddenTotal - 1e-9));
        if (pruned_neurons() != std::min(expect, kMaxPrunable)) {
            throw StructuralError(
                "mask population does not match requested sparsity: pruned " +
                std::to_string(pruned_neurons()) + " for sparsity " +
                fmt_full(sparsity));
        }
        norm.validate();
        for (double v : w1) {
            if (!std::isfinite(v)) throw StructuralError("non-finite weight");
        }
        for (double v : w2) {
            if (!std::isfinite(v)) throw StructuralError("non-finite weight");
        }
        for (double v : w3) {
            if (!std::isfinite(v)) throw StructuralError("non-finite weight");
        }
    }
};

// Pre-activations and activations for one normalized input.
struct ForwardTrace {
    std::array<double, kHidden1> pre1{};
    std::array<double, kHidden1> act1{};
    std::array<double, kHidden2> pre2{};
    std::array<double, kHidden2> act2{};
    double z_out = 0.0;
};

inline void check_normalized_input(const std::array<double, kNumFeatures>& z) {
    for (int i = 0; i < kNumFeatures; ++i) {
        if (!(z[i] >= -1e-9) || !(z[i] <= 1.0 + 1e-9)) {
            throw InputDomainError("normalized input " + feature_names()[i] +
                                   " outside [0,1]: " + fmt_full(z[i]));
        }
    }
}

// Forward pass in normalized space. Masked neurons contribute exactly zero.
inline ForwardTrace forward_z(const SparseNet& net,
                              const std::array<double, kNumFeatures>& z) {
    check_normalized_input(z);
    ForwardTrace t;
    for (int j = 0; j < kHidden1; ++j) {
        if (!net.mask1[j]) continue;
        double s = net.b1[j];
        for (int i = 0; i < kNumFeatures; ++i) {
            s += net.w1[j * kNumFeatures + i] * z[i];
        }
        t.pre1[j] = s;
        t.act1[j] = std::max(0.0, s);
    }
    for (int k = 0; k < kHidden2; ++k) {
        if (!net.mask2[k]) continue;
        double s = net.b2[k];
        for (int j = 0; j < kHidden1; ++j) {
            s += net.w2[k * kHidden1 + j] * t.act1[j];
        }
        t.pre2[k] = s;
        t.act2[k] = std::max(0.0, s);
    }
    double s = net.b3;
    for (int k = 0; k < kHidden2; ++k) s += net.w3[k] * t.act2[k];
    t.z_out = s;
    return t;
}

// Predicted per-cycle SOH loss in physical units.
inline double forward(const SparseNet& net, const CycleFeatures& f) {
    return net.norm.denormalize_target(forward_z(net, net.norm.normalize(f)).z_out);
}

// ---------------------------------------------------------------------------
// Pruning

// Importance of a hidden neuron: L1 of incoming row + L1 of outgoing column +
// |bias|. Neurons are ranked jointly across both layers and the lowest are
// masked; ties break on (layer, index) so ranking is total.
struct NeuronScore {
    double score;
    int layer;  // 1 or 2
    int index;
    bool operator<(const NeuronScore& o) const {
        if (score != o.score) return score < o.score;
        if (layer != o.layer) return layer < o.layer;
        return index < o.index;
    }
};

inline std::vector<NeuronScore> neuron_scores(const SparseNet& net) {
    std::vector<NeuronScore> s;
    s.reserve(kHiddenTotal);
    for (int j = 0; j < kHidden1; ++j) {
        double v = std::abs(net.b1[j]);
        for (int i = 0; i < kNumFeatures; ++i) {
            v += std::abs(net.w1[j * kNumFeatures + i]);
        }
        for (int k = 0; k < kHidden2; ++k) {
            v += std::abs(net.w2[k * kHidden1 + j]);
        }
        s.push_back({v, 1, j});
    }
    for (int k = 0; k < kHidden2; ++k) {
        double v = std::abs(net.b2[k]);
        for (int j = 0; j < kHidden1; ++j) {
            v += std::abs(net.w2[k * kHidden1 + j]);
        }
        v += std::abs(net.w3[k]);
        s.push_back({v, 2, k});
    }
    return s;
}

struct MaskPair {
    std::array<std::uint8_t, kHidden1> mask1;
    std::array<std::uint8_t, kHidden2> mask2;
};

// Build masks pruning ceil(sparsity*30) neurons, lowest importance first,
// skipping a prune that would empty a layer (the skipped slot falls to the
// next candidate). sparsity high enough to need > 28 prunes is rejected.
inline MaskPair prune_mask(const SparseNet& net, double sparsity) {
    if (!(sparsity >= 0.0) || !(sparsity < 1.0)) {
        throw ConfigError("sparsity must lie in [0,1), got " + fmt_full(sparsity));
    }
    const int target = static_cast<int>(std::ceil(sparsity * kHiddenTotal - 1e-9));
    if (target > kMaxPrunable) {
        throw ConfigError("sparsity " + fmt_full(sparsity) + " would prune " +
                          std::to_string(target) + " of " +
                          std::to_string(kHiddenTotal) +
                          " neurons; at most " + std::to_string(kMaxPrunable) +
                          " can go (one survivor per layer)");
    }
    MaskPair m;
    m.mask1.fill(1);
    m.mask2.fill(1);
    auto scores = neuron_scores(net);
    std::sort(scores.begin(), scores.end());
    int pruned = 0, alive1 = kHidden1, alive2 = kHidden2;
    for (const auto& s : scores) {
        if (pruned == target) break;
        if (s.layer == 1) {
            if (alive1 == 1) continue;
            m.mask1[s.index] = 0;
            --alive1;
        } else {
            if (alive2 == 1) continue;
            m.mask2[s.index] = 0;
            --alive2;
        }
        ++pruned;
    }
    if (pruned != target) {
        throw StructuralError("pruning could not reach requested count");
    }
    return m;
}

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
    int epochs = 300;
    int batch_size = 32;
    double learning_rate = 0.9;    // decayed as lr / (1 + epoch/200)
    double sparsity = 0.0;
    std::uint64_t seed = 1;
    std::ostream* log = nullptr;   // per-epoch csv lines when set

    void validate() const {
        if (epochs < 1) throw ConfigError("epochs must be >= 1");
        if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
        if (!(learning_rate > 0.0) || !(learning_rate < 1.0)) {
            throw ConfigError("learning_rate must lie in (0,1), got " +
                              fmt_full(learning_rate));
        }
        if (!(sparsity >= 0.0) || !(sparsity < 1.0)) {
            throw ConfigError("sparsity must lie in [0,1), got " +
                              fmt_full(sparsity));
        }
    }
};

struct Gradients {
    std::array<double, kHidden1 * kNumFeatures> w1{};
    std::array<double, kHidden1> b1{};
    std::array<double, kHidden2 * kHidden1> w2{};
    std::array<double, kHidden2> b2{};
    std::array<double, kHidden2> w3{};
    double b3 = 0.0;
};

// Mean squared error over a batch in normalized target space, plus exact
// gradients by backpropagation. Masked neurons receive zero gradient.
inline double batch_loss_and_gradients(
    const SparseNet& net,
    const std::vector<std::array<double, kNumFeatures>>& xs,
    const std::vector<double>& ts, Gradients* g) {
    if (xs.empty() || xs.size() != ts.size()) {
        throw StructuralError("batch inputs and targets must match and be nonempty");
    }
    const double inv_n = 1.0 / static_cast<double>(xs.size());
    double loss = 0.0;
    for (std::size_t n = 0; n < xs.size(); ++n) {
        const ForwardTrace tr = forward_z(net, xs[n]);
        const double err = tr.z_out - ts[n];
        loss += err * err * inv_n;
        if (!g) continue;
        const double dz = 2.0 * err * inv_n;
        std::array<double, kHidden2> dpre2{};
        for (int k = 0; k < kHidden2; ++k) {
            if (!net.mask2[k]) continue;
            g->w3[k] += dz * tr.act2[k];
            const double da2 = dz * net.w3[k];
            dpre2[k] = tr.pre2[k] > 0.0 ? da2 : 0.0;
            g->b2[k] += dpre2[k];
        }
        g->b3 += dz;
        std::array<double, kHidden1> da1{};
        for (int k = 0; k < kHidden2; ++k) {
            if (!net.mask2[k] || dpre2[k] == 0.0) continue;
            for (int j = 0; j < kHidden1; ++j) {
                if (!net.mask1[j]) continue;
                g->w2[k * kHidden1 + j] += dpre2[k] * tr.act1[j];
                da1[j] += dpre2[k] * net.w2[k * kHidden1 + j];
            }
        }
        for (int j = 0; j < kHidden1; ++j) {
            if (!net.mask1[j]) continue;
            const double dpre1 = tr.pre1[j] > 0.0 ? da1[j] : 0.0;
            if (dpre1 == 0.0) continue;
            for (int i = 0; i < kNumFeatures; ++i) {
                g->w1[j * kNumFeatures + i] += dpre1 * xs[n][i];
            }
            g->b1[j] += dpre1;
        }
    }
    return loss;
}

namespace detail {

inline void init_dense(SparseNet& net, Rng& rng) {
    for (auto& v : net.w1) v = rng.uniform(-0.5, 0.5);
    for (auto& v : net.b1) v = rng.uniform(-0.5, 0.5);
    for (auto& v : net.w2) v = rng.uniform(-0.5, 0.5);
    for (auto& v : net.b2) v = rng.uniform(-0.5, 0.5);
    for (auto& v : net.w3) v = rng.uniform(-0.5, 0.5);
    net.b3 = rng.uniform(-0.5, 0.5);
}

struct NormalizedData {
    std::vector<std::array<double, kNumFeatures>> x;
    std::vector<double> t;  // normalized targets
};

inline NormalizedData normalize_subset(const Dataset& ds,
                                       const std::vector<std::size_t>& idx) {
    NormalizedData nd;
    nd.x.reserve(idx.size());
    nd.t.reserve(idx.size());
    for (auto i : idx) {
        nd.x.push_back(ds.norm.normalize(ds.samples[i].features));
        nd.t.push_back(ds.norm.normalize_target(ds.samples[i].delta_soh));
    }
    return nd;
}

// Raw-space MSE over a normalized subset (the logged quantity).
inline double raw_mse(const SparseNet& net, const NormalizedData& nd) {
    double mse = 0.0;
    const double inv = 1.0 / static_cast<double>(nd.x.size());
    for (std::size_t n = 0; n < nd.x.size(); ++n) {
        const double pred =
            net.norm.denormalize_target(forward_z(net, nd.x[n]).z_out);
        const double actual = net.norm.denormalize_target(nd.t[n]);
        const double e = pred - actual;
        mse += e * e * inv;
    }
    return mse;
}

// Shared masked-GD loop. Masks are recomputed from current magnitudes at the
// top of every epoch and re-applied after every update; because pruned
// parameters stay zero their scores stay zero, so masks settle quickly — the
// first epoch at which the mask repeats is reported in the log.
inline void train_loop(SparseNet& net, const Dataset& ds, const TrainConfig& cfg,
                       Rng& rng) {
    const NormalizedData train = normalize_subset(ds, ds.train_idx);
    const NormalizedData test = normalize_subset(ds, ds.test_idx);
    if (train.x.empty() || test.x.empty()) {
        throw ConfigError("training needs nonempty train and test splits");
    }
    net.sparsity = cfg.sparsity;
    std::vector<std::size_t> order(train.x.size());
    std::iota(order.begin(), order.end(), 0);
    if (cfg.log) *cfg.log << "epoch,train_mse,test_mse,active_neurons\n";
    MaskPair prev_mask{};
    int stable_epoch = -1;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        MaskPair m = prune_mask(net, cfg.sparsity);
        if (epoch > 0 && stable_epoch < 0 && m.mask1 == prev_mask.mask1 &&
            m.mask2 == prev_mask.mask2) {
            stable_epoch = epoch;
        }
        prev_mask = m;
        net.mask1 = m.mask1;
        net.mask2 = m.mask2;
        net.apply_masks();

        rng.shuffle(order);
        const double lr = cfg.learning_rate / (1.0 + epoch / 200.0);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop = std::min(
                order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::vector<std::array<double, kNumFeatures>> bx;
            std::vector<double> bt;
            bx.reserve(stop - start);
            bt.reserve(stop - start);
            for (std::size_t q = start; q < stop; ++q) {
                bx.push_back(train.x[order[q]]);
                bt.push_back(train.t[order[q]]);
            }
            Gradients g;
            const double loss = batch_loss_and_gradients(net, bx, bt, &g);
            if (!std::isfinite(loss)) {
                throw DivergenceError(epoch, "training loss became non-finite");
            }
            for (std::size_t i = 0; i < net.w1.size(); ++i) net.w1[i] -= lr * g.w1[i];
            for (int j = 0; j < kHidden1; ++j) net.b1[j] -= lr * g.b1[j];
            for (std::size_t i = 0; i < net.w2.size(); ++i) net.w2[i] -= lr * g.w2[i];
            for (int k = 0; k < kHidden2; ++k) net.b2[k] -= lr * g.b2[k];
            for (int k = 0; k < kHidden2; ++k) net.w3[k] -= lr * g.w3[k];
            net.b3 -= lr * g.b3;
            net.apply_masks();
        }
        if (cfg.log) {
            *cfg.log << epoch + 1 << ',' << fmt_full(raw_mse(net, train)) << ','
                     << fmt_full(raw_mse(net, test)) << ','
                     << net.active_neurons() << '\n';
        }
    }
    if (cfg.log) {
        if (stable_epoch >= 0) {
            *cfg.log << "# mask stable from epoch " << stable_epoch + 1 << '\n';
        } else if (cfg.sparsity > 0.0) {
            *cfg.log << "# mask did not stabilize\n";
        }
    }
    net.check_invariants();
}

}  // namespace detail

// Cold start: random init, then masked training from scratch.
inline SparseNet train_cold(const Dataset& ds, const TrainConfig& cfg) {
    cfg.validate();
    ds.validate();
    Rng rng(cfg.seed);
    SparseNet net;
    net.norm = ds.norm;
    detail::init_dense(net, rng);
    detail::train_loop(net, ds, cfg, rng);
    return net;
}

// Dense pretraining is train_cold with sparsity zero.
inline SparseNet train_dense(const Dataset& ds, TrainConfig cfg) {
    cfg.sparsity = 0.0;
    return train_cold(ds, cfg);
}

// Warm start: copy a trained dense net's weights, then masked fine-tuning.
inline SparseNet train_warm(const SparseNet& dense, const Dataset& ds,
                            const TrainConfig& cfg) {
    cfg.validate();
    ds.validate();
    if (dense.pruned_neurons() != 0 || dense.sparsity != 0.0) {
        throw ConfigError("warm start requires a dense (sparsity 0) base net");
    }
    Rng rng(cfg.seed);
    SparseNet net = dense;
    net.norm = ds.norm;
    detail::train_loop(net, ds, cfg, rng);
    return net;
}

// ---------------------------------------------------------------------------
// Evaluation

struct AccuracyReport {
    std::map<double, double> within;  // tolerance -> fraction of test samples
    double mse = 0.0;                 // raw-space mean squared error
};

// A prediction counts as accurate at tolerance tau when
// |pred - actual| <= tau * max(actual, 1e-7).
inline AccuracyReport evaluate_accuracy(const SparseNet& net, const Dataset& ds,
                                        const std::vector<double>& tolerances) {
    if (ds.test_idx.empty()) throw ConfigError("dataset has no test split");
    AccuracyReport rep;
    for (double tau : tolerances) rep.within[tau] = 0.0;
    const double inv = 1.0 / static_cast<double>(ds.test_idx.size());
    for (auto i : ds.test_idx) {
        const double actual = ds.samples[i].delta_soh;
        const double pred = forward(net, ds.samples[i].features);
        const double err = std::abs(pred - actual);
        rep.mse += (pred - actual) * (pred - actual) * inv;
        for (double tau : tolerances) {
            if (err <= tau * std::max(actual, 1e-7)) rep.within[tau] += inv;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Serialization

inline void save_net(const SparseNet& net, const std::filesystem::path& path) {
    net.check_invariants();
    std::ostringstream os;
    os << "sparsched-net 1\n";
    os << "layers " << kNumFeatures << ' ' << kHidden1 << ' ' << kHidden2
       << " 1\n";
    os << "sparsity " << fmt_full(net.sparsity) << '\n';
    for (int i = 0; i < kNumFeatures; ++i) {
        os << "norm " << feature_names()[i] << ' ' << fmt_full(net.norm.feature[i].lo)
           << ' ' << fmt_full(net.norm.feature[i].hi) << '\n';
    }
    os << "norm target " << fmt_full(net.norm.target.lo) << ' '
       << fmt_full(net.norm.target.hi) << '\n';
    os << "mask1";
    for (auto m : net.mask1) os << ' ' << int(m);
    os << "\nmask2";
    for (auto m : net.mask2) os << ' ' << int(m);
    os << "\nw1\n";
    for (int j = 0; j < kHidden1; ++j) {
        for (int i = 0; i < kNumFeatures; ++i) {
            os << (i ? " " : "") << fmt_full(net.w1[j * kNumFeatures + i]);
        }
        os << '\n';
    }
    os << "b1\n";
    for (int j = 0; j < kHidden1; ++j) os << (j ? " " : "") << fmt_full(net.b1[j]);
    os << "\nw2\n";
    for (int k = 0; k < kHidden2; ++k) {
        for (int j = 0; j < kHidden1; ++j) {
            os << (j ? " " : "") << fmt_full(net.w2[k * kHidden1 + j]);
        }
        os << '\n';
    }
    os << "b2\n";
    for (int k = 0; k < kHidden2; ++k) os << (k ? " " : "") << fmt_full(net.b2[k]);
    os << "\nw3\n";
    for (int k = 0; k < kHidden2; ++k) os << (k ? " " : "") << fmt_full(net.w3[k]);
    os << "\nb3\n" << fmt_full(net.b3) << '\n';
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << os.str();
}

namespace detail {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}
    // Next non-empty line as a token stream; throws ParseError at EOF.
    std::vector<std::string> next(const std::string& what) {
        std::string line;
        while (std::getline(in_, line)) {
            ++lineno_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::istringstream is(line);
            std::vector<std::string> toks;
            std::string t;
            while (is >> t) toks.push_back(t);
            if (!toks.empty()) return toks;
        }
        throw ParseError("unexpected end of file while reading " + what, lineno_);
    }
    long lineno() const { return lineno_; }

private:
    std::istream& in_;
    long lineno_ = 0;
};

inline double parse_double(const std::string& tok, long lineno) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad numeric field '" + tok + "'", lineno);
    }
}

}  // namespace detail

inline SparseNet load_net(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read " + path.string());
    detail::LineReader rd(f);
    auto expect = [&](const std::vector<std::string>& toks, const std::string& kw,
                      std::size_t n) {
        if (toks.empty() || toks[0] != kw || toks.size() != n) {
            throw ParseError("expected '" + kw + "' record", rd.lineno());
        }
    };
    SparseNet net;
    auto header = rd.next("header");
    expect(header, "sparsched-net", 2);
    if (header[1] != "1") {
        throw ParseError("unsupported format version '" + header[1] + "'",
                         rd.lineno());
    }
    auto layers = rd.next("layers");
    expect(layers, "layers", 5);
    if (layers[1] != std::to_string(kNumFeatures) ||
        layers[2] != std::to_string(kHidden1) ||
        layers[3] != std::to_string(kHidden2) || layers[4] != "1") {
        throw ParseError("unsupported architecture", rd.lineno());
    }
    auto sp = rd.next("sparsity");
    expect(sp, "sparsity", 2);
    net.sparsity = detail::parse_double(sp[1], rd.lineno());
    for (int i = 0; i < kNumFeatures; ++i) {
        auto toks = rd.next("norm");
        if (toks.size() != 4 || toks[0] != "norm" || toks[1] != feature_names()[i]) {
            throw ParseError("expected norm record for " + feature_names()[i],
                             rd.lineno());
        }
        net.norm.feature[i] = {detail::parse_double(toks[2], rd.lineno()),
                               detail::parse_double(toks[3], rd.lineno())};
    }
    auto tgt = rd.next("norm target");
    if (tgt.size() != 4 || tgt[0] != "norm" || tgt[1] != "target") {
        throw ParseError("expected norm target record", rd.lineno());
    }
    net.norm.target = {detail::parse_double(tgt[2], rd.lineno()),
                       detail::parse_double(tgt[3], rd.lineno())};
    auto m1 = rd.next("mask1");
    expect(m1, "mask1", 1 + kHidden1);
    for (int j = 0; j < kHidden1; ++j) {
        if (m1[j + 1] != "0" && m1[j + 1] != "1") {
            throw ParseError("mask bits must be 0 or 1", rd.lineno());
        }
        net.mask1[j] = m1[j + 1] == "1";
    }
    auto m2 = rd.next("mask2");
    expect(m2, "mask2", 1 + kHidden2);
    for (int k = 0; k < kHidden2; ++k) {
        if (m2[k + 1] != "0" && m2[k + 1] != "1") {
            throw ParseError("mask bits must be 0 or 1", rd.lineno());
        }
        net.mask2[k] = m2[k + 1] == "1";
    }
    auto matrix = [&](const std::string& kw, double* out, int rows, int cols) {
        expect(rd.next(kw), kw, 1);
        for (int r = 0; r < rows; ++r) {
            auto toks = rd.next(kw + " row");
            if (static_cast<int>(toks.size()) != cols) {
                throw ParseError("expected " + std::to_string(cols) +
                                     " values in " + kw + " row",
                                 rd.lineno());
            }
            for (int c = 0; c < cols; ++c) {
                out[r * cols + c] = detail::parse_double(toks[c], rd.lineno());
            }
        }
    };
    matrix("w1", net.w1.data(), kHidden1, kNumFeatures);
    matrix("b1", net.b1.data(), 1, kHidden1);
    matrix("w2", net.w2.data(), kHidden2, kHidden1);
    matrix("b2", net.b2.data(), 1, kHidden2);
    matrix("w3", net.w3.data(), 1, kHidden2);
    matrix("b3", &net.b3, 1, 1);
    net.check_invariants();
    return net;
}

}  // namespace sparsched
