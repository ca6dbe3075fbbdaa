#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ciotsim/rng.hpp"

namespace ciot {

// Dense row-major matrix of doubles.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
    double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }
    void zero() { std::fill(a.begin(), a.end(), 0.0); }
};

// Weights and biases of the feed-forward Q-network. W[l] has shape
// sizes[l+1] x sizes[l]; hidden layers use leaky ReLU, the output layer is
// linear so Q-values are unbounded.
struct MlpParams {
    std::vector<int> sizes;              // neuron counts per layer, input first
    std::vector<Mat> W;
    std::vector<std::vector<double>> b;

    int input_dim() const { return sizes.front(); }
    int output_dim() const { return sizes.back(); }
    int layer_count() const { return static_cast<int>(W.size()); }

    long param_count() const {
        long n = 0;
        for (size_t l = 0; l < W.size(); ++l)
            n += static_cast<long>(W[l].rows) * W[l].cols + static_cast<long>(b[l].size());
        return n;
    }
};

// Gradients shaped like MlpParams.
struct MlpGrads {
    std::vector<Mat> W;
    std::vector<std::vector<double>> b;
};

// Cached pre-activations and activations from one forward pass.
struct ForwardTrace {
    std::vector<Mat> z;   // pre-activations per layer
    std::vector<Mat> act; // act[0] is the input batch, act[l+1] = f(z[l])
};

inline double leaky_relu(double x, double alpha_leak) {
    return x >= 0.0 ? x : alpha_leak * x;
}

// derivative, with f'(0) taken as 1
inline double leaky_relu_deriv(double x, double alpha_leak) {
    return x >= 0.0 ? 1.0 : alpha_leak;
}

// Kaiming (He) init: weights ~ N(0, 2 / fan_in), biases zero.
inline MlpParams init_kaiming(Rng& rng, const std::vector<int>& sizes) {
    if (sizes.size() < 2) throw std::invalid_argument("mlp: need at least two layers");
    for (int s : sizes)
        if (s < 1) throw std::invalid_argument("mlp: layer sizes must be positive");
    MlpParams p;
    p.sizes = sizes;
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
        int in = sizes[l], out = sizes[l + 1];
        Mat w(out, in);
        double stddev = std::sqrt(2.0 / static_cast<double>(in));
        for (double& v : w.a) v = rng.normal(stddev);
        p.W.push_back(std::move(w));
        p.b.emplace_back(static_cast<size_t>(out), 0.0);
    }
    return p;
}

inline MlpGrads make_grads_like(const MlpParams& p) {
    MlpGrads g;
    for (size_t l = 0; l < p.W.size(); ++l) {
        g.W.emplace_back(p.W[l].rows, p.W[l].cols);
        g.b.emplace_back(p.b[l].size(), 0.0);
    }
    return g;
}

// Y = X * W^T + b, X is batch x in, W is out x in.
inline void linear_forward(const Mat& X, const Mat& W, const std::vector<double>& b, Mat& Y) {
    const int B = X.rows, in = X.cols, out = W.rows;
    if (Y.rows != B || Y.cols != out) Y = Mat(B, out);
    for (int r = 0; r < B; ++r) {
        const double* x = X.row(r);
        double* y = Y.row(r);
        for (int o = 0; o < out; ++o) {
            const double* w = W.row(o);
            double acc = b[static_cast<size_t>(o)];
            for (int i = 0; i < in; ++i) acc += x[i] * w[i];
            y[o] = acc;
        }
    }
}

// Batched forward pass; fills the trace when given one.
inline Mat forward_batch(const MlpParams& p, const Mat& X, double alpha_leak,
                         ForwardTrace* trace = nullptr) {
    if (X.cols != p.input_dim()) throw std::invalid_argument("forward: input width mismatch");
    const int L = p.layer_count();
    if (trace) {
        trace->z.assign(static_cast<size_t>(L), Mat());
        trace->act.assign(static_cast<size_t>(L) + 1, Mat());
        trace->act[0] = X;
    }
    Mat cur = X;
    for (int l = 0; l < L; ++l) {
        Mat z;
        linear_forward(cur, p.W[static_cast<size_t>(l)], p.b[static_cast<size_t>(l)], z);
        if (l + 1 < L) {
            Mat act(z.rows, z.cols);
            for (size_t i = 0; i < z.a.size(); ++i) act.a[i] = leaky_relu(z.a[i], alpha_leak);
            if (trace) {
                trace->z[static_cast<size_t>(l)] = std::move(z);
                trace->act[static_cast<size_t>(l) + 1] = act;
            }
            cur = std::move(act);
        } else {
            if (trace) {
                trace->z[static_cast<size_t>(l)] = z;
                trace->act[static_cast<size_t>(l) + 1] = z;
            }
            cur = std::move(z);
        }
    }
    return cur;
}

// Single-input convenience wrapper.
inline std::vector<double> forward(const MlpParams& p, std::span<const double> x,
                                   double alpha_leak) {
    Mat X(1, static_cast<int>(x.size()));
    std::copy(x.begin(), x.end(), X.a.begin());
    Mat Y = forward_batch(p, X, alpha_leak);
    return Y.a;
}

struct LossGrad {
    double loss = 0.0;
    Mat dQ;  // batch x z, nonzero only at each sample's taken action
};

// Mean squared error over the taken-action outputs only:
//   loss = mean_b (target_b - Q[b, a_b])^2
//   dL/dQ[b, a_b] = 2 (Q[b, a_b] - target_b) / B, zero elsewhere.
inline LossGrad mse_loss_and_grad(const Mat& q_pred, std::span<const int> actions,
                                  std::span<const double> targets) {
    const int B = q_pred.rows;
    if (static_cast<int>(actions.size()) != B || static_cast<int>(targets.size()) != B)
        throw std::invalid_argument("loss: batch size mismatch");
    LossGrad out;
    out.dQ = Mat(B, q_pred.cols);
    double loss = 0.0;
    for (int r = 0; r < B; ++r) {
        int a = actions[static_cast<size_t>(r)];
        if (a < 0 || a >= q_pred.cols) throw std::invalid_argument("loss: action out of range");
        double diff = q_pred(r, a) - targets[static_cast<size_t>(r)];
        loss += diff * diff;
        out.dQ(r, a) = 2.0 * diff / B;
    }
    out.loss = loss / B;
    return out;
}

// Reverse-mode gradients of forward_batch. dY is dLoss/dOutput.
inline MlpGrads backward(const MlpParams& p, const ForwardTrace& trace, const Mat& dY,
                         double alpha_leak) {
    const int L = p.layer_count();
    if (trace.z.size() != static_cast<size_t>(L))
        throw std::invalid_argument("backward: trace does not match network depth");
    if (dY.rows != trace.act[0].rows || dY.cols != p.output_dim())
        throw std::invalid_argument("backward: upstream gradient shape mismatch");

    MlpGrads g = make_grads_like(p);
    Mat delta = dY;  // gradient w.r.t. the current layer's pre-activation
    for (int l = L - 1; l >= 0; --l) {
        const Mat& A = trace.act[static_cast<size_t>(l)];  // input to layer l
        const int B = delta.rows, out = delta.cols, in = A.cols;
        Mat& dW = g.W[static_cast<size_t>(l)];
        std::vector<double>& db = g.b[static_cast<size_t>(l)];
        for (int r = 0; r < B; ++r) {
            const double* d = delta.row(r);
            const double* x = A.row(r);
            for (int o = 0; o < out; ++o) {
                double dv = d[o];
                if (dv == 0.0) continue;
                db[static_cast<size_t>(o)] += dv;
                double* wrow = dW.row(o);
                for (int i = 0; i < in; ++i) wrow[i] += dv * x[i];
            }
        }
        if (l == 0) break;
        // propagate through the linear map, then the previous activation
        const Mat& W = p.W[static_cast<size_t>(l)];
        Mat prev(B, in);
        for (int r = 0; r < B; ++r) {
            const double* d = delta.row(r);
            double* pr = prev.row(r);
            for (int o = 0; o < out; ++o) {
                double dv = d[o];
                if (dv == 0.0) continue;
                const double* wrow = W.row(o);
                for (int i = 0; i < in; ++i) pr[i] += dv * wrow[i];
            }
        }
        const Mat& zprev = trace.z[static_cast<size_t>(l - 1)];
        for (size_t i = 0; i < prev.a.size(); ++i)
            prev.a[i] *= leaky_relu_deriv(zprev.a[i], alpha_leak);
        delta = std::move(prev);
    }
    return g;
}

// Adam moment accumulators, shaped like the parameters they update.
struct AdamState {
    std::vector<Mat> mW, vW;
    std::vector<std::vector<double>> mb, vb;
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    AdamState(const MlpParams& p, double b1, double b2, double e)
        : beta1(b1), beta2(b2), eps(e) {
        for (size_t l = 0; l < p.W.size(); ++l) {
            mW.emplace_back(p.W[l].rows, p.W[l].cols);
            vW.emplace_back(p.W[l].rows, p.W[l].cols);
            mb.emplace_back(p.b[l].size(), 0.0);
            vb.emplace_back(p.b[l].size(), 0.0);
        }
    }
};

// One bias-corrected Adam update at learning rate eta.
inline void adam_step(MlpParams& p, const MlpGrads& g, AdamState& s, double eta) {
    ++s.step;
    const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
    const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
    auto update = [&](double& theta, double grad, double& m, double& v) {
        m = s.beta1 * m + (1.0 - s.beta1) * grad;
        v = s.beta2 * v + (1.0 - s.beta2) * grad * grad;
        theta -= eta * (m / c1) / (std::sqrt(v / c2) + s.eps);
    };
    for (size_t l = 0; l < p.W.size(); ++l) {
        Mat& W = p.W[l];
        const Mat& dW = g.W[l];
        Mat& mW = s.mW[l];
        Mat& vW = s.vW[l];
        for (size_t i = 0; i < W.a.size(); ++i) update(W.a[i], dW.a[i], mW.a[i], vW.a[i]);
        for (size_t i = 0; i < p.b[l].size(); ++i)
            update(p.b[l][i], g.b[l][i], s.mb[l][i], s.vb[l][i]);
    }
}

// eta0 halved once per lr_halve_every episodes (episode is 0-based).
inline double lr_schedule(long episode, double eta0, int halve_every) {
    if (episode < 0) throw std::invalid_argument("lr_schedule: episode must be >= 0");
    return std::ldexp(eta0, -static_cast<int>(episode / halve_every));
}

// ---------------------------------------------------------------------------
// Checkpoint format (binary, little-endian, versioned):
//   8 bytes  magic "CIOTNN01"
//   u32      layer count (neuron layers, input included)
//   u32[n]   layer sizes
//   then per weight layer: W row-major doubles, bias doubles
// ---------------------------------------------------------------------------

inline constexpr char kParamsMagic[8] = {'C', 'I', 'O', 'T', 'N', 'N', '0', '1'};

inline void save_params(const MlpParams& p, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(kParamsMagic, 8);
    std::uint32_t n = static_cast<std::uint32_t>(p.sizes.size());
    f.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (int s : p.sizes) {
        std::uint32_t v = static_cast<std::uint32_t>(s);
        f.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    for (size_t l = 0; l < p.W.size(); ++l) {
        f.write(reinterpret_cast<const char*>(p.W[l].a.data()),
                static_cast<std::streamsize>(p.W[l].a.size() * sizeof(double)));
        f.write(reinterpret_cast<const char*>(p.b[l].data()),
                static_cast<std::streamsize>(p.b[l].size() * sizeof(double)));
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline MlpParams load_params(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, kParamsMagic, 8) != 0)
        throw std::runtime_error("bad checkpoint magic: " + path);
    std::uint32_t n = 0;
    f.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!f || n < 2 || n > 64) throw std::runtime_error("bad checkpoint header: " + path);
    std::vector<int> sizes(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t v = 0;
        f.read(reinterpret_cast<char*>(&v), sizeof v);
        if (!f || v == 0) throw std::runtime_error("bad checkpoint header: " + path);
        sizes[i] = static_cast<int>(v);
    }
    MlpParams p;
    p.sizes = sizes;
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
        Mat w(sizes[l + 1], sizes[l]);
        f.read(reinterpret_cast<char*>(w.a.data()),
               static_cast<std::streamsize>(w.a.size() * sizeof(double)));
        std::vector<double> bias(static_cast<size_t>(sizes[l + 1]));
        f.read(reinterpret_cast<char*>(bias.data()),
               static_cast<std::streamsize>(bias.size() * sizeof(double)));
        if (!f) throw std::runtime_error("truncated checkpoint: " + path);
        p.W.push_back(std::move(w));
        p.b.push_back(std::move(bias));
    }
    return p;
}

}  // namespace ciot
