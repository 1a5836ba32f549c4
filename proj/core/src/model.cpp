// SPDX-License-Identifier: Apache-2.0
#include "prunelab/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prunelab/rng.hpp"

namespace prunelab {

namespace {

constexpr double kNormEps = 1e-5;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_positive(int v, const char* field) {
  if (v <= 0)
    throw std::invalid_argument(std::string("ModelConfig.") + field +
                                ": must be positive");
}

ParamTensor make_weight(std::string name, std::vector<std::size_t> shape,
                        std::size_t fan_in, Rng& rng) {
  ParamTensor t;
  t.name = std::move(name);
  t.shape = std::move(shape);
  t.prunable = true;
  t.values.resize(shape_numel(t.shape));
  const double bound = std::sqrt(1.0 / double(fan_in));
  for (auto& v : t.values) v = float(rng.uniform(-bound, bound));
  return t;
}

ParamTensor make_const(std::string name, std::size_t n, float fill) {
  ParamTensor t;
  t.name = std::move(name);
  t.shape = {n};
  t.prunable = false;
  t.values.assign(n, fill);
  return t;
}

struct Layout {
  ModelConfig cfg;
  const ParamTensor* conv_w;
  const ParamTensor* conv_b;
  struct Block {
    const ParamTensor* lin_w;
    const ParamTensor* lin_b;
    const ParamTensor* gamma;
    const ParamTensor* beta;
  };
  std::vector<Block> blocks;
  const ParamTensor* head_w;
  const ParamTensor* head_b;
};

Layout layout_of(const ModelState& state) {
  Layout lay;
  lay.cfg = config_of(state);
  lay.conv_w = state.find("frontend.weight");
  lay.conv_b = state.find("frontend.bias");
  for (int b = 0; b < lay.cfg.num_blocks; ++b) {
    std::string p = "block" + std::to_string(b) + ".";
    lay.blocks.push_back({state.find(p + "lin.weight"),
                          state.find(p + "lin.bias"),
                          state.find(p + "norm.gamma"),
                          state.find(p + "norm.beta")});
  }
  lay.head_w = state.find("head.weight");
  lay.head_b = state.find("head.bias");
  return lay;
}

}  // namespace

void validate(const ModelConfig& cfg) {
  check_positive(cfg.feature_dim, "feature_dim");
  check_positive(cfg.hidden_dim, "hidden_dim");
  check_positive(cfg.num_blocks, "num_blocks");
  if (cfg.alphabet_size < 2)
    throw std::invalid_argument(
        "ModelConfig.alphabet_size: needs at least blank plus one grapheme");
  check_positive(cfg.conv_kernel, "conv_kernel");
  if (cfg.conv_kernel % 2 == 0)
    throw std::invalid_argument("ModelConfig.conv_kernel: must be odd");
}

std::size_t expected_param_count(const ModelConfig& cfg) {
  const std::size_t H = cfg.hidden_dim, F = cfg.feature_dim,
                    K = cfg.conv_kernel, A = cfg.alphabet_size;
  std::size_t n = H * F * K + H;                      // frontend
  n += std::size_t(cfg.num_blocks) * (2 * H * H + 2 * H + H + H);  // blocks
  n += A * H + A;                                     // head
  return n;
}

ModelState init_model(const ModelConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  const std::size_t H = cfg.hidden_dim, F = cfg.feature_dim,
                    K = cfg.conv_kernel, A = cfg.alphabet_size;

  ModelState state;
  state.epoch_tag = 0;
  state.seed = seed;

  {
    Rng rng(seed, "init/frontend.weight");
    state.params.push_back(make_weight("frontend.weight", {H, F, K}, F * K, rng));
  }
  state.params.push_back(make_const("frontend.bias", H, 0.0f));

  for (int b = 0; b < cfg.num_blocks; ++b) {
    std::string p = "block" + std::to_string(b) + ".";
    Rng rng(seed, "init/" + p + "lin.weight");
    state.params.push_back(make_weight(p + "lin.weight", {2 * H, H}, H, rng));
    state.params.push_back(make_const(p + "lin.bias", 2 * H, 0.0f));
    state.params.push_back(make_const(p + "norm.gamma", H, 1.0f));
    state.params.push_back(make_const(p + "norm.beta", H, 0.0f));
  }

  {
    Rng rng(seed, "init/head.weight");
    state.params.push_back(make_weight("head.weight", {A, H}, H, rng));
  }
  state.params.push_back(make_const("head.bias", A, 0.0f));
  return state;
}

ModelConfig config_of(const ModelState& state) {
  const ParamTensor* conv = state.find("frontend.weight");
  const ParamTensor* head = state.find("head.weight");
  if (!conv || conv->shape.size() != 3 || !head || head->shape.size() != 2)
    throw std::runtime_error("config_of: state is not a sequence model");
  ModelConfig cfg;
  cfg.hidden_dim = int(conv->shape[0]);
  cfg.feature_dim = int(conv->shape[1]);
  cfg.conv_kernel = int(conv->shape[2]);
  cfg.alphabet_size = int(head->shape[0]);
  cfg.num_blocks = 0;
  while (state.find("block" + std::to_string(cfg.num_blocks) + ".lin.weight"))
    ++cfg.num_blocks;
  validate(cfg);
  return cfg;
}

GradientSet::GradientSet(const ModelState& shape_ref) {
  names_.reserve(shape_ref.params.size());
  grads_.reserve(shape_ref.params.size());
  for (const auto& p : shape_ref.params) {
    names_.push_back(p.name);
    grads_.emplace_back(p.size(), 0.0);
  }
}

void GradientSet::zero() {
  for (auto& g : grads_) std::fill(g.begin(), g.end(), 0.0);
}

void GradientSet::scale(double s) {
  for (auto& g : grads_)
    for (auto& v : g) v *= s;
}

std::size_t GradientSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw std::invalid_argument("GradientSet: no tensor named " +
                              std::string(name));
}

bool GradientSet::matches(const ModelState& state) const {
  if (names_.size() != state.params.size()) return false;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] != state.params[i].name ||
        grads_[i].size() != state.params[i].size())
      return false;
  return true;
}

namespace {

// Shared forward body; trace may be null for inference-only calls.
LogProbs run_forward(const ModelState& state, const FeatureSequence& seq,
                     ForwardTrace* trace) {
  const Layout lay = layout_of(state);
  const int N = seq.frames, F = lay.cfg.feature_dim, H = lay.cfg.hidden_dim,
            A = lay.cfg.alphabet_size, K = lay.cfg.conv_kernel;
  if (seq.dim != F)
    throw std::invalid_argument(
        "forward: feature dim " + std::to_string(seq.dim) +
        " does not match model feature_dim " + std::to_string(F));
  if (N <= 0) throw std::invalid_argument("forward: empty sequence");

  std::vector<double> x(std::size_t(N) * F);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = double(seq.values[i]);

  // Frontend convolution, zero padding, stride 1.
  std::vector<double> h(std::size_t(N) * H);
  {
    const float* W = lay.conv_w->values.data();
    const float* B = lay.conv_b->values.data();
    const int half = K / 2;
    for (int t = 0; t < N; ++t) {
      for (int c = 0; c < H; ++c) {
        double acc = double(B[c]);
        for (int k = 0; k < K; ++k) {
          const int tt = t + k - half;
          if (tt < 0 || tt >= N) continue;
          const double* xr = &x[std::size_t(tt) * F];
          const float* wr = &W[(std::size_t(c) * F) * K + k];
          for (int f = 0; f < F; ++f) acc += double(wr[std::size_t(f) * K]) * xr[f];
        }
        h[std::size_t(t) * H + c] = acc;
      }
    }
  }

  if (trace) {
    trace->frames = N;
    trace->input = x;
    trace->conv_out = h;
    trace->block_in.assign(lay.blocks.size(), {});
    trace->block_pre.assign(lay.blocks.size(), {});
    trace->block_sum.assign(lay.blocks.size(), {});
    trace->norm_xhat.assign(lay.blocks.size(), {});
    trace->norm_rstd.assign(lay.blocks.size(), {});
  }

  std::vector<double> pre(std::size_t(N) * 2 * H);
  for (std::size_t b = 0; b < lay.blocks.size(); ++b) {
    const auto& blk = lay.blocks[b];
    const float* W = blk.lin_w->values.data();
    const float* Bv = blk.lin_b->values.data();
    if (trace) trace->block_in[b] = h;

    for (int t = 0; t < N; ++t) {
      const double* hr = &h[std::size_t(t) * H];
      double* pr = &pre[std::size_t(t) * 2 * H];
      for (int o = 0; o < 2 * H; ++o) {
        double acc = double(Bv[o]);
        const float* wr = &W[std::size_t(o) * H];
        for (int j = 0; j < H; ++j) acc += double(wr[j]) * hr[j];
        pr[o] = acc;
      }
    }
    if (trace) trace->block_pre[b] = pre;

    // Gated linear unit + residual, then layer normalization.
    std::vector<double> sum(std::size_t(N) * H);
    for (int t = 0; t < N; ++t) {
      const double* pr = &pre[std::size_t(t) * 2 * H];
      const double* hr = &h[std::size_t(t) * H];
      double* sr = &sum[std::size_t(t) * H];
      for (int j = 0; j < H; ++j)
        sr[j] = hr[j] + pr[j] * sigmoid(pr[H + j]);
    }
    if (trace) trace->block_sum[b] = sum;

    const float* G = blk.gamma->values.data();
    const float* Be = blk.beta->values.data();
    std::vector<double> xhat;
    std::vector<double> rstd(N);
    if (trace) xhat.resize(std::size_t(N) * H);
    for (int t = 0; t < N; ++t) {
      double* sr = &sum[std::size_t(t) * H];
      double mean = 0.0;
      for (int j = 0; j < H; ++j) mean += sr[j];
      mean /= H;
      double var = 0.0;
      for (int j = 0; j < H; ++j) {
        const double d = sr[j] - mean;
        var += d * d;
      }
      var /= H;
      const double r = 1.0 / std::sqrt(var + kNormEps);
      rstd[t] = r;
      double* out = &h[std::size_t(t) * H];
      for (int j = 0; j < H; ++j) {
        const double xh = (sr[j] - mean) * r;
        if (trace) xhat[std::size_t(t) * H + j] = xh;
        out[j] = double(G[j]) * xh + double(Be[j]);
      }
    }
    if (trace) {
      trace->norm_xhat[b] = std::move(xhat);
      trace->norm_rstd[b] = std::move(rstd);
    }
  }

  if (trace) trace->final_out = h;

  LogProbs lp;
  lp.frames = N;
  lp.alphabet = A;
  lp.v.resize(std::size_t(N) * A);
  {
    const float* W = lay.head_w->values.data();
    const float* B = lay.head_b->values.data();
    for (int t = 0; t < N; ++t) {
      const double* hr = &h[std::size_t(t) * H];
      double* row = &lp.v[std::size_t(t) * A];
      for (int a = 0; a < A; ++a) {
        double acc = double(B[a]);
        const float* wr = &W[std::size_t(a) * H];
        for (int j = 0; j < H; ++j) acc += double(wr[j]) * hr[j];
        row[a] = acc;
      }
      double mx = row[0];
      for (int a = 1; a < A; ++a) mx = std::max(mx, row[a]);
      double z = 0.0;
      for (int a = 0; a < A; ++a) z += std::exp(row[a] - mx);
      const double lse = mx + std::log(z);
      for (int a = 0; a < A; ++a) row[a] -= lse;
    }
  }
  if (trace) trace->logprobs = lp;
  return lp;
}

}  // namespace

LogProbs forward(const ModelState& state, const FeatureSequence& seq) {
  return run_forward(state, seq, nullptr);
}

LogProbs forward(const ModelState& state, const FeatureSequence& seq,
                 ForwardTrace& trace) {
  return run_forward(state, seq, &trace);
}

void backward(const ModelState& state, const ForwardTrace& trace,
              const std::vector<double>& dlogprob, GradientSet& grads) {
  const Layout lay = layout_of(state);
  const int N = trace.frames, F = lay.cfg.feature_dim, H = lay.cfg.hidden_dim,
            A = lay.cfg.alphabet_size, K = lay.cfg.conv_kernel;
  if (!grads.matches(state))
    throw std::invalid_argument("backward: gradient set does not match state");
  if (dlogprob.size() != std::size_t(N) * A)
    throw std::invalid_argument("backward: dlogprob size mismatch");

  // Through log-softmax: dlogit = g - exp(logprob) * sum(g).
  std::vector<double> dlogit(std::size_t(N) * A);
  for (int t = 0; t < N; ++t) {
    const double* g = &dlogprob[std::size_t(t) * A];
    const double* lp = &trace.logprobs.v[std::size_t(t) * A];
    double gs = 0.0;
    for (int a = 0; a < A; ++a) gs += g[a];
    double* dl = &dlogit[std::size_t(t) * A];
    for (int a = 0; a < A; ++a) dl[a] = g[a] - std::exp(lp[a]) * gs;
  }

  // Head.
  std::vector<double> dh(std::size_t(N) * H, 0.0);
  {
    const float* W = lay.head_w->values.data();
    auto& dW = grads[grads.index_of("head.weight")];
    auto& dB = grads[grads.index_of("head.bias")];
    for (int t = 0; t < N; ++t) {
      const double* dl = &dlogit[std::size_t(t) * A];
      const double* hr = &trace.final_out[std::size_t(t) * H];
      double* dhr = &dh[std::size_t(t) * H];
      for (int a = 0; a < A; ++a) {
        const double c = dl[a];
        dB[a] += c;
        double* dwr = &dW[std::size_t(a) * H];
        const float* wr = &W[std::size_t(a) * H];
        for (int j = 0; j < H; ++j) {
          dwr[j] += c * hr[j];
          dhr[j] += double(wr[j]) * c;
        }
      }
    }
  }

  // Blocks in reverse.
  for (int b = int(lay.blocks.size()) - 1; b >= 0; --b) {
    const auto& blk = lay.blocks[b];
    const std::string p = "block" + std::to_string(b) + ".";
    auto& dG = grads[grads.index_of(p + "norm.gamma")];
    auto& dBe = grads[grads.index_of(p + "norm.beta")];
    auto& dW = grads[grads.index_of(p + "lin.weight")];
    auto& dBv = grads[grads.index_of(p + "lin.bias")];
    const float* G = blk.gamma->values.data();
    const float* W = blk.lin_w->values.data();

    const auto& xhat = trace.norm_xhat[b];
    const auto& rstd = trace.norm_rstd[b];
    const auto& pre = trace.block_pre[b];
    const auto& bin = trace.block_in[b];

    std::vector<double> dsum(std::size_t(N) * H);
    for (int t = 0; t < N; ++t) {
      const double* go = &dh[std::size_t(t) * H];  // grad at block output
      const double* xh = &xhat[std::size_t(t) * H];
      double m1 = 0.0, m2 = 0.0;
      for (int j = 0; j < H; ++j) {
        const double gg = double(G[j]) * go[j];
        dG[j] += go[j] * xh[j];
        dBe[j] += go[j];
        m1 += gg;
        m2 += gg * xh[j];
      }
      m1 /= H;
      m2 /= H;
      double* ds = &dsum[std::size_t(t) * H];
      const double r = rstd[t];
      for (int j = 0; j < H; ++j)
        ds[j] = r * (double(G[j]) * go[j] - m1 - xh[j] * m2);
    }

    // Residual + GLU. dsum feeds both the block input and the linear path.
    std::vector<double> dhin(std::size_t(N) * H, 0.0);
    for (int t = 0; t < N; ++t) {
      const double* ds = &dsum[std::size_t(t) * H];
      const double* pr = &pre[std::size_t(t) * 2 * H];
      const double* hr = &bin[std::size_t(t) * H];
      double* dhi = &dhin[std::size_t(t) * H];

      double dpre[2];  // assembled per unit below
      for (int j = 0; j < H; ++j) {
        const double s = sigmoid(pr[H + j]);
        const double da = ds[j] * s;
        const double dg = ds[j] * pr[j] * s * (1.0 - s);
        dpre[0] = da;
        dpre[1] = dg;
        dBv[j] += da;
        dBv[H + j] += dg;
        double* dwa = &dW[std::size_t(j) * H];
        double* dwg = &dW[std::size_t(H + j) * H];
        const float* wa = &W[std::size_t(j) * H];
        const float* wg = &W[std::size_t(H + j) * H];
        for (int i = 0; i < H; ++i) {
          dwa[i] += dpre[0] * hr[i];
          dwg[i] += dpre[1] * hr[i];
          dhi[i] += double(wa[i]) * dpre[0] + double(wg[i]) * dpre[1];
        }
        dhi[j] += ds[j];  // residual branch
      }
    }
    dh = std::move(dhin);
  }

  // Frontend convolution.
  {
    auto& dW = grads[grads.index_of("frontend.weight")];
    auto& dB = grads[grads.index_of("frontend.bias")];
    const int half = K / 2;
    for (int t = 0; t < N; ++t) {
      const double* dc = &dh[std::size_t(t) * H];
      for (int c = 0; c < H; ++c) {
        const double g = dc[c];
        dB[c] += g;
        for (int k = 0; k < K; ++k) {
          const int tt = t + k - half;
          if (tt < 0 || tt >= N) continue;
          const double* xr = &trace.input[std::size_t(tt) * F];
          double* dwr = &dW[(std::size_t(c) * F) * K + k];
          for (int f = 0; f < F; ++f) dwr[std::size_t(f) * K] += g * xr[f];
        }
      }
    }
  }
}

}  // namespace prunelab
