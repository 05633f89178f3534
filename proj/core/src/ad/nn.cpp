#include "hpc/ad/nn.hpp"

#include <cmath>

namespace hpc::ad {

Tensor& ParamStore::add(const std::string& name, Tensor t) {
  if (find(name)) throw TensorError("duplicate parameter name: " + name);
  t.set_name(name);
  items_.emplace_back(name, std::move(t));
  return items_.back().second;
}

Tensor* ParamStore::find(const std::string& name) {
  for (auto& [n, t] : items_)
    if (n == name) return &t;
  return nullptr;
}

const Tensor* ParamStore::find(const std::string& name) const {
  for (auto& [n, t] : items_)
    if (n == name) return &t;
  return nullptr;
}

std::vector<Tensor> ParamStore::tensors() const {
  std::vector<Tensor> out;
  out.reserve(items_.size());
  for (const auto& kv : items_) out.push_back(kv.second);
  return out;
}

int64_t ParamStore::total_params() const {
  int64_t n = 0;
  for (const auto& kv : items_) n += kv.second.numel();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& kv : items_) kv.second.zero_grad();
}

void init_kaiming_uniform(Tensor& w, int fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / fan_in);
  for (auto& v : w.data()) v = rng.uniform(-bound, bound);
}

void init_orthogonal(Tensor& w, double gain, Rng& rng) {
  if (w.shape().size() != 2) throw TensorError("init_orthogonal: need rank-2");
  const int m = w.rows(), n = w.cols();
  // Orthonormalise the shorter side with modified Gram-Schmidt on a
  // Gaussian matrix, retrying a column in the degenerate case.
  const int rows = std::max(m, n), cols = std::min(m, n);
  std::vector<double> q(static_cast<size_t>(rows) * cols);
  for (int j = 0; j < cols; ++j) {
    for (;;) {
      for (int i = 0; i < rows; ++i) q[static_cast<size_t>(i) * cols + j] = rng.normal();
      for (int k = 0; k < j; ++k) {
        double dot = 0.0;
        for (int i = 0; i < rows; ++i)
          dot += q[static_cast<size_t>(i) * cols + j] * q[static_cast<size_t>(i) * cols + k];
        for (int i = 0; i < rows; ++i)
          q[static_cast<size_t>(i) * cols + j] -= dot * q[static_cast<size_t>(i) * cols + k];
      }
      double norm = 0.0;
      for (int i = 0; i < rows; ++i) {
        const double v = q[static_cast<size_t>(i) * cols + j];
        norm += v * v;
      }
      if (norm > 1e-12) {
        const double inv = 1.0 / std::sqrt(norm);
        for (int i = 0; i < rows; ++i) q[static_cast<size_t>(i) * cols + j] *= inv;
        break;
      }
    }
  }
  auto out = w.data();
  if (m >= n) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) out[static_cast<size_t>(i) * n + j] = gain * q[static_cast<size_t>(i) * n + j];
  } else {
    // transpose of the tall factor
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) out[static_cast<size_t>(i) * n + j] = gain * q[static_cast<size_t>(j) * m + i];
  }
}

Linear Linear::create(ParamStore& store, const std::string& name, int in, int out, Rng& rng,
                      double w_scale) {
  Linear l;
  Tensor w = Tensor::zeros({in, out}, true);
  init_kaiming_uniform(w, in, rng);
  if (w_scale != 1.0)
    for (auto& v : w.data()) v *= w_scale;
  l.w = store.add(name + ".w", std::move(w));
  l.b = store.add(name + ".b", Tensor::zeros({out}, true));
  return l;
}

Tensor Linear::forward(const Tensor& x) const { return add(matmul(x, w), b); }

LayerNormModule LayerNormModule::create(ParamStore& store, const std::string& name, int dim) {
  LayerNormModule ln;
  ln.gain = store.add(name + ".gain", Tensor::full({dim}, 1.0, true));
  ln.bias = store.add(name + ".bias", Tensor::zeros({dim}, true));
  return ln;
}

Tensor LayerNormModule::forward(const Tensor& x) const { return layer_norm(x, gain, bias); }

Mlp Mlp::create(ParamStore& store, const std::string& name, const std::vector<int>& dims,
                Activation act, bool layer_norm, Rng& rng, double last_layer_scale) {
  if (dims.size() < 2) throw TensorError("Mlp: need at least in/out dims");
  Mlp m;
  m.hidden_act = act;
  m.layer_norm = layer_norm;
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    const bool last = i + 2 == dims.size();
    m.layers.push_back(Linear::create(store, name + ".fc" + std::to_string(i), dims[i],
                                      dims[i + 1], rng, last ? last_layer_scale : 1.0));
    if (layer_norm && !last)
      m.norms.push_back(LayerNormModule::create(store, name + ".ln" + std::to_string(i),
                                                dims[i + 1]));
  }
  return m;
}

Tensor Mlp::forward(const Tensor& x) const {
  Tensor h = x;
  for (size_t i = 0; i < layers.size(); ++i) {
    h = layers[i].forward(h);
    if (i + 1 == layers.size()) break;
    if (layer_norm) h = norms[i].forward(h);
    switch (hidden_act) {
      case Activation::kTanh: h = tanh(h); break;
      case Activation::kRelu: h = relu(h); break;
      case Activation::kNone: break;
    }
  }
  return h;
}

LstmState LstmState::zeros(int batch, int hidden) {
  return {Tensor::zeros({batch, hidden}), Tensor::zeros({batch, hidden})};
}

Lstm Lstm::create(ParamStore& store, const std::string& name, int input, int hidden, Rng& rng) {
  Lstm l;
  l.input_size = input;
  l.hidden = hidden;
  Tensor wx = Tensor::zeros({input, 4 * hidden}, true);
  init_kaiming_uniform(wx, input, rng);
  Tensor wh = Tensor::zeros({hidden, 4 * hidden}, true);
  // orthogonal per gate block keeps the recurrent dynamics well conditioned
  for (int g = 0; g < 4; ++g) {
    Tensor blk = Tensor::zeros({hidden, hidden});
    init_orthogonal(blk, 1.0, rng);
    auto src = blk.data();
    auto dst = wh.data();
    for (int i = 0; i < hidden; ++i)
      for (int j = 0; j < hidden; ++j)
        dst[static_cast<size_t>(i) * 4 * hidden + g * hidden + j] =
            src[static_cast<size_t>(i) * hidden + j];
  }
  Tensor bias = Tensor::zeros({4 * hidden}, true);
  for (int j = hidden; j < 2 * hidden; ++j) bias.data()[j] = 1.0;  // forget gate
  l.w_x = store.add(name + ".w_x", std::move(wx));
  l.w_h = store.add(name + ".w_h", std::move(wh));
  l.b = store.add(name + ".b", std::move(bias));
  return l;
}

LstmState Lstm::step(const Tensor& x, const LstmState& s) const {
  Tensor gates = add(add(matmul(x, w_x), matmul(s.h, w_h)), b);
  Tensor i = sigmoid(slice_cols(gates, 0, hidden));
  Tensor f = sigmoid(slice_cols(gates, hidden, 2 * hidden));
  Tensor g = tanh(slice_cols(gates, 2 * hidden, 3 * hidden));
  Tensor o = sigmoid(slice_cols(gates, 3 * hidden, 4 * hidden));
  Tensor c = add(mul(f, s.c), mul(i, g));
  Tensor h = mul(o, tanh(c));
  return {h, c};
}

LstmSeqOut lstm_forward(const Lstm& fwd, const Tensor& x_seq, const LstmState& s0,
                        const Lstm* bwd) {
  if (x_seq.shape().size() != 2 || x_seq.cols() != fwd.input_size)
    throw TensorError("lstm_forward: expected [T," + std::to_string(fwd.input_size) +
                      "], got " + shape_str(x_seq.shape()));
  const int t_len = x_seq.rows();
  std::vector<Tensor> fwd_out(t_len);
  LstmState s = s0;
  for (int t = 0; t < t_len; ++t) {
    s = fwd.step(slice_rows(x_seq, t, t + 1), s);
    fwd_out[t] = s.h;
  }
  LstmState final_state = s;
  if (!bwd) {
    Tensor out = concat(std::span<const Tensor>(fwd_out.data(), fwd_out.size()), 0);
    return {out, final_state};
  }
  std::vector<Tensor> joined(t_len);
  LstmState sb = LstmState::zeros(1, bwd->hidden);
  for (int t = t_len - 1; t >= 0; --t) {
    sb = bwd->step(slice_rows(x_seq, t, t + 1), sb);
    std::vector<Tensor> pair{fwd_out[t], sb.h};
    joined[t] = concat(std::span<const Tensor>(pair.data(), pair.size()), 1);
  }
  Tensor out = concat(std::span<const Tensor>(joined.data(), joined.size()), 0);
  return {out, final_state};
}

double clip_grad_norm(const std::vector<Tensor>& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params)
    for (double g : p.grad()) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (const auto& p : params) {
      auto n = p.node();
      for (auto& g : n->grad) g *= scale;
    }
  }
  return norm;
}

}  // namespace hpc::ad
