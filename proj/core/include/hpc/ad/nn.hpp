#pragma once

#include <optional>

#include "hpc/ad/tensor.hpp"
#include "hpc/common/rng.hpp"

namespace hpc::ad {

// Ordered name -> parameter registry. Registration order is the checkpoint
// order, so identical construction sequences give identical files.
class ParamStore {
 public:
  Tensor& add(const std::string& name, Tensor t);
  Tensor* find(const std::string& name);
  const Tensor* find(const std::string& name) const;
  const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
  std::vector<Tensor> tensors() const;
  int64_t total_params() const;
  void zero_grad();

 private:
  std::vector<std::pair<std::string, Tensor>> items_;
};

// Kaiming-uniform: U(-b, b) with b = sqrt(6 / fan_in).
void init_kaiming_uniform(Tensor& w, int fan_in, Rng& rng);
// Orthogonal rows/cols via Gram-Schmidt on a Gaussian draw, scaled by gain.
void init_orthogonal(Tensor& w, double gain, Rng& rng);

enum class Activation { kTanh, kRelu, kNone };

struct Linear {
  Tensor w;  // [in, out]
  Tensor b;  // [out]

  static Linear create(ParamStore& store, const std::string& name, int in, int out, Rng& rng,
                       double w_scale = 1.0);
  Tensor forward(const Tensor& x) const;  // [B,in] -> [B,out]
};

struct LayerNormModule {
  Tensor gain, bias;

  static LayerNormModule create(ParamStore& store, const std::string& name, int dim);
  Tensor forward(const Tensor& x) const;
};

// Fully connected stack; optional layer norm before each hidden activation.
struct Mlp {
  std::vector<Linear> layers;
  std::vector<LayerNormModule> norms;  // empty unless layer_norm
  Activation hidden_act = Activation::kTanh;
  bool layer_norm = false;

  // dims = {in, h1, ..., out}; the final layer is affine (no activation).
  static Mlp create(ParamStore& store, const std::string& name, const std::vector<int>& dims,
                    Activation act, bool layer_norm, Rng& rng, double last_layer_scale = 1.0);
  Tensor forward(const Tensor& x) const;
};

struct LstmState {
  Tensor h, c;  // [B, hidden]

  static LstmState zeros(int batch, int hidden);
  LstmState detached() const { return {h.detach(), c.detach()}; }
};

// Single-layer LSTM cell. Gate order along the 4h axis: input, forget,
// cell, output. Forget-gate bias starts at 1.
struct Lstm {
  int input_size = 0, hidden = 0;
  Tensor w_x;  // [in, 4h]
  Tensor w_h;  // [h, 4h]
  Tensor b;    // [4h]

  static Lstm create(ParamStore& store, const std::string& name, int input, int hidden, Rng& rng);
  LstmState step(const Tensor& x, const LstmState& s) const;  // x [B,in]
};

// Runs a sequence given as rows of x_seq [T, d_in] through the cell(s),
// one timestep per row. Bidirectional pairs a second cell running the
// sequence reversed; output rows are then [fwd | bwd] with width 2*hidden.
struct LstmSeqOut {
  Tensor outputs;  // [T, d_h] or [T, 2*d_h]
  LstmState final_state;  // forward direction
};
LstmSeqOut lstm_forward(const Lstm& fwd, const Tensor& x_seq, const LstmState& s0,
                        const Lstm* bwd = nullptr);

// Global L2 norm of all parameter gradients; if it exceeds max_norm the
// gradients are scaled down in place. Returns the pre-clip norm.
double clip_grad_norm(const std::vector<Tensor>& params, double max_norm);

}  // namespace hpc::ad
