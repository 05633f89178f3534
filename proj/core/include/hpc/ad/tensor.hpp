#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hpc::ad {

struct TensorError : std::runtime_error {
  explicit TensorError(const std::string& what) : std::runtime_error(what) {}
};

// Define-by-run reverse-mode autodiff over float64 buffers. A Tensor is a
// shared handle to a graph node; ops record their inputs and a backprop
// closure. backward() on a scalar runs the closures once each in reverse
// topological order. Gradients accumulate until zero_grad().
//
// Shapes are rank 1 or 2, row-major. Broadcasting is deliberately narrow:
// add([m,n], [n]) broadcasts the vector over rows; everything else must
// match exactly and mismatches throw TensorError naming both shapes.
class Tensor {
 public:
  struct Node {
    std::vector<int> shape;
    std::vector<double> value;
    std::vector<double> grad;  // allocated on first use
    bool requires_grad = false;
    std::string name;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void()> backprop;
    uint64_t id = 0;

    int64_t numel() const { return static_cast<int64_t>(value.size()); }
    double* grad_data();  // lazily zero-initialises
  };

  Tensor() = default;

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
  static Tensor full(std::vector<int> shape, double v, bool requires_grad = false);
  static Tensor from(std::vector<double> data, std::vector<int> shape,
                     bool requires_grad = false);
  static Tensor scalar(double v);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int>& shape() const;
  int64_t numel() const;
  int rows() const;
  int cols() const;  // 1 for rank-1
  bool requires_grad() const;
  const std::string& name() const;
  void set_name(std::string name);

  std::span<double> data();
  std::span<const double> data() const;
  std::span<const double> grad() const;  // zeros if never touched
  double item() const;                   // numel()==1 only

  void zero_grad();
  // New leaf with a copy of the values, cut off from this graph.
  Tensor detach() const;

  std::shared_ptr<Node> node() const { return node_; }
  static Tensor wrap(std::shared_ptr<Node> n) {
    Tensor t;
    t.node_ = std::move(n);
    return t;
  }

 private:
  std::shared_ptr<Node> node_;
};

// Runs reverse-mode accumulation from a scalar loss. Throws TensorError if
// loss.numel() != 1 or any value in the graph is non-finite when checked by
// the caller; each node's backprop runs exactly once.
void backward(const Tensor& loss);

// While alive, new ops produce constants (no tape, no backprop closures).
// Rollouts and frozen-teacher inference run under this guard.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};
bool grad_enabled();

// ---- ops -------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);       // [m,k]x[k,n]
Tensor add(const Tensor& a, const Tensor& b);           // same shape or [m,n]+[n]
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);           // elementwise
Tensor add_scalar(const Tensor& a, double s);
Tensor mul_scalar(const Tensor& a, double s);
Tensor neg(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);                            // throws on non-positive input
Tensor square(const Tensor& a);
Tensor clamp(const Tensor& a, double lo, double hi);    // zero gradient outside
Tensor minimum(const Tensor& a, const Tensor& b);
Tensor maximum(const Tensor& a, const Tensor& b);
Tensor softmax(const Tensor& a);                        // rowwise
Tensor sum(const Tensor& a);                            // -> scalar [1]
Tensor mean(const Tensor& a);                           // -> scalar [1]
Tensor sum_rows(const Tensor& a);                       // [m,n] -> [m,1]
Tensor concat(std::span<const Tensor> parts, int axis); // rank-2, axis 0 or 1
Tensor slice_cols(const Tensor& a, int begin, int end); // [m,n] -> [m,end-begin]
Tensor slice_rows(const Tensor& a, int begin, int end);
Tensor reshape(const Tensor& a, std::vector<int> shape);
// Rowwise layer norm with learned gain/bias, fused forward and backward.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);

bool all_finite(const Tensor& t);

std::string shape_str(const std::vector<int>& shape);

}  // namespace hpc::ad
