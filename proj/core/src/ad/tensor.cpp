#include "hpc/ad/tensor.hpp"

#include <atomic>
#include <cmath>
#include <unordered_set>

namespace hpc::ad {

namespace {

std::atomic<uint64_t> g_next_id{1};
thread_local bool g_grad_enabled = true;

int64_t shape_numel(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  return n;
}

void check_shape(const std::vector<int>& shape) {
  if (shape.empty() || shape.size() > 2)
    throw TensorError("tensor rank must be 1 or 2, got " + shape_str(shape));
  for (int d : shape)
    if (d <= 0) throw TensorError("tensor dims must be positive, got " + shape_str(shape));
}

// C[m,n] += A[m,k] * B[k,n]
void gemm_accum(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<size_t>(i) * k;
    double* crow = c + static_cast<size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      const double* brow = b + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// dA[m,k] += dC[m,n] * B[k,n]^T
void gemm_accum_bt(const double* dc, const double* b, double* da, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* dcrow = dc + static_cast<size_t>(i) * n;
    double* darow = da + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double* brow = b + static_cast<size_t>(p) * n;
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += dcrow[j] * brow[j];
      darow[p] += s;
    }
  }
}

// dB[k,n] += A[m,k]^T * dC[m,n]
void gemm_accum_at(const double* a, const double* dc, double* db, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<size_t>(i) * k;
    const double* dcrow = dc + static_cast<size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      double* dbrow = db + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) dbrow[j] += av * dcrow[j];
    }
  }
}

using Node = Tensor::Node;

std::shared_ptr<Node> make_node(std::vector<int> shape, std::vector<std::shared_ptr<Node>> parents) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value.resize(static_cast<size_t>(shape_numel(n->shape)));
  n->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
  if (g_grad_enabled) {
    for (const auto& p : parents)
      if (p->requires_grad) n->requires_grad = true;
    n->parents = std::move(parents);
  }
  return n;
}

}  // namespace

std::string shape_str(const std::vector<int>& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

double* Tensor::Node::grad_data() {
  if (grad.empty()) grad.assign(value.size(), 0.0);
  return grad.data();
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
  check_shape(shape);
  auto n = make_node(std::move(shape), {});
  n->requires_grad = requires_grad;
  return wrap(n);
}

Tensor Tensor::full(std::vector<int> shape, double v, bool requires_grad) {
  Tensor t = zeros(std::move(shape), requires_grad);
  for (auto& x : t.data()) x = v;
  return t;
}

Tensor Tensor::from(std::vector<double> data, std::vector<int> shape, bool requires_grad) {
  check_shape(shape);
  if (static_cast<int64_t>(data.size()) != shape_numel(shape))
    throw TensorError("from: " + std::to_string(data.size()) + " values for shape " +
                      shape_str(shape));
  auto n = make_node(std::move(shape), {});
  n->value = std::move(data);
  n->requires_grad = requires_grad;
  return wrap(n);
}

Tensor Tensor::scalar(double v) { return from({v}, {1}); }

const std::vector<int>& Tensor::shape() const { return node_->shape; }
int64_t Tensor::numel() const { return node_->numel(); }
int Tensor::rows() const { return node_->shape[0]; }
int Tensor::cols() const { return node_->shape.size() == 2 ? node_->shape[1] : 1; }
bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }
const std::string& Tensor::name() const { return node_->name; }
void Tensor::set_name(std::string name) { node_->name = std::move(name); }

std::span<double> Tensor::data() { return {node_->value.data(), node_->value.size()}; }
std::span<const double> Tensor::data() const { return {node_->value.data(), node_->value.size()}; }

std::span<const double> Tensor::grad() const {
  const_cast<Node*>(node_.get())->grad_data();
  return {node_->grad.data(), node_->grad.size()};
}

double Tensor::item() const {
  if (numel() != 1) throw TensorError("item: tensor has shape " + shape_str(shape()));
  return node_->value[0];
}

void Tensor::zero_grad() {
  if (node_ && !node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::detach() const {
  auto n = make_node(node_->shape, {});
  n->value = node_->value;
  return wrap(n);
}

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }
bool grad_enabled() { return g_grad_enabled; }

void backward(const Tensor& loss) {
  auto root = loss.node();
  if (!root) throw TensorError("backward: undefined tensor");
  if (root->numel() != 1)
    throw TensorError("backward: loss must be scalar, got shape " + shape_str(root->shape));
  if (!root->requires_grad)
    throw TensorError("backward: loss does not depend on any trainable tensor");

  // Post-order over the requires_grad subgraph; each node visited once.
  std::vector<Node*> order;
  std::unordered_set<const Node*> seen;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(root.get(), 0);
  seen.insert(root.get());
  while (!stack.empty()) {
    auto [n, idx] = stack.back();
    if (idx < n->parents.size()) {
      ++stack.back().second;
      Node* p = n->parents[idx].get();
      if (p->requires_grad && !seen.count(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  root->grad_data()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backprop) (*it)->backprop();
}

// ---- op helpers --------------------------------------------------------

namespace {

Tensor unary(const Tensor& a, std::vector<int> shape, const char* /*tag*/,
             std::function<void(const Node&, Node&)> fwd,
             std::function<void(Node&, Node&)> bwd) {
  auto out = make_node(std::move(shape), {a.node()});
  fwd(*a.node(), *out);
  if (out->requires_grad) {
    Node* self = out.get();
    Node* x = a.node().get();
    out->backprop = [self, x, bwd] { bwd(*self, *x); };
  }
  return Tensor::wrap(out);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw TensorError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                      shape_str(b.shape()));
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2)
    throw TensorError("matmul: need rank-2 operands, got " + shape_str(a.shape()) + " and " +
                      shape_str(b.shape()));
  const int m = a.shape()[0], k = a.shape()[1], k2 = b.shape()[0], n = b.shape()[1];
  if (k != k2)
    throw TensorError("matmul: inner dims differ, " + shape_str(a.shape()) + " x " +
                      shape_str(b.shape()));
  auto out = make_node({m, n}, {a.node(), b.node()});
  gemm_accum(a.data().data(), b.data().data(), out->value.data(), m, k, n);
  if (out->requires_grad) {
    Node* self = out.get();
    Node* na = a.node().get();
    Node* nb = b.node().get();
    out->backprop = [self, na, nb, m, k, n] {
      const double* dc = self->grad_data();
      if (na->requires_grad) gemm_accum_bt(dc, nb->value.data(), na->grad_data(), m, k, n);
      if (nb->requires_grad) gemm_accum_at(na->value.data(), dc, nb->grad_data(), m, k, n);
    };
  }
  return Tensor::wrap(out);
}

Tensor add(const Tensor& a, const Tensor& b) {
  const bool broadcast = a.shape().size() == 2 && b.shape().size() == 1 &&
                         b.shape()[0] == a.shape()[1];
  if (!broadcast) require_same_shape(a, b, "add");
  auto out = make_node(a.shape(), {a.node(), b.node()});
  const int m = a.rows(), n = a.cols();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  if (broadcast) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) out->value[i * n + j] = pa[i * n + j] + pb[j];
  } else {
    for (int64_t i = 0; i < out->numel(); ++i) out->value[i] = pa[i] + pb[i];
  }
  if (out->requires_grad) {
    Node* self = out.get();
    Node* na = a.node().get();
    Node* nb = b.node().get();
    out->backprop = [self, na, nb, broadcast, m, n] {
      const double* g = self->grad_data();
      if (na->requires_grad) {
        double* da = na->grad_data();
        for (int64_t i = 0; i < self->numel(); ++i) da[i] += g[i];
      }
      if (nb->requires_grad) {
        double* db = nb->grad_data();
        if (broadcast) {
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) db[j] += g[i * n + j];
        } else {
          for (int64_t i = 0; i < self->numel(); ++i) db[i] += g[i];
        }
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  auto out = make_node(a.shape(), {a.node(), b.node()});
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (int64_t i = 0; i < out->numel(); ++i) out->value[i] = pa[i] - pb[i];
  if (out->requires_grad) {
    Node* self = out.get();
    Node* na = a.node().get();
    Node* nb = b.node().get();
    out->backprop = [self, na, nb] {
      const double* g = self->grad_data();
      if (na->requires_grad) {
        double* da = na->grad_data();
        for (int64_t i = 0; i < self->numel(); ++i) da[i] += g[i];
      }
      if (nb->requires_grad) {
        double* db = nb->grad_data();
        for (int64_t i = 0; i < self->numel(); ++i) db[i] -= g[i];
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  auto out = make_node(a.shape(), {a.node(), b.node()});
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (int64_t i = 0; i < out->numel(); ++i) out->value[i] = pa[i] * pb[i];
  if (out->requires_grad) {
    Node* self = out.get();
    Node* na = a.node().get();
    Node* nb = b.node().get();
    out->backprop = [self, na, nb] {
      const double* g = self->grad_data();
      if (na->requires_grad) {
        double* da = na->grad_data();
        for (int64_t i = 0; i < self->numel(); ++i) da[i] += g[i] * nb->value[i];
      }
      if (nb->requires_grad) {
        double* db = nb->grad_data();
        for (int64_t i = 0; i < self->numel(); ++i) db[i] += g[i] * na->value[i];
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary(a, a.shape(), "add_scalar",
               [s](const Node& x, Node& y) {
                 for (int64_t i = 0; i < y.numel(); ++i) y.value[i] = x.value[i] + s;
               },
               [](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int64_t i = 0; i < self.numel(); ++i) dx[i] += g[i];
               });
}

Tensor mul_scalar(const Tensor& a, double s) {
  return unary(a, a.shape(), "mul_scalar",
               [s](const Node& x, Node& y) {
                 for (int64_t i = 0; i < y.numel(); ++i) y.value[i] = x.value[i] * s;
               },
               [s](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int64_t i = 0; i < self.numel(); ++i) dx[i] += g[i] * s;
               });
}

Tensor neg(const Tensor& a) { return mul_scalar(a, -1.0); }

Tensor tanh(const Tensor& a) {
  return unary(a, a.shape(), "tanh",
               [](const Node& x, Node& y) {
                 for (int64_t i = 0; i < y.numel(); ++i) y.value[i] = std::tanh(x.value[i]);
               },
               [](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int64_t i = 0; i < self.numel(); ++i) {
                   const double y = self.value[i];
                   dx[i] += g[i] * (1.0 - y * y);
                 }
               });
}

Tensor sigmoid(const Tensor& a) {
  return unary(a, a.shape(), "sigmoid",
               [](const Node& x, Node& y) {
                 for (int64_t i = 0; i < y.numel(); ++i)
                   y.value[i] = 1.0 / (1.0 + std::exp(-x.value[i]));
               },
               [](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int64_t i = 0; i < self.numel(); ++i) {
                   const double y = self.value[i];
                   dx[i] += g[i] * y * (1.0 - y);
                 }
               });
}

Tensor relu(const Tensor& a) {
  return unary(a, a.shape(), "relu",
               [](const Node& x, Node& y) {
                 for (int64_t i = 0; i < y.numel(); ++i)
                   y.value[i] = x.value[i] > 0.0 ? x.value[i] : 0.0;
               },
               [](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int64_t i = 0; i < self.numel(); ++i)
                   if (x.value[i] > 0.0) dx[i] += g[i];
               });
}

Tensor exp(const Tensor& a) {
  return unary(a, a.shape(), "exp",
               [](const Node& x, Node& y) {
                 for (int64_t i = 0; i < y.numel(); ++i) y.value[i] = std::exp(x.value[i]);
               },
               [](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int64_t i = 0; i < self.numel(); ++i) dx[i] += g[i] * self.value[i];
               });
}

Tensor log(const Tensor& a) {
  for (int64_t i = 0; i < a.numel(); ++i)
    if (a.data()[i] <= 0.0)
      throw TensorError("log: non-positive input " + std::to_string(a.data()[i]) +
                        " at index " + std::to_string(i));
  return unary(a, a.shape(), "log",
               [](const Node& x, Node& y) {
                 for (int64_t i = 0; i < y.numel(); ++i) y.value[i] = std::log(x.value[i]);
               },
               [](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int64_t i = 0; i < self.numel(); ++i) dx[i] += g[i] / x.value[i];
               });
}

Tensor square(const Tensor& a) { return mul(a, a); }

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (lo > hi) throw TensorError("clamp: lo > hi");
  return unary(a, a.shape(), "clamp",
               [lo, hi](const Node& x, Node& y) {
                 for (int64_t i = 0; i < y.numel(); ++i)
                   y.value[i] = x.value[i] < lo ? lo : (x.value[i] > hi ? hi : x.value[i]);
               },
               [lo, hi](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int64_t i = 0; i < self.numel(); ++i)
                   if (x.value[i] >= lo && x.value[i] <= hi) dx[i] += g[i];
               });
}

Tensor minimum(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "minimum");
  auto out = make_node(a.shape(), {a.node(), b.node()});
  for (int64_t i = 0; i < out->numel(); ++i)
    out->value[i] = a.data()[i] <= b.data()[i] ? a.data()[i] : b.data()[i];
  if (out->requires_grad) {
    Node* self = out.get();
    Node* na = a.node().get();
    Node* nb = b.node().get();
    out->backprop = [self, na, nb] {
      const double* g = self->grad_data();
      for (int64_t i = 0; i < self->numel(); ++i) {
        if (na->value[i] <= nb->value[i]) {
          if (na->requires_grad) na->grad_data()[i] += g[i];
        } else if (nb->requires_grad) {
          nb->grad_data()[i] += g[i];
        }
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor maximum(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "maximum");
  auto out = make_node(a.shape(), {a.node(), b.node()});
  for (int64_t i = 0; i < out->numel(); ++i)
    out->value[i] = a.data()[i] >= b.data()[i] ? a.data()[i] : b.data()[i];
  if (out->requires_grad) {
    Node* self = out.get();
    Node* na = a.node().get();
    Node* nb = b.node().get();
    out->backprop = [self, na, nb] {
      const double* g = self->grad_data();
      for (int64_t i = 0; i < self->numel(); ++i) {
        if (na->value[i] >= nb->value[i]) {
          if (na->requires_grad) na->grad_data()[i] += g[i];
        } else if (nb->requires_grad) {
          nb->grad_data()[i] += g[i];
        }
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor softmax(const Tensor& a) {
  const int m = a.rows(), n = a.cols();
  return unary(a, a.shape(), "softmax",
               [m, n](const Node& x, Node& y) {
                 for (int i = 0; i < m; ++i) {
                   const double* row = x.value.data() + static_cast<size_t>(i) * n;
                   double* out = y.value.data() + static_cast<size_t>(i) * n;
                   double mx = row[0];
                   for (int j = 1; j < n; ++j) mx = std::max(mx, row[j]);
                   double z = 0.0;
                   for (int j = 0; j < n; ++j) z += (out[j] = std::exp(row[j] - mx));
                   for (int j = 0; j < n; ++j) out[j] /= z;
                 }
               },
               [m, n](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int i = 0; i < m; ++i) {
                   const double* y = self.value.data() + static_cast<size_t>(i) * n;
                   const double* gy = g + static_cast<size_t>(i) * n;
                   double dot = 0.0;
                   for (int j = 0; j < n; ++j) dot += gy[j] * y[j];
                   for (int j = 0; j < n; ++j) dx[i * n + j] += y[j] * (gy[j] - dot);
                 }
               });
}

Tensor sum(const Tensor& a) {
  return unary(a, {1}, "sum",
               [](const Node& x, Node& y) {
                 double s = 0.0;
                 for (double v : x.value) s += v;
                 y.value[0] = s;
               },
               [](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double g = self.grad_data()[0];
                 double* dx = x.grad_data();
                 for (int64_t i = 0; i < x.numel(); ++i) dx[i] += g;
               });
}

Tensor mean(const Tensor& a) {
  const double inv = 1.0 / static_cast<double>(a.numel());
  return unary(a, {1}, "mean",
               [inv](const Node& x, Node& y) {
                 double s = 0.0;
                 for (double v : x.value) s += v;
                 y.value[0] = s * inv;
               },
               [inv](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double g = self.grad_data()[0] * inv;
                 double* dx = x.grad_data();
                 for (int64_t i = 0; i < x.numel(); ++i) dx[i] += g;
               });
}

Tensor sum_rows(const Tensor& a) {
  if (a.shape().size() != 2) throw TensorError("sum_rows: need rank-2, got " + shape_str(a.shape()));
  const int m = a.rows(), n = a.cols();
  return unary(a, {m, 1}, "sum_rows",
               [m, n](const Node& x, Node& y) {
                 for (int i = 0; i < m; ++i) {
                   double s = 0.0;
                   const double* row = x.value.data() + static_cast<size_t>(i) * n;
                   for (int j = 0; j < n; ++j) s += row[j];
                   y.value[i] = s;
                 }
               },
               [m, n](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int i = 0; i < m; ++i)
                   for (int j = 0; j < n; ++j) dx[i * n + j] += g[i];
               });
}

Tensor concat(std::span<const Tensor> parts, int axis) {
  if (parts.empty()) throw TensorError("concat: no inputs");
  if (axis != 0 && axis != 1) throw TensorError("concat: axis must be 0 or 1");
  for (const auto& p : parts)
    if (p.shape().size() != 2)
      throw TensorError("concat: need rank-2 inputs, got " + shape_str(p.shape()));
  int m = parts[0].rows(), n = parts[0].cols();
  std::vector<std::shared_ptr<Node>> parents;
  for (const auto& p : parts) {
    parents.push_back(p.node());
    if (axis == 0 && p.cols() != n)
      throw TensorError("concat axis 0: column mismatch " + shape_str(p.shape()));
    if (axis == 1 && p.rows() != m)
      throw TensorError("concat axis 1: row mismatch " + shape_str(p.shape()));
  }
  int total = 0;
  for (const auto& p : parts) total += (axis == 0 ? p.rows() : p.cols());
  auto out = make_node(axis == 0 ? std::vector<int>{total, n} : std::vector<int>{m, total},
                       std::move(parents));
  if (axis == 0) {
    size_t off = 0;
    for (const auto& p : parts) {
      std::copy(p.data().begin(), p.data().end(), out->value.begin() + off);
      off += p.data().size();
    }
  } else {
    int col0 = 0;
    for (const auto& p : parts) {
      const int pc = p.cols();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < pc; ++j)
          out->value[static_cast<size_t>(i) * total + col0 + j] = p.data()[i * pc + j];
      col0 += pc;
    }
  }
  if (out->requires_grad) {
    Node* self = out.get();
    std::vector<Node*> srcs;
    for (const auto& p : parts) srcs.push_back(p.node().get());
    const int total_cols = (axis == 1) ? total : n;
    out->backprop = [self, srcs, axis, m, total_cols] {
      const double* g = self->grad_data();
      if (axis == 0) {
        size_t off = 0;
        for (Node* s : srcs) {
          if (s->requires_grad) {
            double* dx = s->grad_data();
            for (int64_t i = 0; i < s->numel(); ++i) dx[i] += g[off + i];
          }
          off += s->value.size();
        }
      } else {
        int col0 = 0;
        for (Node* s : srcs) {
          const int pc = s->shape[1];
          if (s->requires_grad) {
            double* dx = s->grad_data();
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < pc; ++j)
                dx[i * pc + j] += g[static_cast<size_t>(i) * total_cols + col0 + j];
          }
          col0 += pc;
        }
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor slice_cols(const Tensor& a, int begin, int end) {
  if (a.shape().size() != 2)
    throw TensorError("slice_cols: need rank-2, got " + shape_str(a.shape()));
  const int m = a.rows(), n = a.cols();
  if (begin < 0 || end > n || begin >= end)
    throw TensorError("slice_cols: bad range [" + std::to_string(begin) + "," +
                      std::to_string(end) + ") for " + shape_str(a.shape()));
  const int w = end - begin;
  return unary(a, {m, w}, "slice_cols",
               [m, n, w, begin](const Node& x, Node& y) {
                 for (int i = 0; i < m; ++i)
                   for (int j = 0; j < w; ++j)
                     y.value[i * w + j] = x.value[static_cast<size_t>(i) * n + begin + j];
               },
               [m, n, w, begin](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int i = 0; i < m; ++i)
                   for (int j = 0; j < w; ++j)
                     dx[static_cast<size_t>(i) * n + begin + j] += g[i * w + j];
               });
}

Tensor slice_rows(const Tensor& a, int begin, int end) {
  if (a.shape().size() != 2)
    throw TensorError("slice_rows: need rank-2, got " + shape_str(a.shape()));
  const int m = a.rows(), n = a.cols();
  if (begin < 0 || end > m || begin >= end)
    throw TensorError("slice_rows: bad range [" + std::to_string(begin) + "," +
                      std::to_string(end) + ") for " + shape_str(a.shape()));
  const int h = end - begin;
  return unary(a, {h, n}, "slice_rows",
               [n, h, begin](const Node& x, Node& y) {
                 std::copy_n(x.value.begin() + static_cast<size_t>(begin) * n,
                             static_cast<size_t>(h) * n, y.value.begin());
               },
               [n, h, begin](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int64_t i = 0; i < static_cast<int64_t>(h) * n; ++i)
                   dx[static_cast<size_t>(begin) * n + i] += g[i];
               });
}

Tensor reshape(const Tensor& a, std::vector<int> shape) {
  check_shape(shape);
  if (shape_numel(shape) != a.numel())
    throw TensorError("reshape: cannot view " + shape_str(a.shape()) + " as " + shape_str(shape));
  return unary(a, std::move(shape), "reshape",
               [](const Node& x, Node& y) { y.value = x.value; },
               [](Node& self, Node& x) {
                 if (!x.requires_grad) return;
                 const double* g = self.grad_data();
                 double* dx = x.grad_data();
                 for (int64_t i = 0; i < self.numel(); ++i) dx[i] += g[i];
               });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  if (x.shape().size() != 2) throw TensorError("layer_norm: need rank-2 input");
  const int m = x.rows(), n = x.cols();
  if (gain.shape() != std::vector<int>{n} || bias.shape() != std::vector<int>{n})
    throw TensorError("layer_norm: gain/bias must be [" + std::to_string(n) + "]");
  auto out = make_node(x.shape(), {x.node(), gain.node(), bias.node()});
  // Cache per-row inverse stddev and normalised values for the backward pass.
  auto xhat = std::make_shared<std::vector<double>>(static_cast<size_t>(m) * n);
  auto inv_std = std::make_shared<std::vector<double>>(m);
  {
    const double* px = x.data().data();
    const double* pg = gain.data().data();
    const double* pb = bias.data().data();
    for (int i = 0; i < m; ++i) {
      const double* row = px + static_cast<size_t>(i) * n;
      double mu = 0.0;
      for (int j = 0; j < n; ++j) mu += row[j];
      mu /= n;
      double var = 0.0;
      for (int j = 0; j < n; ++j) var += (row[j] - mu) * (row[j] - mu);
      var /= n;
      const double is = 1.0 / std::sqrt(var + eps);
      (*inv_std)[i] = is;
      for (int j = 0; j < n; ++j) {
        const double xh = (row[j] - mu) * is;
        (*xhat)[static_cast<size_t>(i) * n + j] = xh;
        out->value[static_cast<size_t>(i) * n + j] = pg[j] * xh + pb[j];
      }
    }
  }
  if (out->requires_grad) {
    Node* self = out.get();
    Node* nx = x.node().get();
    Node* ng = gain.node().get();
    Node* nb = bias.node().get();
    out->backprop = [self, nx, ng, nb, xhat, inv_std, m, n] {
      const double* g = self->grad_data();
      for (int i = 0; i < m; ++i) {
        const double* grow = g + static_cast<size_t>(i) * n;
        const double* xh = xhat->data() + static_cast<size_t>(i) * n;
        if (ng->requires_grad) {
          double* dg = ng->grad_data();
          for (int j = 0; j < n; ++j) dg[j] += grow[j] * xh[j];
        }
        if (nb->requires_grad) {
          double* db = nb->grad_data();
          for (int j = 0; j < n; ++j) db[j] += grow[j];
        }
        if (nx->requires_grad) {
          double* dx = nx->grad_data() + static_cast<size_t>(i) * n;
          const double* gv = ng->value.data();
          double s1 = 0.0, s2 = 0.0;
          for (int j = 0; j < n; ++j) {
            const double dxh = grow[j] * gv[j];
            s1 += dxh;
            s2 += dxh * xh[j];
          }
          s1 /= n;
          s2 /= n;
          const double is = (*inv_std)[i];
          for (int j = 0; j < n; ++j) {
            const double dxh = grow[j] * gv[j];
            dx[j] += is * (dxh - s1 - xh[j] * s2);
          }
        }
      }
    };
  }
  return Tensor::wrap(out);
}

bool all_finite(const Tensor& t) {
  for (double v : t.data())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace hpc::ad
