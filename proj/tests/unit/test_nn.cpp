#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"

#include "gradcheck.hpp"
#include "hpc/ad/adam.hpp"
#include "hpc/ad/checkpoint.hpp"
#include "hpc/ad/nn.hpp"

using namespace hpc;
using ad::Tensor;

namespace {

std::filesystem::path temp_file(const char* stem) {
  auto p = std::filesystem::temp_directory_path() / stem;
  std::filesystem::remove(p);
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("nn");

TEST_CASE("param store keeps registration order and rejects duplicates") {
  ad::ParamStore store;
  store.add("b", Tensor::zeros({2}, true));
  store.add("a", Tensor::zeros({3}, true));
  REQUIRE(store.items().size() == 2);
  CHECK(store.items()[0].first == "b");
  CHECK(store.items()[1].first == "a");
  CHECK(store.total_params() == 5);
  CHECK(store.find("a") != nullptr);
  CHECK(store.find("missing") == nullptr);
  CHECK_THROWS_AS(store.add("a", Tensor::zeros({1}, true)), ad::TensorError);
}

TEST_CASE("kaiming uniform stays inside the fan-in bound") {
  Rng rng(11);
  Tensor w = Tensor::zeros({64, 32}, true);
  ad::init_kaiming_uniform(w, 64, rng);
  const double bound = std::sqrt(6.0 / 64.0);
  double lo = 1e9, hi = -1e9;
  for (double v : w.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= -bound);
  CHECK(hi <= bound);
  CHECK(hi > bound * 0.8);   // actually fills the range
  CHECK(lo < -bound * 0.8);
}

TEST_CASE("orthogonal init gives orthonormal rows scaled by gain") {
  Rng rng(12);
  Tensor w = Tensor::zeros({8, 24}, true);
  ad::init_orthogonal(w, 2.0, rng);
  auto d = w.data();
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      double dot = 0;
      for (int k = 0; k < 24; ++k) dot += d[i * 24 + k] * d[j * 24 + k];
      CHECK(dot == doctest::Approx(i == j ? 4.0 : 0.0).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("linear layer computes x w + b") {
  ad::ParamStore store;
  Rng rng(13);
  auto lin = ad::Linear::create(store, "l", 3, 2, rng);
  lin.w.data()[0] = 1; lin.w.data()[1] = 2;
  lin.w.data()[2] = 3; lin.w.data()[3] = 4;
  lin.w.data()[4] = 5; lin.w.data()[5] = 6;
  lin.b.data()[0] = 0.5; lin.b.data()[1] = -0.5;
  Tensor x = Tensor::from({1, 1, 1}, {1, 3});
  Tensor y = lin.forward(x);
  CHECK(y.data()[0] == doctest::Approx(9.5));
  CHECK(y.data()[1] == doctest::Approx(11.5));
}

TEST_CASE("mlp shapes and hidden activation wiring") {
  ad::ParamStore store;
  Rng rng(14);
  auto mlp = ad::Mlp::create(store, "m", {5, 7, 7, 3}, ad::Activation::kTanh, false, rng);
  CHECK(mlp.layers.size() == 3);
  Tensor x = Tensor::full({4, 5}, 0.1);
  Tensor y = mlp.forward(x);
  CHECK(y.shape() == std::vector<int>{4, 3});
  // all four identical input rows give identical outputs
  auto d = y.data();
  for (int r = 1; r < 4; ++r)
    for (int c = 0; c < 3; ++c) CHECK(d[r * 3 + c] == d[c]);
}

TEST_CASE("lstm forget gate bias starts at one") {
  ad::ParamStore store;
  Rng rng(15);
  auto cell = ad::Lstm::create(store, "seq", 6, 10, rng);
  auto b = cell.b.data();
  for (int i = 0; i < 10; ++i) CHECK(b[10 + i] == 1.0);       // forget block
  for (int i = 0; i < 10; ++i) CHECK(b[i] == 0.0);            // input block
  for (int i = 0; i < 10; ++i) CHECK(b[20 + i] == 0.0);
  for (int i = 0; i < 10; ++i) CHECK(b[30 + i] == 0.0);
}

TEST_CASE("lstm step matches a scalar hand computation") {
  // 1-d input, 1-d hidden, all weights set by hand so the gate algebra is
  // checkable on paper.
  ad::ParamStore store;
  Rng rng(16);
  auto cell = ad::Lstm::create(store, "c", 1, 1, rng);
  // order: input, forget, cell, output
  cell.w_x.data()[0] = 0.5; cell.w_x.data()[1] = -0.25;
  cell.w_x.data()[2] = 1.0; cell.w_x.data()[3] = 0.75;
  cell.w_h.data()[0] = 0.1; cell.w_h.data()[1] = 0.2;
  cell.w_h.data()[2] = 0.3; cell.w_h.data()[3] = 0.4;
  cell.b.data()[0] = 0.0; cell.b.data()[1] = 1.0;
  cell.b.data()[2] = 0.0; cell.b.data()[3] = 0.0;

  const double x = 0.8, h0 = 0.3, c0 = -0.2;
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const double i = sig(0.5 * x + 0.1 * h0);
  const double f = sig(-0.25 * x + 0.2 * h0 + 1.0);
  const double g = std::tanh(1.0 * x + 0.3 * h0);
  const double o = sig(0.75 * x + 0.4 * h0);
  const double c1 = f * c0 + i * g;
  const double h1 = o * std::tanh(c1);

  ad::LstmState s{Tensor::from({h0}, {1, 1}), Tensor::from({c0}, {1, 1})};
  auto s1 = cell.step(Tensor::from({x}, {1, 1}), s);
  CHECK(s1.c.data()[0] == doctest::Approx(c1).epsilon(1e-12));
  CHECK(s1.h.data()[0] == doctest::Approx(h1).epsilon(1e-12));
}

TEST_CASE("lstm sequence run carries state and bidirectional doubles width") {
  ad::ParamStore store;
  Rng rng(17);
  auto fwd = ad::Lstm::create(store, "f", 3, 5, rng);
  auto bwd = ad::Lstm::create(store, "r", 3, 5, rng);
  Tensor xs = Tensor::from({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2}, {4, 3});
  auto s0 = ad::LstmState::zeros(1, 5);

  auto uni = ad::lstm_forward(fwd, xs, s0);
  CHECK(uni.outputs.shape() == std::vector<int>{4, 5});

  // manual stepping reproduces both the rows and the final state
  auto s = s0;
  for (int t = 0; t < 4; ++t) {
    s = fwd.step(ad::slice_rows(xs, t, t + 1), s);
    for (int j = 0; j < 5; ++j)
      CHECK(uni.outputs.data()[t * 5 + j] == doctest::Approx(s.h.data()[j]).epsilon(1e-14));
  }
  for (int j = 0; j < 5; ++j) {
    CHECK(uni.final_state.h.data()[j] == doctest::Approx(s.h.data()[j]));
    CHECK(uni.final_state.c.data()[j] == doctest::Approx(s.c.data()[j]));
  }

  auto bi = ad::lstm_forward(fwd, xs, s0, &bwd);
  CHECK(bi.outputs.shape() == std::vector<int>{4, 10});
  // forward half of the bidirectional rows equals the unidirectional rows
  for (int t = 0; t < 4; ++t)
    for (int j = 0; j < 5; ++j)
      CHECK(bi.outputs.data()[t * 10 + j] == uni.outputs.data()[t * 5 + j]);
  // backward half row t equals running the reversed sequence 4-t steps
  auto sr = s0;
  for (int t = 3; t >= 0; --t) {
    sr = bwd.step(ad::slice_rows(xs, t, t + 1), sr);
    for (int j = 0; j < 5; ++j)
      CHECK(bi.outputs.data()[t * 10 + 5 + j] ==
            doctest::Approx(sr.h.data()[j]).epsilon(1e-14));
  }
}

TEST_CASE("lstm gradients pass finite differences") {
  ad::ParamStore store;
  Rng rng(18);
  auto cell = ad::Lstm::create(store, "g", 2, 3, rng);
  Tensor xs = Tensor::from({0.3, -0.2, 0.1, 0.5, -0.4, 0.25}, {3, 2}, true);
  auto leaves = store.tensors();
  leaves.push_back(xs);
  auto r = testsupport::gradcheck(leaves, [&] {
    auto out = ad::lstm_forward(cell, xs, ad::LstmState::zeros(1, 3));
    return ad::sum(ad::square(out.outputs));
  });
  CHECK_MESSAGE(r.failed == 0, "lstm worst ", r.worst, " at ", r.worst_at);
}

TEST_CASE("adam first step moves by lr with bias correction") {
  // With a constant gradient g, the bias-corrected step is exactly
  // -lr * g/|g| * 1/(1 + eps/|g_hat|)-ish; for step 1: m_hat = g, v_hat = g^2,
  // so delta = -lr * g / (|g| + eps) ~= -lr * sign(g).
  Tensor p = Tensor::from({1.0, -2.0}, {2}, true);
  ad::Adam opt({p}, 0.01);
  Tensor loss = ad::sum(ad::mul(p, Tensor::from({3.0, -4.0}, {2})));
  ad::backward(loss);
  opt.step();
  CHECK(p.data()[0] == doctest::Approx(1.0 - 0.01 * (3.0 / (3.0 + 1e-8))).epsilon(1e-12));
  CHECK(p.data()[1] == doctest::Approx(-2.0 - 0.01 * (-4.0 / (4.0 + 1e-8))).epsilon(1e-12));
  CHECK(opt.steps_taken() == 1);
}

TEST_CASE("adam second step matches the hand-rolled recurrence") {
  Tensor p = Tensor::from({0.5}, {1}, true);
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ad::Adam opt({p}, lr, b1, b2, eps);

  double m = 0, v = 0, x = 0.5;
  for (int t = 1; t <= 2; ++t) {
    const double g = 2.0 * x;  // d/dx x^2
    Tensor loss = ad::square(p);
    ad::backward(loss);
    opt.step();
    opt.zero_grad();
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    x -= lr * mh / (std::sqrt(vh) + eps);
    CHECK(p.data()[0] == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("adam names the parameter with a non-finite gradient") {
  ad::ParamStore store;
  auto& p = store.add("policy.w", Tensor::from({1.0}, {1}, true));
  ad::Adam opt(store.tensors(), 0.01);
  Tensor bad = ad::mul_scalar(p, HUGE_VAL);
  ad::backward(bad);
  CHECK_THROWS_WITH_AS(opt.step(), doctest::Contains("policy.w"), ad::TensorError);
}

TEST_CASE("gradient clipping rescales only above the threshold") {
  Tensor a = Tensor::from({3.0}, {1}, true);
  Tensor b = Tensor::from({4.0}, {1}, true);
  Tensor loss = ad::add(ad::mul_scalar(a, 3.0), ad::mul_scalar(b, 4.0));
  ad::backward(loss);  // grads: 3 and 4, norm 5
  double norm = ad::clip_grad_norm({a, b}, 10.0);
  CHECK(norm == doctest::Approx(5.0));
  CHECK(a.grad()[0] == doctest::Approx(3.0));

  norm = ad::clip_grad_norm({a, b}, 1.0);
  CHECK(norm == doctest::Approx(5.0));
  CHECK(a.grad()[0] == doctest::Approx(0.6));
  CHECK(b.grad()[0] == doctest::Approx(0.8));
}

TEST_CASE("checkpoint roundtrip restores bytes and rejects mismatches") {
  ad::ParamStore store;
  Rng rng(19);
  ad::Mlp::create(store, "net", {4, 8, 2}, ad::Activation::kTanh, true, rng);
  auto path = temp_file("nn_ckpt_test.bin");
  ad::save_checkpoint(path, store, "oracle");

  // same construction, different init -> different values until load
  ad::ParamStore other;
  Rng rng2(99);
  ad::Mlp::create(other, "net", {4, 8, 2}, ad::Activation::kTanh, true, rng2);
  CHECK(ad::param_hash(other) != ad::param_hash(store));
  ad::load_checkpoint(path, other, "oracle");
  CHECK(ad::param_hash(other) == ad::param_hash(store));

  CHECK_THROWS_WITH_AS(ad::load_checkpoint(path, other, "student"),
                       doctest::Contains("kind"), std::runtime_error);

  ad::ParamStore wrong_shape;
  Rng rng3(5);
  ad::Mlp::create(wrong_shape, "net", {4, 6, 2}, ad::Activation::kTanh, true, rng3);
  CHECK_THROWS(ad::load_checkpoint(path, wrong_shape, "oracle"));

  auto loaded = ad::read_checkpoint(path);
  CHECK(loaded.kind == "oracle");
  CHECK(loaded.params.size() == store.items().size());
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint bytes are identical across repeated saves") {
  ad::ParamStore store;
  Rng rng(20);
  ad::Linear::create(store, "l", 10, 10, rng);
  auto p1 = temp_file("nn_ckpt_a.bin");
  auto p2 = temp_file("nn_ckpt_b.bin");
  ad::save_checkpoint(p1, store, "x");
  ad::save_checkpoint(p2, store, "x");
  auto read_all = [](const std::filesystem::path& p) {
    std::vector<char> buf(std::filesystem::file_size(p));
    FILE* f = std::fopen(p.c_str(), "rb");
    REQUIRE(f != nullptr);
    REQUIRE(std::fread(buf.data(), 1, buf.size(), f) == buf.size());
    std::fclose(f);
    return buf;
  };
  CHECK(read_all(p1) == read_all(p2));
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("param hash is order and value sensitive") {
  ad::ParamStore a, b;
  a.add("x", Tensor::from({1.0, 2.0}, {2}, true));
  b.add("x", Tensor::from({1.0, 2.0}, {2}, true));
  CHECK(ad::param_hash(a) == ad::param_hash(b));
  b.find("x")->data()[1] = 2.0000000001;
  CHECK(ad::param_hash(a) != ad::param_hash(b));
}

TEST_SUITE_END();
