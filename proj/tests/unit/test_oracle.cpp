#include <cmath>
#include <vector>

#include "doctest.h"

#include "gradcheck.hpp"
#include "hpc/ad/checkpoint.hpp"
#include "hpc/oracle/gae.hpp"
#include "hpc/oracle/nets.hpp"
#include "hpc/oracle/ppo.hpp"

using namespace hpc;
using ad::Tensor;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("gae on a single terminal step is the td error") {
  oracle::RolloutBatch b;
  b.resize(1, 1, 1, 1, 1);
  b.rewards[0] = 1.0;
  b.values[0] = 0.5;
  b.done[0] = 1;
  b.boot_values[0] = 0.0;  // true terminal: nothing beyond
  b.tail_values[0] = 99.0; // must be ignored after a done step
  oracle::compute_gae(b, 0.99, 0.95);
  CHECK(b.advantages[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b.returns[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gae recursion matches a two-step hand computation") {
  oracle::RolloutBatch b;
  b.resize(1, 2, 1, 1, 1);
  const double gamma = 0.9, lambda = 0.8;
  b.rewards = {1.0, 2.0};
  b.values = {0.5, 1.5};
  b.tail_values = {2.0};
  oracle::compute_gae(b, gamma, lambda);
  const double delta1 = 2.0 + gamma * 2.0 - 1.5;          // 2.3
  const double delta0 = 1.0 + gamma * 1.5 - 0.5;          // 1.85
  CHECK(b.advantages[1] == doctest::Approx(delta1).epsilon(1e-15));
  CHECK(b.advantages[0] == doctest::Approx(delta0 + gamma * lambda * delta1).epsilon(1e-15));
  CHECK(b.returns[0] == doctest::Approx(b.advantages[0] + 0.5).epsilon(1e-15));
}

TEST_CASE("gae restarts at episode boundaries and bootstraps timeouts") {
  // env 0: done after step 0 as a true terminal; env 1: timeout with a
  // bootstrap value carrying the cut-off return
  oracle::RolloutBatch b;
  b.resize(2, 2, 1, 1, 1);
  const double gamma = 0.99, lambda = 0.95;
  auto at = [&](int t, int e) { return b.idx(t, e); };
  b.rewards[at(0, 0)] = 1.0;  b.values[at(0, 0)] = 0.4;
  b.rewards[at(1, 0)] = 0.5;  b.values[at(1, 0)] = 0.6;
  b.rewards[at(0, 1)] = 1.0;  b.values[at(0, 1)] = 0.4;
  b.rewards[at(1, 1)] = 0.5;  b.values[at(1, 1)] = 0.6;
  b.done[at(0, 0)] = 1;
  b.boot_values[at(0, 0)] = 0.0;   // fell: no future value
  b.done[at(0, 1)] = 1;
  b.boot_values[at(0, 1)] = 2.5;   // timed out: bootstrap the final obs
  b.tail_values = {1.0, 1.0};
  oracle::compute_gae(b, gamma, lambda);

  // terminal vs timeout differ exactly by gamma * boot value at t=0
  CHECK(b.advantages[at(0, 0)] == doctest::Approx(1.0 - 0.4).epsilon(1e-12));
  CHECK(b.advantages[at(0, 1)] ==
        doctest::Approx(1.0 + gamma * 2.5 - 0.4).epsilon(1e-12));
  // the t=1 mini-episode is cut by the horizon and bootstraps the tail
  const double d1 = 0.5 + gamma * 1.0 - 0.6;
  CHECK(b.advantages[at(1, 0)] == doctest::Approx(d1).epsilon(1e-12));
  CHECK(b.advantages[at(1, 1)] == doctest::Approx(d1).epsilon(1e-12));
  // no lambda carry across the boundary
  CHECK(b.advantages[at(0, 0)] != doctest::Approx(0.6 + gamma * lambda * d1));
}

TEST_CASE("advantage normalization is zero mean unit variance") {
  oracle::RolloutBatch b;
  b.resize(2, 3, 1, 1, 1);
  b.advantages = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  b.norm_advantages.assign(6, 0.0);
  oracle::normalize_advantages(b);
  double m = 0, v = 0;
  for (double a : b.norm_advantages) m += a;
  m /= 6;
  for (double a : b.norm_advantages) v += (a - m) * (a - m);
  v /= 6;
  CHECK(std::abs(m) < 1e-12);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(b.norm_advantages[0] < 0);
  CHECK(b.norm_advantages[5] > 0);
}

TEST_CASE("diagonal gaussian log density matches frozen reference values") {
  // reference: log N(0.1; 0.3, e^-0.5) and log N(-0.9; -1.2, e^0.25)
  Tensor mean = Tensor::from({0.3, -1.2}, {1, 2});
  Tensor log_std = Tensor::from({-0.5, 0.25}, {2});
  Tensor act = Tensor::from({0.1, -0.9}, {1, 2});
  Tensor lp = oracle::gaussian_log_prob(mean, log_std, act);
  REQUIRE(lp.shape() == std::vector<int>{1, 1});
  CHECK(lp.data()[0] == doctest::Approx(-1.6695365826655948).epsilon(1e-12));

  const double m[] = {0.3, -1.2}, ls[] = {-0.5, 0.25}, a[] = {0.1, -0.9};
  CHECK(oracle::gaussian_log_prob_value(m, ls, a) ==
        doctest::Approx(-1.6695365826655948).epsilon(1e-12));
  CHECK(oracle::gaussian_log_prob_value(m, ls, a) ==
        doctest::Approx(lp.data()[0]).epsilon(1e-14));
}

TEST_CASE("gaussian entropy depends only on the log stds") {
  Tensor log_std = Tensor::from({-1.0, 0.5}, {2});
  Tensor h = oracle::gaussian_entropy(log_std);
  CHECK(h.data()[0] == doctest::Approx(2.3378770664093453).epsilon(1e-12));
}

TEST_CASE("rows_of broadcasts with summed gradients") {
  Tensor v = Tensor::from({0.5, -1.0, 2.0}, {3}, true);
  Tensor y = oracle::rows_of(v, 4);
  REQUIRE(y.shape() == std::vector<int>{4, 3});
  for (int r = 0; r < 4; ++r) CHECK(y.data()[r * 3 + 1] == -1.0);
  auto res = testsupport::gradcheck({v}, [&] {
    return ad::sum(ad::square(oracle::rows_of(v, 4)));
  });
  CHECK_MESSAGE(res.failed == 0, "rows_of worst ", res.worst);
  v.zero_grad();
  ad::backward(ad::sum(ad::square(oracle::rows_of(v, 4))));
  CHECK(v.grad()[0] == doctest::Approx(2.0 * 4 * 0.5));
}

TEST_CASE("oracle towers produce the right shapes and are independent") {
  oracle::OracleNetsConfig nc;
  nc.encoder_hidden = 16;
  nc.d_e = 4;
  nc.lstm_hidden = 12;
  nc.head_hidden = {16};
  oracle::PpoConfig pc;
  Rng rng(8);
  auto nets = oracle::OracleNets::create(nc, pc, rng);

  Tensor obs = Tensor::full({3, sim::kPrivilegedDim}, 0.1);
  auto s0 = ad::LstmState::zeros(3, 12);
  auto a = nets.actor.forward(obs, s0);
  auto c = nets.critic.forward(obs, s0);
  CHECK(a.out.shape() == std::vector<int>{3, oracle::kActionDim});
  CHECK(c.out.shape() == std::vector<int>{3, 1});
  CHECK(a.state.h.shape() == std::vector<int>{3, 12});
  CHECK(nets.log_std.shape() == std::vector<int>{oracle::kActionDim});
  for (double v : nets.log_std.data()) CHECK(v == pc.log_std_init);

  // actor and critic share no parameters: perturbing every actor weight
  // leaves the critic output unchanged
  const auto before = c.out.data()[0];
  for (const auto& [name, t] : nets.params.items()) {
    if (name.rfind("actor.", 0) == 0)
      for (auto& x : nets.params.find(name)->data()) x += 0.05;
  }
  auto c2 = nets.critic.forward(obs, s0);
  CHECK(c2.out.data()[0] == before);

  // clamped log std respects the configured box
  nets.log_std.data()[0] = -10.0;
  nets.log_std.data()[1] = 10.0;
  auto cl = nets.clamped_log_std();
  CHECK(cl.data()[0] == pc.log_std_lo);
  CHECK(cl.data()[1] == pc.log_std_hi);
}

TEST_CASE("ppo update is finite, deterministic and kl-positive") {
  oracle::OracleNetsConfig nc;
  nc.encoder_hidden = 8;
  nc.d_e = 4;
  nc.lstm_hidden = 8;
  nc.head_hidden = {8};
  oracle::PpoConfig pc;
  pc.num_envs = 4;
  pc.horizon = 6;
  pc.epochs = 2;
  pc.minibatches = 2;

  auto make_nets = [&] {
    Rng rng(77);
    return oracle::OracleNets::create(nc, pc, rng);
  };

  oracle::RolloutBatch b;
  b.resize(pc.num_envs, pc.horizon, sim::kPrivilegedDim, oracle::kActionDim, nc.lstm_hidden);
  Rng data_rng(123);
  for (auto& x : b.obs) x = data_rng.uniform(-1.0, 1.0);
  for (auto& x : b.actions) x = data_rng.uniform(-0.5, 0.5);
  for (auto& x : b.rewards) x = data_rng.uniform(-0.2, 1.0);
  for (auto& x : b.values) x = data_rng.uniform(-0.5, 0.5);
  std::vector<double> ls(oracle::kActionDim, pc.log_std_init);
  for (int t = 0; t < pc.horizon; ++t)
    for (int e = 0; e < pc.num_envs; ++e) {
      const auto i = b.idx(t, e);
      std::vector<double> mean(oracle::kActionDim, 0.0);
      b.log_probs[i] = oracle::gaussian_log_prob_value(
          mean, ls, std::span<const double>(b.actions.data() + i * oracle::kActionDim,
                                            oracle::kActionDim));
    }
  b.done[b.idx(2, 1)] = 1;
  b.boot_values[b.idx(2, 1)] = 0.3;
  for (auto& x : b.tail_values) x = 0.1;
  oracle::compute_gae(b, pc.gamma, pc.gae_lambda);
  oracle::normalize_advantages(b);

  auto run = [&](uint64_t shuffle_seed) {
    auto nets = make_nets();
    ad::Adam opt(nets.params.tensors(), pc.learning_rate);
    Rng shuffle(shuffle_seed);
    auto stats = oracle::ppo_update(nets, opt, b, pc, shuffle);
    return std::make_pair(stats, ad::param_hash(nets.params));
  };

  auto [s1, h1] = run(5);
  auto [s2, h2] = run(5);
  CHECK_FALSE(s1.aborted);
  CHECK(std::isfinite(s1.policy_loss));
  CHECK(std::isfinite(s1.value_loss));
  CHECK(std::isfinite(s1.entropy));
  CHECK(s1.grad_norm > 0.0);
  CHECK(s1.approx_kl >= 0.0);  // (e^d - 1 - d) estimator is non-negative
  CHECK(s1.minibatch_updates == pc.epochs * pc.minibatches);

  CHECK(s1.policy_loss == s2.policy_loss);
  CHECK(s1.value_loss == s2.value_loss);
  CHECK(s1.approx_kl == s2.approx_kl);
  CHECK(h1 == h2);
}

TEST_SUITE_END();
