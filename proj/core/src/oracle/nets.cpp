#include "hpc/oracle/nets.hpp"

#include <cmath>

namespace hpc::oracle {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

Tower::Out Tower::forward(const ad::Tensor& obs, const ad::LstmState& s) const {
  ad::Tensor proprio = ad::slice_cols(obs, 0, kProprioDim);
  ad::Tensor scan = ad::slice_cols(obs, kProprioDim, sim::kPrivilegedDim);
  ad::Tensor feat = encoder.forward(scan);
  std::vector<ad::Tensor> parts{proprio, feat};
  ad::Tensor x = ad::concat(std::span<const ad::Tensor>(parts.data(), parts.size()), 1);
  ad::LstmState next = lstm.step(x, s);
  return {head.forward(next.h), next};
}

static Tower make_tower(ad::ParamStore& store, const std::string& name,
                        const OracleNetsConfig& cfg, int out_dim, double last_scale, Rng& rng) {
  Tower t;
  t.encoder = ad::Mlp::create(store, name + ".encoder",
                              {terrain::kScanPoints, cfg.encoder_hidden, cfg.d_e},
                              ad::Activation::kTanh, false, rng);
  t.lstm = ad::Lstm::create(store, name + ".lstm", kProprioDim + cfg.d_e, cfg.lstm_hidden, rng);
  std::vector<int> dims{cfg.lstm_hidden};
  for (int h : cfg.head_hidden) dims.push_back(h);
  dims.push_back(out_dim);
  t.head = ad::Mlp::create(store, name + ".head", dims, ad::Activation::kTanh, false, rng,
                           last_scale);
  return t;
}

OracleNets OracleNets::create(const OracleNetsConfig& cfg, const PpoConfig& ppo, Rng& rng) {
  OracleNets n;
  n.cfg = cfg;
  n.log_std_lo = ppo.log_std_lo;
  n.log_std_hi = ppo.log_std_hi;
  // small final layer keeps early actions near the default pose
  n.actor = make_tower(n.params, "actor", cfg, kActionDim, 0.1, rng);
  n.critic = make_tower(n.params, "critic", cfg, 1, 1.0, rng);
  n.log_std = n.params.add("log_std", ad::Tensor::full({kActionDim}, ppo.log_std_init, true));
  return n;
}

ad::Tensor rows_of(const ad::Tensor& v, int rows) {
  return ad::add(ad::Tensor::zeros({rows, static_cast<int>(v.numel())}), v);
}

ad::Tensor gaussian_log_prob(const ad::Tensor& mean, const ad::Tensor& log_std,
                             const ad::Tensor& actions) {
  const int b = mean.rows();
  ad::Tensor inv_sigma = ad::exp(ad::neg(log_std));
  ad::Tensor z = ad::mul(ad::sub(actions, mean), rows_of(inv_sigma, b));
  ad::Tensor quad = ad::mul_scalar(ad::sum_rows(ad::square(z)), -0.5);  // [B,1]
  const double d = static_cast<double>(mean.cols());
  ad::Tensor norm = ad::add_scalar(ad::mul_scalar(ad::sum(log_std), -1.0), -0.5 * d * kLog2Pi);
  return ad::add(quad, norm);  // [B,1] + [1]
}

ad::Tensor gaussian_entropy(const ad::Tensor& log_std) {
  const double d = static_cast<double>(log_std.numel());
  return ad::add_scalar(ad::sum(log_std), 0.5 * d * (1.0 + kLog2Pi));
}

double gaussian_log_prob_value(std::span<const double> mean, std::span<const double> log_std,
                               std::span<const double> action) {
  double lp = 0.0;
  for (size_t j = 0; j < mean.size(); ++j) {
    const double sigma = std::exp(log_std[j]);
    const double z = (action[j] - mean[j]) / sigma;
    lp += -0.5 * z * z - log_std[j] - 0.5 * kLog2Pi;
  }
  return lp;
}

}  // namespace hpc::oracle
