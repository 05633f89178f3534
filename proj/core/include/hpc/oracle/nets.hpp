#pragma once

#include "hpc/ad/adam.hpp"
#include "hpc/ad/nn.hpp"
#include "hpc/oracle/ppo_config.hpp"
#include "hpc/sim/obs.hpp"

namespace hpc::oracle {

inline constexpr int kProprioDim = sim::kPrivilegedDim - terrain::kScanPoints;  // 24
inline constexpr int kActionDim = sim::kNumJoints;

// One recurrent tower: scan encoder MLP, LSTM over [proprio | feature],
// MLP head. Actor and critic are fully separate towers (no shared
// parameters), plus the actor's state-independent log-std vector.
struct Tower {
  ad::Mlp encoder;
  ad::Lstm lstm;
  ad::Mlp head;

  struct Out {
    ad::Tensor out;
    ad::LstmState state;
  };
  Out forward(const ad::Tensor& obs, const ad::LstmState& s) const;  // obs [B,45]
};

struct OracleNets {
  OracleNetsConfig cfg;
  double log_std_lo = -4.0, log_std_hi = 1.0;
  Tower actor;
  Tower critic;
  ad::Tensor log_std;  // [kActionDim]
  ad::ParamStore params;

  static OracleNets create(const OracleNetsConfig& cfg, const PpoConfig& ppo, Rng& rng);

  ad::Tensor clamped_log_std() const { return ad::clamp(log_std, log_std_lo, log_std_hi); }
};

inline constexpr const char* kOracleCheckpointKind = "oracle";

// Sum over action dims of the diagonal-Gaussian log density -> [B,1].
ad::Tensor gaussian_log_prob(const ad::Tensor& mean, const ad::Tensor& log_std,
                             const ad::Tensor& actions);
// Differential entropy (scalar); depends only on log_std.
ad::Tensor gaussian_entropy(const ad::Tensor& log_std);

// Same density evaluated numerically (rollout bookkeeping).
double gaussian_log_prob_value(std::span<const double> mean, std::span<const double> log_std,
                               std::span<const double> action);

// v broadcast to [rows, v.dim] as a graph op (grads flow into v).
ad::Tensor rows_of(const ad::Tensor& v, int rows);

}  // namespace hpc::oracle
