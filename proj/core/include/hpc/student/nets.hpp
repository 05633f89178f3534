#pragma once

#include "hpc/ad/nn.hpp"
#include "hpc/sim/obs.hpp"
#include "hpc/student/student_config.hpp"

namespace hpc::student {

inline constexpr int kFrameDim = sim::kStudentDim;                       // 40
inline constexpr int kProprioCols = kFrameDim - terrain::kScanPoints;    // 19
inline constexpr int kActionDim = sim::kNumJoints;

// action log-std clamp for the on-policy ablation (matches the oracle)
inline constexpr double kActionLogStdLo = -4.0;
inline constexpr double kActionLogStdHi = 1.0;

struct EncodeOut {
  ad::Tensor h;          // [B, 2*lstm_hidden] window summary
  ad::Tensor mu;         // [B, d_z] (empty for the no-world-model variant)
  ad::Tensor log_sigma;  // [B, d_z] clamped
  ad::Tensor z;          // [B, d_z] latent; == h for no-world-model
};

// World-model student: per-frame terrain feature MLP, bidirectional LSTM
// over the trailing window, variational latent, decoder and latent policy.
// The no-world-model ablation keeps the recurrent trunk and puts the policy
// directly on the window summary. The no-distillation ablation adds a value
// head and an action log-std for on-policy training.
struct StudentNets {
  StudentTrainConfig cfg;
  Variant variant = Variant::kFull;
  bool inference_only = false;  // bundle subset: no sigma head, decoder, critic

  ad::Mlp encoder;  // scan 21 -> d_e
  ad::Lstm fwd, bwd;
  ad::Linear mu_head;
  ad::Linear log_sigma_head;
  ad::Mlp decoder;
  ad::Mlp policy;
  ad::Mlp critic;      // no-distill only
  ad::Tensor log_std;  // no-distill only, [kActionDim]
  ad::ParamStore params;

  static StudentNets create(const StudentTrainConfig& cfg, Variant v, Rng& rng,
                            bool inference_only = false);

  // windows are time-major: frame t of window b at row t*batch + b, oldest
  // frame first; zero rows pad positions before the episode start.
  ad::Tensor frame_features(const ad::Tensor& x_t) const;  // [B,40] -> [B,19+d_e]
  ad::Tensor window_summary(const ad::Tensor& windows, int batch) const;

  // sample=true draws batch*d_z normals from rng (reparameterized); otherwise
  // z = mu and rng is never touched (pass nullptr).
  EncodeOut encode(const ad::Tensor& windows, int batch, bool sample, Rng* rng) const;
  ad::Tensor decode(const ad::Tensor& z) const;
  ad::Tensor act(const ad::Tensor& z) const;
  ad::Tensor value(const ad::Tensor& z) const;
  ad::Tensor clamped_log_std() const {
    return ad::clamp(log_std, kActionLogStdLo, kActionLogStdHi);
  }
};

const char* checkpoint_kind(Variant v);
inline constexpr const char* kBundleCheckpointKind = "bundle";

// Parameter name prefixes dropped by the inference export.
bool in_inference_bundle(const std::string& param_name);

}  // namespace hpc::student
