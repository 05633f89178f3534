#include "hpc/student/nets.hpp"

#include <stdexcept>
#include <utility>

namespace hpc::student {

using ad::Tensor;

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kNoWorldModel: return "no_wm";
    case Variant::kNoDistill: return "no_distill";
  }
  return "full";
}

Variant variant_from_name(const std::string& name) {
  if (name == "full") return Variant::kFull;
  if (name == "no_wm") return Variant::kNoWorldModel;
  if (name == "no_distill") return Variant::kNoDistill;
  throw std::invalid_argument("unknown variant '" + name + "' (full, no_wm, no_distill)");
}

const char* checkpoint_kind(Variant v) {
  switch (v) {
    case Variant::kFull: return "student";
    case Variant::kNoWorldModel: return "student_no_wm";
    case Variant::kNoDistill: return "student_no_distill";
  }
  return "student";
}

bool in_inference_bundle(const std::string& name) {
  return name.rfind("log_sigma", 0) != 0 && name.rfind("decoder", 0) != 0 &&
         name.rfind("critic", 0) != 0 && name.rfind("log_std", 0) != 0;
}

StudentNets StudentNets::create(const StudentTrainConfig& cfg, Variant v, Rng& rng,
                                bool inference_only) {
  StudentNets n;
  n.cfg = cfg;
  n.variant = v;
  n.inference_only = inference_only;
  const int frame = kProprioCols + cfg.d_e;

  n.encoder = ad::Mlp::create(n.params, "encoder",
                              {terrain::kScanPoints, cfg.encoder_hidden, cfg.d_e},
                              ad::Activation::kTanh, false, rng);
  n.fwd = ad::Lstm::create(n.params, "lstm_fwd", frame, cfg.lstm_hidden, rng);
  n.bwd = ad::Lstm::create(n.params, "lstm_bwd", frame, cfg.lstm_hidden, rng);

  const bool latent = v != Variant::kNoWorldModel;
  if (latent) {
    n.mu_head = ad::Linear::create(n.params, "mu", 2 * cfg.lstm_hidden, cfg.d_z, rng);
    if (!inference_only)
      n.log_sigma_head =
          ad::Linear::create(n.params, "log_sigma", 2 * cfg.lstm_hidden, cfg.d_z, rng);
  }

  std::vector<int> pdims{latent ? cfg.d_z : 2 * cfg.lstm_hidden};
  for (int h : cfg.policy_hidden) pdims.push_back(h);
  pdims.push_back(kActionDim);
  n.policy = ad::Mlp::create(n.params, "policy", pdims, ad::Activation::kTanh, true, rng, 0.1);

  if (!inference_only) {
    if (latent) {
      std::vector<int> ddims{cfg.d_z};
      for (int h : cfg.decoder_hidden) ddims.push_back(h);
      ddims.push_back(sim::kReconDim);
      n.decoder = ad::Mlp::create(n.params, "decoder", ddims, ad::Activation::kTanh, false, rng);
    }
    if (v == Variant::kNoDistill) {
      std::vector<int> cdims{cfg.d_z};
      for (int h : cfg.policy_hidden) cdims.push_back(h);
      cdims.push_back(1);
      n.critic = ad::Mlp::create(n.params, "critic", cdims, ad::Activation::kTanh, false, rng);
      n.log_std = n.params.add("log_std", Tensor::full({kActionDim}, -1.0, true));
    }
  }
  return n;
}

Tensor StudentNets::frame_features(const Tensor& x_t) const {
  Tensor proprio = ad::slice_cols(x_t, 0, kProprioCols);
  Tensor scan = ad::slice_cols(x_t, kProprioCols, kFrameDim);
  Tensor feat = encoder.forward(scan);
  std::vector<Tensor> parts{proprio, feat};
  return ad::concat(std::span<const Tensor>(parts.data(), parts.size()), 1);
}

Tensor StudentNets::window_summary(const Tensor& windows, int batch) const {
  const int h = windows.rows() / batch;
  std::vector<Tensor> frames;
  frames.reserve(h);
  for (int t = 0; t < h; ++t)
    frames.push_back(frame_features(ad::slice_rows(windows, t * batch, (t + 1) * batch)));

  ad::LstmState sf = ad::LstmState::zeros(batch, cfg.lstm_hidden);
  ad::LstmState sb = ad::LstmState::zeros(batch, cfg.lstm_hidden);
  for (int t = 0; t < h; ++t) sf = fwd.step(frames[t], sf);
  for (int t = h - 1; t >= 0; --t) sb = bwd.step(frames[t], sb);

  std::vector<Tensor> parts{sf.h, sb.h};
  return ad::concat(std::span<const Tensor>(parts.data(), parts.size()), 1);
}

EncodeOut StudentNets::encode(const Tensor& windows, int batch, bool sample, Rng* rng) const {
  EncodeOut out;
  out.h = window_summary(windows, batch);
  if (variant == Variant::kNoWorldModel) {
    out.z = out.h;
    return out;
  }
  out.mu = mu_head.forward(out.h);
  if (sample) {
    out.log_sigma =
        ad::clamp(log_sigma_head.forward(out.h), cfg.log_sigma_lo, cfg.log_sigma_hi);
    std::vector<double> eta(static_cast<size_t>(batch) * cfg.d_z);
    for (auto& e : eta) e = rng->normal();
    out.z = ad::add(out.mu, ad::mul(ad::exp(out.log_sigma),
                                    Tensor::from(std::move(eta), {batch, cfg.d_z})));
  } else {
    out.z = out.mu;  // deterministic path: sigma head not evaluated
  }
  return out;
}

Tensor StudentNets::decode(const Tensor& z) const { return decoder.forward(z); }

Tensor StudentNets::act(const Tensor& z) const { return policy.forward(z); }

Tensor StudentNets::value(const Tensor& z) const { return critic.forward(z); }

}  // namespace hpc::student
