#include "hpc/student/export.hpp"

#include <stdexcept>

#include "hpc/ad/checkpoint.hpp"

namespace hpc::student {

namespace fs = std::filesystem;

int64_t export_inference(const fs::path& student_ckpt, const fs::path& bundle_path) {
  ad::LoadedCheckpoint loaded = ad::read_checkpoint(student_ckpt);
  if (loaded.kind.rfind("student", 0) != 0) {
    throw std::runtime_error("export: " + student_ckpt.string() + " holds a '" + loaded.kind +
                             "' checkpoint, not a student");
  }
  ad::ParamStore kept;
  for (auto& [name, tensor] : loaded.params) {
    if (in_inference_bundle(name)) kept.add(name, tensor);
  }
  ad::save_checkpoint(bundle_path, kept, kBundleCheckpointKind);
  return kept.total_params();
}

StudentNets load_bundle(const fs::path& bundle_path, const StudentTrainConfig& cfg) {
  ad::LoadedCheckpoint loaded = ad::read_checkpoint(bundle_path);
  if (loaded.kind != kBundleCheckpointKind) {
    throw std::runtime_error("load_bundle: " + bundle_path.string() + " holds a '" + loaded.kind +
                             "' checkpoint, not an inference bundle");
  }
  bool has_latent = false;
  for (auto& [name, tensor] : loaded.params) {
    if (name.rfind("mu.", 0) == 0) has_latent = true;
  }
  Rng dummy(0);
  StudentNets nets = StudentNets::create(
      cfg, has_latent ? Variant::kFull : Variant::kNoWorldModel, dummy, /*inference_only=*/true);
  ad::load_checkpoint(bundle_path, nets.params, kBundleCheckpointKind);
  return nets;
}

}  // namespace hpc::student
