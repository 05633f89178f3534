#pragma once

#include <filesystem>

#include "hpc/student/nets.hpp"

namespace hpc::student {

// Strips the training-only parameters (sigma head, decoder, value head,
// action log-std) out of a student checkpoint and writes a deterministic
// inference bundle. Returns the number of scalars kept.
int64_t export_inference(const std::filesystem::path& student_ckpt,
                         const std::filesystem::path& bundle_path);

// Rebuilds the matching inference-only net from a bundle. The architecture
// is recovered from the stored parameter names (a latent head means the
// policy runs on mu; otherwise it sits on the window summary).
StudentNets load_bundle(const std::filesystem::path& bundle_path,
                        const StudentTrainConfig& cfg);

}  // namespace hpc::student
