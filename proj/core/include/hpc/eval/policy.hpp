#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>

#include "hpc/envs/env.hpp"
#include "hpc/oracle/nets.hpp"
#include "hpc/student/nets.hpp"

namespace hpc::eval {

// Deterministic single-environment policy drive: every adapter acts with
// the distribution mean and keeps whatever recurrent state it needs.
class PolicyAdapter {
 public:
  virtual ~PolicyAdapter() = default;
  virtual void reset() = 0;
  virtual void act(const envs::Env& env, std::array<double, sim::kNumJoints>& out) = 0;
};

// A named, loaded policy. Exactly one of the two net pointers is set; the
// nets are shared read-only between the per-stream adapters.
struct VariantSpec {
  std::string name;
  std::shared_ptr<const oracle::OracleNets> oracle;
  std::shared_ptr<const student::StudentNets> student;
};

// Maps a variant name to its checkpoint in ckpt_dir (oracle.ckpt,
// student.ckpt, student_no_wm.ckpt, student_no_distill.ckpt) and loads it.
// Throws a named missing-checkpoint error if the file is absent.
VariantSpec load_variant(const std::string& name, const std::filesystem::path& ckpt_dir,
                         const config::RunConfig& cfg);

std::unique_ptr<PolicyAdapter> make_adapter(const VariantSpec& spec,
                                            const config::RunConfig& cfg);

}  // namespace hpc::eval
