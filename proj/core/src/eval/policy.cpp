#include "hpc/eval/policy.hpp"

#include <algorithm>
#include <stdexcept>

#include "hpc/ad/checkpoint.hpp"
#include "hpc/ad/tensor.hpp"
#include "hpc/student/train.hpp"

namespace hpc::eval {

namespace fs = std::filesystem;
using ad::Tensor;

namespace {

class OracleAdapter : public PolicyAdapter {
 public:
  OracleAdapter(std::shared_ptr<const oracle::OracleNets> nets, int hidden)
      : nets_(std::move(nets)), state_(ad::LstmState::zeros(1, hidden)), hidden_(hidden) {}

  void reset() override { state_ = ad::LstmState::zeros(1, hidden_); }

  void act(const envs::Env& env, std::array<double, sim::kNumJoints>& out) override {
    ad::NoGradGuard ng;
    auto p = env.privileged_noisy();
    Tensor obs = Tensor::from(std::vector<double>(p.begin(), p.end()), {1, sim::kPrivilegedDim});
    oracle::Tower::Out o = nets_->actor.forward(obs, state_);
    state_ = o.state.detached();
    auto m = o.out.data();
    std::copy(m.begin(), m.end(), out.begin());
  }

 private:
  std::shared_ptr<const oracle::OracleNets> nets_;
  ad::LstmState state_;
  int hidden_;
};

class StudentAdapter : public PolicyAdapter {
 public:
  StudentAdapter(std::shared_ptr<const student::StudentNets> nets, int window)
      : nets_(std::move(nets)), window_(window),
        frames_(static_cast<size_t>(window) * student::kFrameDim, 0.0) {}

  void reset() override { std::fill(frames_.begin(), frames_.end(), 0.0); }

  void act(const envs::Env& env, std::array<double, sim::kNumJoints>& out) override {
    ad::NoGradGuard ng;
    auto f = env.student();
    std::copy(frames_.begin() + student::kFrameDim, frames_.end(), frames_.begin());
    std::copy(f.begin(), f.end(), frames_.end() - student::kFrameDim);
    Tensor w = Tensor::from(frames_, {window_, student::kFrameDim});
    student::EncodeOut enc = nets_->encode(w, 1, false, nullptr);
    Tensor a = nets_->act(enc.z);
    auto m = a.data();
    std::copy(m.begin(), m.end(), out.begin());
  }

 private:
  std::shared_ptr<const student::StudentNets> nets_;
  int window_;
  std::vector<double> frames_;  // oldest first, batch of one
};

}  // namespace

VariantSpec load_variant(const std::string& name, const fs::path& ckpt_dir,
                         const config::RunConfig& cfg) {
  VariantSpec spec;
  spec.name = name;
  Rng scratch(0);
  if (name == "oracle") {
    const fs::path path = ckpt_dir / "oracle.ckpt";
    if (!fs::exists(path))
      throw std::runtime_error("missing checkpoint for variant 'oracle': " + path.string());
    auto nets = std::make_shared<oracle::OracleNets>(
        oracle::OracleNets::create(cfg.oracle.nets, cfg.oracle.ppo, scratch));
    ad::load_checkpoint(path, nets->params, oracle::kOracleCheckpointKind);
    spec.oracle = std::move(nets);
    return spec;
  }
  student::Variant v;
  if (name == "student") {
    v = student::Variant::kFull;
  } else if (name == "student_no_wm") {
    v = student::Variant::kNoWorldModel;
  } else if (name == "student_no_distill") {
    v = student::Variant::kNoDistill;
  } else {
    throw std::runtime_error("unknown variant '" + name +
                             "' (oracle, student, student_no_wm, student_no_distill)");
  }
  const fs::path path = ckpt_dir / student::checkpoint_filename(v);
  if (!fs::exists(path))
    throw std::runtime_error("missing checkpoint for variant '" + name + "': " + path.string());
  auto nets = std::make_shared<student::StudentNets>(
      student::StudentNets::create(cfg.student, v, scratch));
  ad::load_checkpoint(path, nets->params, student::checkpoint_kind(v));
  spec.student = std::move(nets);
  return spec;
}

std::unique_ptr<PolicyAdapter> make_adapter(const VariantSpec& spec,
                                            const config::RunConfig& cfg) {
  if (spec.oracle) {
    return std::make_unique<OracleAdapter>(spec.oracle, cfg.oracle.nets.lstm_hidden);
  }
  if (spec.student) {
    return std::make_unique<StudentAdapter>(spec.student, cfg.student.window);
  }
  throw std::runtime_error("variant '" + spec.name + "' has no loaded policy");
}

}  // namespace hpc::eval
