#include "hpc/config/config.hpp"

#include <functional>
#include <set>

#include "json.hpp"

#include "hpc/common/io.hpp"
#include "hpc/common/version.hpp"

namespace hpc::config {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <typename T>
  void get(const char* name, T& out) {
    auto it = j_.find(name);
    if (it == j_.end()) return;
    used_.insert(name);
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(join(name) + ": bad value (" + e.what() + ")");
    }
  }

  void child(const char* name, const std::function<void(Reader&)>& fn) {
    auto it = j_.find(name);
    if (it == j_.end()) return;
    used_.insert(name);
    Reader sub(*it, join(name));
    fn(sub);
    sub.finish();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key()))
        throw ConfigError("unknown config key: " + join(it.key().c_str()));
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }
  std::string join(const char* name) const {
    return path_.empty() ? std::string(name) : path_ + "." + name;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void read_physics(Reader& r, sim::PhysicsParams& p) {
  r.get("gravity", p.gravity);
  r.get("torso_mass", p.torso_mass);
  r.get("torso_inertia", p.torso_inertia);
  r.get("joint_inertia", p.joint_inertia);
  r.get("joint_damping", p.joint_damping);
  r.get("thigh_len", p.thigh_len);
  r.get("shank_len", p.shank_len);
  r.get("hip_offset", p.hip_offset);
  r.get("contact_stiffness", p.contact_stiffness);
  r.get("contact_damping", p.contact_damping);
  r.get("friction", p.friction);
  r.get("tangent_gain", p.tangent_gain);
  r.get("control_dt", p.control_dt);
  r.get("substeps", p.substeps);
}

void read_gains(Reader& r, sim::PdGains& g) {
  double kp = g.kp[0], kd = g.kd[0];
  r.get("kp", kp);
  r.get("kd", kd);
  g.kp.fill(kp);
  g.kd.fill(kd);
  r.get("torque_limit", g.torque_limit);
}

void read_reward(Reader& r, sim::RewardConfig& c) {
  r.get("w_lin_track", c.w_lin_track);
  r.get("lin_sharpness", c.lin_sharpness);
  r.get("w_ang_track", c.w_ang_track);
  r.get("ang_sharpness", c.ang_sharpness);
  r.get("w_alive", c.w_alive);
  r.get("w_torque", c.w_torque);
  r.get("w_action_rate", c.w_action_rate);
  r.get("w_joint_limit", c.w_joint_limit);
  r.get("w_vertical_vel", c.w_vertical_vel);
  r.get("w_orientation", c.w_orientation);
  r.get("w_fall", c.w_fall);
  r.get("joint_limit_margin", c.joint_limit_margin);
}

void read_terrain(Reader& r, TerrainConfig& t) {
  r.get("families", t.families);
  for (const auto& f : t.families) terrain::family_from_name(f);  // validate early
  r.get("max_level", t.max_level);
  r.get("promote_distance", t.promote_distance);
  r.get("demote_distance", t.demote_distance);
  r.get("length", t.length);
  r.get("cell_size", t.cell_size);
}

void read_noise(Reader& r, NoiseConfig& n) {
  r.child("scan", [&](Reader& s) {
    s.get("alpha_lo", n.scan.alpha_lo);
    s.get("alpha_hi", n.scan.alpha_hi);
    s.get("beta_std", n.scan.beta_std);
    s.get("per_cell_alpha", n.scan.per_cell_alpha);
    s.get("per_cell_beta", n.scan.per_cell_beta);
    s.child("gp", [&](Reader& g) {
      g.get("variance", n.scan.gp.variance);
      g.get("length_scale_start", n.scan.gp.length_scale_start);
      g.get("length_scale_end", n.scan.gp.length_scale_end);
      g.get("length_scale_steps", n.scan.gp.length_scale_steps);
    });
  });
  r.child("domain", [&](Reader& d) {
    d.get("enabled", n.domain.enabled);
    d.get("ang_vel_range", n.domain.ang_vel_range);
    d.get("gravity_obs_range", n.domain.gravity_obs_range);
    d.get("joint_pos_range", n.domain.joint_pos_range);
    d.get("joint_vel_range", n.domain.joint_vel_range);
    d.get("motor_offset_range", n.domain.motor_offset_range);
    d.get("friction_lo", n.domain.friction_lo);
    d.get("friction_hi", n.domain.friction_hi);
    d.get("payload_range", n.domain.payload_range);
    d.get("gravity_range", n.domain.gravity_range);
    d.get("damping_lo", n.domain.damping_lo);
    d.get("damping_hi", n.domain.damping_hi);
    d.get("stiffness_lo", n.domain.stiffness_lo);
    d.get("stiffness_hi", n.domain.stiffness_hi);
  });
}

void read_oracle(Reader& r, OracleConfig& o) {
  r.child("ppo", [&](Reader& p) {
    p.get("gamma", o.ppo.gamma);
    p.get("gae_lambda", o.ppo.gae_lambda);
    p.get("clip_ratio", o.ppo.clip_ratio);
    p.get("epochs", o.ppo.epochs);
    p.get("minibatches", o.ppo.minibatches);
    p.get("entropy_coef", o.ppo.entropy_coef);
    p.get("value_coef", o.ppo.value_coef);
    p.get("learning_rate", o.ppo.learning_rate);
    p.get("num_envs", o.ppo.num_envs);
    p.get("horizon", o.ppo.horizon);
    p.get("max_grad_norm", o.ppo.max_grad_norm);
    p.get("iterations", o.ppo.iterations);
    p.get("checkpoint_every", o.ppo.checkpoint_every);
    p.get("log_std_init", o.ppo.log_std_init);
    p.get("log_std_lo", o.ppo.log_std_lo);
    p.get("log_std_hi", o.ppo.log_std_hi);
  });
  r.child("nets", [&](Reader& n) {
    n.get("encoder_hidden", o.nets.encoder_hidden);
    n.get("d_e", o.nets.d_e);
    n.get("lstm_hidden", o.nets.lstm_hidden);
    n.get("head_hidden", o.nets.head_hidden);
  });
  r.child("commands", [&](Reader& c) {
    c.get("vx_lo", o.commands.vx_lo);
    c.get("vx_hi", o.commands.vx_hi);
    c.get("pitch_rate", o.commands.pitch_rate);
  });
}

void read_student(Reader& r, student::StudentTrainConfig& s) {
  r.get("window", s.window);
  r.get("d_z", s.d_z);
  r.get("lstm_hidden", s.lstm_hidden);
  r.get("encoder_hidden", s.encoder_hidden);
  r.get("d_e", s.d_e);
  r.get("decoder_hidden", s.decoder_hidden);
  r.get("policy_hidden", s.policy_hidden);
  r.get("lambda_elbo", s.lambda_elbo);
  r.get("beta_base", s.beta_base);
  r.get("beta_slope", s.beta_slope);
  r.get("beta_cap", s.beta_cap);
  r.get("log_sigma_lo", s.log_sigma_lo);
  r.get("log_sigma_hi", s.log_sigma_hi);
  r.get("learning_rate", s.learning_rate);
  r.get("minibatch", s.minibatch);
  r.get("updates_per_round_scale", s.updates_per_round_scale);
  r.get("num_envs", s.num_envs);
  r.get("steps_per_round", s.steps_per_round);
  r.get("rounds", s.rounds);
  r.get("buffer_capacity", s.buffer_capacity);
  r.get("max_grad_norm", s.max_grad_norm);
  r.get("stop_policy_gradient_to_encoder", s.stop_policy_gradient_to_encoder);
  r.get("checkpoint_every_rounds", s.checkpoint_every_rounds);
  r.get("train_intensity", s.train_intensity);
}

void read_eval(Reader& r, eval::EvalConfig& e) {
  r.get("episodes_per_condition", e.episodes_per_condition);
  r.get("intensities", e.intensities);
  r.get("streams", e.streams);
  r.get("dynamics_randomization", e.dynamics_randomization);
  r.get("start_level", e.start_level);
  r.get("vx_lo", e.vx_lo);
  r.get("vx_hi", e.vx_hi);
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid json: ") + e.what());
  }
  RunConfig cfg;
  Reader root(j, "");
  root.get("episode_seconds", cfg.episode_seconds);
  root.child("physics", [&](Reader& r) { read_physics(r, cfg.physics); });
  root.child("gains", [&](Reader& r) { read_gains(r, cfg.gains); });
  root.child("reward", [&](Reader& r) { read_reward(r, cfg.reward); });
  root.child("terrain", [&](Reader& r) { read_terrain(r, cfg.terrain); });
  root.child("noise", [&](Reader& r) { read_noise(r, cfg.noise); });
  root.child("oracle", [&](Reader& r) { read_oracle(r, cfg.oracle); });
  root.child("student", [&](Reader& r) { read_student(r, cfg.student); });
  root.child("eval", [&](Reader& r) { read_eval(r, cfg.eval); });
  root.finish();
  if (cfg.oracle.ppo.num_envs % cfg.oracle.ppo.minibatches != 0)
    throw ConfigError("oracle.ppo.minibatches must divide num_envs");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

std::string to_json(const RunConfig& c) {
  json j;
  j["episode_seconds"] = c.episode_seconds;
  j["physics"] = {{"gravity", c.physics.gravity},
                  {"torso_mass", c.physics.torso_mass},
                  {"torso_inertia", c.physics.torso_inertia},
                  {"joint_inertia", c.physics.joint_inertia},
                  {"joint_damping", c.physics.joint_damping},
                  {"thigh_len", c.physics.thigh_len},
                  {"shank_len", c.physics.shank_len},
                  {"hip_offset", c.physics.hip_offset},
                  {"contact_stiffness", c.physics.contact_stiffness},
                  {"contact_damping", c.physics.contact_damping},
                  {"friction", c.physics.friction},
                  {"tangent_gain", c.physics.tangent_gain},
                  {"control_dt", c.physics.control_dt},
                  {"substeps", c.physics.substeps}};
  j["gains"] = {{"kp", c.gains.kp[0]}, {"kd", c.gains.kd[0]}, {"torque_limit", c.gains.torque_limit}};
  j["reward"] = {{"w_lin_track", c.reward.w_lin_track},
                 {"lin_sharpness", c.reward.lin_sharpness},
                 {"w_ang_track", c.reward.w_ang_track},
                 {"ang_sharpness", c.reward.ang_sharpness},
                 {"w_alive", c.reward.w_alive},
                 {"w_torque", c.reward.w_torque},
                 {"w_action_rate", c.reward.w_action_rate},
                 {"w_joint_limit", c.reward.w_joint_limit},
                 {"w_vertical_vel", c.reward.w_vertical_vel},
                 {"w_orientation", c.reward.w_orientation},
                 {"w_fall", c.reward.w_fall},
                 {"joint_limit_margin", c.reward.joint_limit_margin}};
  j["terrain"] = {{"families", c.terrain.families},
                  {"max_level", c.terrain.max_level},
                  {"promote_distance", c.terrain.promote_distance},
                  {"demote_distance", c.terrain.demote_distance},
                  {"length", c.terrain.length},
                  {"cell_size", c.terrain.cell_size}};
  j["noise"] = {{"scan",
                 {{"alpha_lo", c.noise.scan.alpha_lo},
                  {"alpha_hi", c.noise.scan.alpha_hi},
                  {"beta_std", c.noise.scan.beta_std},
                  {"per_cell_alpha", c.noise.scan.per_cell_alpha},
                  {"per_cell_beta", c.noise.scan.per_cell_beta},
                  {"gp",
                   {{"variance", c.noise.scan.gp.variance},
                    {"length_scale_start", c.noise.scan.gp.length_scale_start},
                    {"length_scale_end", c.noise.scan.gp.length_scale_end},
                    {"length_scale_steps", c.noise.scan.gp.length_scale_steps}}}}},
                {"domain",
                 {{"enabled", c.noise.domain.enabled},
                  {"ang_vel_range", c.noise.domain.ang_vel_range},
                  {"gravity_obs_range", c.noise.domain.gravity_obs_range},
                  {"joint_pos_range", c.noise.domain.joint_pos_range},
                  {"joint_vel_range", c.noise.domain.joint_vel_range},
                  {"motor_offset_range", c.noise.domain.motor_offset_range},
                  {"friction_lo", c.noise.domain.friction_lo},
                  {"friction_hi", c.noise.domain.friction_hi},
                  {"payload_range", c.noise.domain.payload_range},
                  {"gravity_range", c.noise.domain.gravity_range},
                  {"damping_lo", c.noise.domain.damping_lo},
                  {"damping_hi", c.noise.domain.damping_hi},
                  {"stiffness_lo", c.noise.domain.stiffness_lo},
                  {"stiffness_hi", c.noise.domain.stiffness_hi}}}};
  j["oracle"] = {{"ppo",
                  {{"gamma", c.oracle.ppo.gamma},
                   {"gae_lambda", c.oracle.ppo.gae_lambda},
                   {"clip_ratio", c.oracle.ppo.clip_ratio},
                   {"epochs", c.oracle.ppo.epochs},
                   {"minibatches", c.oracle.ppo.minibatches},
                   {"entropy_coef", c.oracle.ppo.entropy_coef},
                   {"value_coef", c.oracle.ppo.value_coef},
                   {"learning_rate", c.oracle.ppo.learning_rate},
                   {"num_envs", c.oracle.ppo.num_envs},
                   {"horizon", c.oracle.ppo.horizon},
                   {"max_grad_norm", c.oracle.ppo.max_grad_norm},
                   {"iterations", c.oracle.ppo.iterations},
                   {"checkpoint_every", c.oracle.ppo.checkpoint_every},
                   {"log_std_init", c.oracle.ppo.log_std_init},
                   {"log_std_lo", c.oracle.ppo.log_std_lo},
                   {"log_std_hi", c.oracle.ppo.log_std_hi}}},
                 {"nets",
                  {{"encoder_hidden", c.oracle.nets.encoder_hidden},
                   {"d_e", c.oracle.nets.d_e},
                   {"lstm_hidden", c.oracle.nets.lstm_hidden},
                   {"head_hidden", c.oracle.nets.head_hidden}}},
                 {"commands",
                  {{"vx_lo", c.oracle.commands.vx_lo},
                   {"vx_hi", c.oracle.commands.vx_hi},
                   {"pitch_rate", c.oracle.commands.pitch_rate}}}};
  j["student"] = {{"window", c.student.window},
                  {"d_z", c.student.d_z},
                  {"lstm_hidden", c.student.lstm_hidden},
                  {"encoder_hidden", c.student.encoder_hidden},
                  {"d_e", c.student.d_e},
                  {"decoder_hidden", c.student.decoder_hidden},
                  {"policy_hidden", c.student.policy_hidden},
                  {"lambda_elbo", c.student.lambda_elbo},
                  {"beta_base", c.student.beta_base},
                  {"beta_slope", c.student.beta_slope},
                  {"beta_cap", c.student.beta_cap},
                  {"log_sigma_lo", c.student.log_sigma_lo},
                  {"log_sigma_hi", c.student.log_sigma_hi},
                  {"learning_rate", c.student.learning_rate},
                  {"minibatch", c.student.minibatch},
                  {"updates_per_round_scale", c.student.updates_per_round_scale},
                  {"num_envs", c.student.num_envs},
                  {"steps_per_round", c.student.steps_per_round},
                  {"rounds", c.student.rounds},
                  {"buffer_capacity", c.student.buffer_capacity},
                  {"max_grad_norm", c.student.max_grad_norm},
                  {"stop_policy_gradient_to_encoder", c.student.stop_policy_gradient_to_encoder},
                  {"checkpoint_every_rounds", c.student.checkpoint_every_rounds},
                  {"train_intensity", c.student.train_intensity}};
  j["eval"] = {{"episodes_per_condition", c.eval.episodes_per_condition},
               {"intensities", c.eval.intensities},
               {"streams", c.eval.streams},
               {"dynamics_randomization", c.eval.dynamics_randomization},
               {"start_level", c.eval.start_level},
               {"vx_lo", c.eval.vx_lo},
               {"vx_hi", c.eval.vx_hi}};
  return j.dump(2) + "\n";
}

void write_run_artifacts(const std::filesystem::path& out_dir, const RunConfig& cfg,
                         const std::string& subcommand, uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "config.json", to_json(cfg));
  json m;
  m["seed"] = seed;
  m["subcommand"] = subcommand;
  m["version"] = kVersion;
  write_text_file(out_dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace hpc::config
