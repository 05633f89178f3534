#include "hpc/eval/evaluate.hpp"

#include <algorithm>
#include <stdexcept>

#include "hpc/ad/checkpoint.hpp"
#include "hpc/common/log.hpp"
#include "hpc/common/parallel.hpp"
#include "hpc/eval/stats.hpp"

namespace hpc::eval {

double EvalCell::mean_terrain() const {
  if (episodes.empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : episodes) s += e.level_after;
  return s / static_cast<double>(episodes.size());
}

uint64_t stream_env_seed(uint64_t base_seed, int stream) {
  return Rng(base_seed).derive(9000, static_cast<uint64_t>(stream)).next_u64();
}

namespace {

// Episodes for one stream of one condition, driven deterministically.
std::vector<EpisodeResult> run_stream(const config::RunConfig& cfg, const VariantSpec& spec,
                                      double intensity, int stream, uint64_t base_seed,
                                      int episodes) {
  envs::EnvOptions opt;
  opt.dynamics_randomization = cfg.eval.dynamics_randomization;
  opt.noise_intensity = intensity;
  opt.gp_length_scale = cfg.noise.scan.gp.length_scale_end;
  opt.start_level = cfg.eval.start_level;
  opt.vx_lo = cfg.eval.vx_lo;
  opt.vx_hi = cfg.eval.vx_hi;

  envs::Env env(cfg, stream_env_seed(base_seed, stream), 0, opt);
  std::unique_ptr<PolicyAdapter> policy = make_adapter(spec, cfg);
  std::vector<EpisodeResult> out;
  out.reserve(episodes);

  std::array<double, sim::kNumJoints> action{};
  const int step_cap = static_cast<int>(cfg.episode_seconds * 50.0) + 8;
  for (int ep = 0; ep < episodes; ++ep) {
    policy->reset();
    for (int t = 0; t < step_cap; ++t) {
      policy->act(env, action);
      if (env.step(action).done) break;
    }
    const envs::EpisodeStats& st = env.finished_stats();
    EpisodeResult r;
    r.stream = stream;
    r.episode = ep;
    r.vel_err = st.mean_vel_err();
    r.ang_err = st.mean_ang_err();
    r.reward_return = st.reward_return;
    r.walked = st.walked;
    r.steps = st.steps;
    r.level_after = env.level();  // post promote/demote
    out.push_back(r);
  }
  return out;
}

}  // namespace

MetricsRow aggregate_row(const std::string& variant, double intensity,
                         const std::vector<const EvalCell*>& cells) {
  std::vector<double> vel, ang, ter, rew;
  for (const EvalCell* c : cells) {
    for (const auto& e : c->episodes) {
      vel.push_back(e.vel_err);
      ang.push_back(e.ang_err);
      ter.push_back(e.level_after);
      rew.push_back(e.reward_return);
    }
  }
  MetricsRow row;
  row.variant = variant;
  row.intensity = intensity;
  row.episodes = static_cast<int>(vel.size());
  row.e_vel = mean(vel);
  row.e_vel_std = sample_std(vel);
  row.e_ang = mean(ang);
  row.e_ang_std = sample_std(ang);
  row.m_terrain = mean(ter);
  row.m_terrain_std = sample_std(ter);
  row.m_reward = mean(rew);
  row.m_reward_std = sample_std(rew);
  return row;
}

EvalRunResult evaluate(const config::RunConfig& cfg, const std::vector<VariantSpec>& variants,
                       const std::vector<double>& intensities,
                       const std::vector<uint64_t>& seeds, int workers) {
  if (variants.empty() || intensities.empty() || seeds.empty())
    throw std::invalid_argument("evaluate: variants, intensities and seeds must be nonempty");
  const int S = cfg.eval.streams;
  if (S < 1) throw std::invalid_argument("evaluate: eval.streams must be >= 1");
  const int total_eps = cfg.eval.episodes_per_condition;

  std::vector<uint64_t> hashes_before;
  for (const auto& v : variants) {
    hashes_before.push_back(v.oracle ? ad::param_hash(v.oracle->params)
                                     : ad::param_hash(v.student->params));
  }

  struct Job {
    size_t vi, ii, si;
    int stream;
    int episodes;
  };
  std::vector<Job> jobs;
  for (size_t vi = 0; vi < variants.size(); ++vi) {
    for (size_t ii = 0; ii < intensities.size(); ++ii) {
      for (size_t si = 0; si < seeds.size(); ++si) {
        for (int s = 0; s < S; ++s) {
          const int eps = total_eps / S + (s < total_eps % S ? 1 : 0);
          if (eps > 0) jobs.push_back({vi, ii, si, s, eps});
        }
      }
    }
  }

  std::vector<std::vector<EpisodeResult>> slots(jobs.size());
  WorkerPool pool(workers);
  pool.for_each(static_cast<int>(jobs.size()), [&](int j) {
    const Job& job = jobs[j];
    slots[j] = run_stream(cfg, variants[job.vi], intensities[job.ii], job.stream,
                          seeds[job.si], job.episodes);
  });

  // sorted reduction: job list order is already (variant, intensity, seed,
  // stream) lexicographic, so a linear pass groups correctly
  EvalRunResult res;
  for (size_t vi = 0; vi < variants.size(); ++vi) {
    for (size_t ii = 0; ii < intensities.size(); ++ii) {
      for (size_t si = 0; si < seeds.size(); ++si) {
        EvalCell cell;
        cell.variant = variants[vi].name;
        cell.intensity = intensities[ii];
        cell.seed = seeds[si];
        res.cells.push_back(std::move(cell));
      }
    }
  }
  for (size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    const size_t ci =
        (job.vi * intensities.size() + job.ii) * seeds.size() + job.si;
    auto& eps = res.cells[ci].episodes;
    eps.insert(eps.end(), slots[j].begin(), slots[j].end());
  }

  for (size_t vi = 0; vi < variants.size(); ++vi) {
    for (size_t ii = 0; ii < intensities.size(); ++ii) {
      std::vector<const EvalCell*> group;
      for (size_t si = 0; si < seeds.size(); ++si) {
        group.push_back(&res.cells[(vi * intensities.size() + ii) * seeds.size() + si]);
      }
      res.rows.push_back(aggregate_row(variants[vi].name, intensities[ii], group));
    }
  }

  for (size_t i = 0; i < variants.size(); ++i) {
    const uint64_t after = variants[i].oracle ? ad::param_hash(variants[i].oracle->params)
                                              : ad::param_hash(variants[i].student->params);
    if (after != hashes_before[i])
      throw std::runtime_error("evaluation mutated parameters of variant '" +
                               variants[i].name + "'");
  }
  return res;
}

}  // namespace hpc::eval
