#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "msstrade/env.hpp"
#include "msstrade/metrics.hpp"
#include "msstrade/nn.hpp"

namespace mss {

enum class AgentKind { BuyAndHold, Turtle, Dqn, Ddpg, MssDdpg };

std::string agent_kind_name(AgentKind k);
AgentKind parse_agent_kind(const std::string& name);  // ConfigError on unknown

// ---- rule-based policies ----

// Rules from the turtle system: close above the trailing `buy_window` max of
// closes buys everything; close below the trailing `sell_window` min sells
// everything. Trailing windows exclude the current bar; short history holds.
Action turtle_decide(const BarSeries& history, std::size_t t, std::size_t buy_window = 20,
                     std::size_t sell_window = 10);

Action buy_and_hold_decide(std::size_t t, std::size_t start_t);

// ---- DDPG ----

struct DdpgHyper {
  double gamma = 0.99;
  double tau = 0.005;
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  std::size_t batch_size = 64;
  std::size_t replay_capacity = 100000;
  std::size_t warmup_steps = 1000;
  double noise_sigma = 0.2;
  std::vector<std::size_t> actor_hidden{64, 32};
  std::vector<std::size_t> critic_hidden{64, 32};
};

struct TrainStepStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;
};

class DdpgAgent {
 public:
  DdpgAgent(std::size_t obs_dim, DdpgHyper hyper, std::uint64_t seed);

  // Deterministic actor output in [-1,1]; exploration adds clamped Gaussian
  // noise with the given sigma (hyper.noise_sigma when omitted).
  double act(std::span<const double> obs, bool explore, std::mt19937_64& rng) const;
  double act(std::span<const double> obs, bool explore, double sigma,
             std::mt19937_64& rng) const;

  double critic_value(std::span<const double> obs, double raw) const;

  // Bootstrap targets y = r + gamma * (1-done) * Q_target(s', mu_target(s')),
  // exposed so tests can probe that targets come from the target nets.
  std::vector<double> critic_targets(const std::vector<Transition>& batch) const;

  TrainStepStats train_step(const std::vector<Transition>& batch);
  // NotReadyError until warmup_steps (and one batch) of transitions exist.
  TrainStepStats train_from_replay(std::mt19937_64& rng);

  ReplayBuffer& replay() { return replay_; }
  const ReplayBuffer& replay() const { return replay_; }
  const DdpgHyper& hyper() const { return hyper_; }
  std::size_t obs_dim() const { return obs_dim_; }

  Mlp& actor() { return actor_; }
  Mlp& critic() { return critic_; }
  Mlp& actor_target() { return actor_target_; }
  Mlp& critic_target() { return critic_target_; }
  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& actor_target() const { return actor_target_; }
  const Mlp& critic_target() const { return critic_target_; }

  void save(const std::string& path) const;
  void load(const std::string& path);  // CheckpointError on shape mismatch

 private:
  std::size_t obs_dim_;
  DdpgHyper hyper_;
  Mlp actor_, critic_, actor_target_, critic_target_;
  AdamState actor_opt_, critic_opt_;
  ReplayBuffer replay_;
};

// ---- DQN ----

struct DqnHyper {
  double gamma = 0.99;
  double lr = 1e-3;
  std::size_t batch_size = 64;
  std::size_t replay_capacity = 100000;
  std::size_t warmup_steps = 1000;
  std::size_t target_sync_period = 250;
  double epsilon = 0.1;
  std::vector<std::size_t> hidden{64, 32};
};

class DqnAgent {
 public:
  DqnAgent(std::size_t obs_dim, DqnHyper hyper, std::uint64_t seed);

  std::size_t act(std::span<const double> obs, double epsilon, std::mt19937_64& rng) const;
  std::size_t greedy(std::span<const double> obs) const;
  std::vector<double> q_values(std::span<const double> obs) const;

  // y = r + gamma * (1-done) * max_a' Q_target(s', a').
  std::vector<double> dqn_targets(const std::vector<Transition>& batch) const;

  double train_step(const std::vector<Transition>& batch);
  double train_from_replay(std::mt19937_64& rng);

  ReplayBuffer& replay() { return replay_; }
  const ReplayBuffer& replay() const { return replay_; }
  const DqnHyper& hyper() const { return hyper_; }
  std::size_t steps_since_sync() const { return steps_since_sync_; }

  Mlp& qnet() { return qnet_; }
  Mlp& qnet_target() { return qnet_target_; }
  const Mlp& qnet() const { return qnet_; }
  const Mlp& qnet_target() const { return qnet_target_; }

  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  std::size_t obs_dim_;
  DqnHyper hyper_;
  Mlp qnet_, qnet_target_;
  AdamState opt_;
  ReplayBuffer replay_;
  std::size_t steps_since_sync_ = 0;
};

// ---- training / evaluation drivers ----

struct TrainSchedule {
  std::size_t episodes = 30;
  std::size_t episode_length = 252;
  double explore_start = 0.2;  // noise sigma (DDPG) or epsilon (DQN)
  double explore_end = 0.05;
};

struct TrainingRecord {
  std::size_t episode = 0;
  std::size_t steps = 0;
  double episode_return = 0.0;  // product of (1 + r) - 1 over the episode
  double critic_loss = 0.0;     // mean over the episode's train steps
  double actor_objective = 0.0;
  double exploration = 0.0;
};

struct TrainingLog {
  std::vector<TrainingRecord> records;
  std::string csv() const;
};

// Runs random-window episodes on the timeline's span. Uniform random actions
// fill the replay until warmup; exploration anneals linearly across episodes.
// Identical seeds give identical agents and logs.
TrainingLog train_ddpg(DdpgAgent& agent, const ObservationTimeline& timeline,
                       const EnvConfig& env_cfg, const TrainSchedule& sched,
                       std::uint64_t seed);

TrainingLog train_dqn(DqnAgent& agent, const ObservationTimeline& timeline,
                      const EnvConfig& env_cfg, const TrainSchedule& sched, std::uint64_t seed);

using Policy = std::function<Action(const TradingEnv& env)>;

Policy make_buy_and_hold_policy(std::size_t start_t);
Policy make_turtle_policy(std::size_t buy_window = 20, std::size_t sell_window = 10);
Policy make_ddpg_policy(const DdpgAgent& agent);
Policy make_dqn_policy(const DqnAgent& agent);

// Greedy rollout from start_t to the end of the timeline; the equity curve
// holds the portfolio value at every visited bar close, starting at start_t.
EquityCurve evaluate_policy(const ObservationTimeline& timeline, const EnvConfig& env_cfg,
                            std::size_t start_t, const Policy& policy);

// Normalized buy-the-index curve over [begin, end]: initial * close/close[begin].
EquityCurve market_curve(const BarSeries& series, std::size_t begin, std::size_t end,
                         double initial);

}  // namespace mss
