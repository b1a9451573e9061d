#include "msstrade/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "msstrade/errors.hpp"

namespace mss {

std::string agent_kind_name(AgentKind k) {
  switch (k) {
    case AgentKind::BuyAndHold: return "buy_and_hold";
    case AgentKind::Turtle: return "turtle";
    case AgentKind::Dqn: return "dqn";
    case AgentKind::Ddpg: return "ddpg";
    case AgentKind::MssDdpg: return "mssddpg";
  }
  return "?";
}

AgentKind parse_agent_kind(const std::string& name) {
  if (name == "buy_and_hold") return AgentKind::BuyAndHold;
  if (name == "turtle") return AgentKind::Turtle;
  if (name == "dqn") return AgentKind::Dqn;
  if (name == "ddpg") return AgentKind::Ddpg;
  if (name == "mssddpg") return AgentKind::MssDdpg;
  throw ConfigError("unknown agent kind '" + name + "'");
}

Action turtle_decide(const BarSeries& history, std::size_t t, std::size_t buy_window,
                     std::size_t sell_window) {
  if (t >= history.bars.size()) throw IndexError("turtle_decide index out of range");
  const double close = history.bars[t].close;
  if (t >= buy_window) {
    double hi = history.bars[t - buy_window].close;
    for (std::size_t i = t - buy_window + 1; i < t; ++i) {
      hi = std::max(hi, history.bars[i].close);
    }
    if (close > hi) return {ActionKind::Buy, 1.0};
  }
  if (t >= sell_window) {
    double lo = history.bars[t - sell_window].close;
    for (std::size_t i = t - sell_window + 1; i < t; ++i) {
      lo = std::min(lo, history.bars[i].close);
    }
    if (close < lo) return {ActionKind::Sell, 1.0};
  }
  return {ActionKind::Hold, 0.0};
}

Action buy_and_hold_decide(std::size_t t, std::size_t start_t) {
  if (t == start_t) return {ActionKind::Buy, 1.0};
  return {ActionKind::Hold, 0.0};
}

// ---- DDPG ----

namespace {

Mlp make_head(std::size_t in, const std::vector<std::size_t>& hidden, Activation final_act,
              std::uint64_t seed) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  std::vector<Activation> acts(hidden.size(), Activation::Relu);
  acts.push_back(final_act);
  return Mlp::make(dims, acts, seed);
}

std::vector<double> concat_obs_action(std::span<const double> obs, double raw) {
  std::vector<double> x(obs.begin(), obs.end());
  x.push_back(raw);
  return x;
}

}  // namespace

DdpgAgent::DdpgAgent(std::size_t obs_dim, DdpgHyper hyper, std::uint64_t seed)
    : obs_dim_(obs_dim),
      hyper_(std::move(hyper)),
      actor_(make_head(obs_dim, hyper_.actor_hidden, Activation::Tanh, seed)),
      critic_(make_head(obs_dim + 1, hyper_.critic_hidden, Activation::Identity, seed + 1)),
      actor_target_(actor_),
      critic_target_(critic_),
      actor_opt_(AdamState::zeros_like(actor_)),
      critic_opt_(AdamState::zeros_like(critic_)),
      replay_(hyper_.replay_capacity) {
  if (!(hyper_.gamma >= 0 && hyper_.gamma < 1)) throw ConfigError("gamma must be in [0,1)");
  if (!(hyper_.tau > 0 && hyper_.tau <= 1)) throw ConfigError("tau must be in (0,1]");
}

double DdpgAgent::act(std::span<const double> obs, bool explore, std::mt19937_64& rng) const {
  return act(obs, explore, hyper_.noise_sigma, rng);
}

double DdpgAgent::act(std::span<const double> obs, bool explore, double sigma,
                      std::mt19937_64& rng) const {
  double raw = forward(actor_, obs)[0];
  if (explore) {
    std::normal_distribution<double> noise(0.0, sigma);
    raw += noise(rng);
  }
  return std::clamp(raw, -1.0, 1.0);
}

double DdpgAgent::critic_value(std::span<const double> obs, double raw) const {
  return forward(critic_, concat_obs_action(obs, raw))[0];
}

std::vector<double> DdpgAgent::critic_targets(const std::vector<Transition>& batch) const {
  std::vector<double> ys;
  ys.reserve(batch.size());
  for (const Transition& tr : batch) {
    double y = tr.reward;
    if (!tr.done) {
      const double a_next = forward(actor_target_, tr.next_state)[0];
      y += hyper_.gamma * forward(critic_target_, concat_obs_action(tr.next_state, a_next))[0];
    }
    ys.push_back(y);
  }
  return ys;
}

TrainStepStats DdpgAgent::train_step(const std::vector<Transition>& batch) {
  if (batch.empty()) throw SpecError("empty train batch");
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  const std::vector<double> ys = critic_targets(batch);

  // critic regression toward the bootstrap targets
  TrainStepStats stats;
  Gradients critic_grad = Gradients::zeros_like(critic_);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    ForwardCache cache;
    const double q = forward(critic_, concat_obs_action(batch[i].state, batch[i].action[0]),
                             &cache)[0];
    const double err = q - ys[i];
    stats.critic_loss += err * err * inv_b;
    const double upstream[1] = {2.0 * err * inv_b};
    critic_grad.add(backward(critic_, cache, upstream));
  }
  adam_step(critic_, critic_grad, critic_opt_, hyper_.lr_critic);

  // actor ascent on the sampled policy objective mean Q(s, mu(s))
  Gradients actor_grad = Gradients::zeros_like(actor_);
  for (const Transition& tr : batch) {
    ForwardCache actor_cache, critic_cache;
    const double a = forward(actor_, tr.state, &actor_cache)[0];
    const double q = forward(critic_, concat_obs_action(tr.state, a), &critic_cache)[0];
    stats.actor_objective += q * inv_b;
    const double one[1] = {1.0};
    std::vector<double> dq_dinput;
    backward(critic_, critic_cache, one, &dq_dinput);
    const double dq_da[1] = {dq_dinput.back() * inv_b};
    actor_grad.add(backward(actor_, actor_cache, dq_da));
  }
  actor_grad.scale(-1.0);  // Adam minimizes; objective is maximized
  adam_step(actor_, actor_grad, actor_opt_, hyper_.lr_actor);

  soft_update(actor_target_, actor_, hyper_.tau);
  soft_update(critic_target_, critic_, hyper_.tau);
  return stats;
}

TrainStepStats DdpgAgent::train_from_replay(std::mt19937_64& rng) {
  const std::size_t need = std::max(hyper_.warmup_steps, hyper_.batch_size);
  if (replay_.size() < need) {
    throw NotReadyError("replay holds " + std::to_string(replay_.size()) + " of " +
                        std::to_string(need) + " warmup transitions");
  }
  return train_step(replay_.sample(hyper_.batch_size, rng));
}

void DdpgAgent::save(const std::string& path) const {
  save_checkpoint(path, {{"actor", &actor_},
                         {"critic", &critic_},
                         {"actor_target", &actor_target_},
                         {"critic_target", &critic_target_}});
}

void DdpgAgent::load(const std::string& path) {
  auto nets = load_checkpoint(path);
  auto take = [&](const std::string& name) -> Mlp {
    for (auto& [n, net] : nets) {
      if (n == name) return std::move(net);
    }
    throw CheckpointError("checkpoint missing net '" + name + "'");
  };
  Mlp actor = take("actor");
  if (actor.input_size() != obs_dim_) {
    throw CheckpointError("checkpoint actor input dim mismatch");
  }
  actor_ = std::move(actor);
  critic_ = take("critic");
  actor_target_ = take("actor_target");
  critic_target_ = take("critic_target");
  actor_opt_ = AdamState::zeros_like(actor_);
  critic_opt_ = AdamState::zeros_like(critic_);
}

// ---- DQN ----

namespace {

Mlp make_qnet(std::size_t in, const std::vector<std::size_t>& hidden, std::uint64_t seed) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(kDiscreteActionCount);
  std::vector<Activation> acts(hidden.size(), Activation::Relu);
  acts.push_back(Activation::Identity);
  return Mlp::make(dims, acts, seed);
}

std::size_t argmax(const std::vector<double>& xs) {
  return static_cast<std::size_t>(std::max_element(xs.begin(), xs.end()) - xs.begin());
}

}  // namespace

DqnAgent::DqnAgent(std::size_t obs_dim, DqnHyper hyper, std::uint64_t seed)
    : obs_dim_(obs_dim),
      hyper_(std::move(hyper)),
      qnet_(make_qnet(obs_dim, hyper_.hidden, seed)),
      qnet_target_(qnet_),
      opt_(AdamState::zeros_like(qnet_)),
      replay_(hyper_.replay_capacity) {
  if (!(hyper_.gamma >= 0 && hyper_.gamma < 1)) throw ConfigError("gamma must be in [0,1)");
  if (!(hyper_.epsilon >= 0 && hyper_.epsilon <= 1)) throw ConfigError("epsilon must be in [0,1]");
}

std::vector<double> DqnAgent::q_values(std::span<const double> obs) const {
  return forward(qnet_, obs);
}

std::size_t DqnAgent::greedy(std::span<const double> obs) const { return argmax(q_values(obs)); }

std::size_t DqnAgent::act(std::span<const double> obs, double epsilon,
                          std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, kDiscreteActionCount - 1);
    return pick(rng);
  }
  return greedy(obs);
}

std::vector<double> DqnAgent::dqn_targets(const std::vector<Transition>& batch) const {
  std::vector<double> ys;
  ys.reserve(batch.size());
  for (const Transition& tr : batch) {
    double y = tr.reward;
    if (!tr.done) {
      const std::vector<double> q_next = forward(qnet_target_, tr.next_state);
      y += hyper_.gamma * *std::max_element(q_next.begin(), q_next.end());
    }
    ys.push_back(y);
  }
  return ys;
}

double DqnAgent::train_step(const std::vector<Transition>& batch) {
  if (batch.empty()) throw SpecError("empty train batch");
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  const std::vector<double> ys = dqn_targets(batch);
  Gradients grad = Gradients::zeros_like(qnet_);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    ForwardCache cache;
    const std::vector<double> q = forward(qnet_, batch[i].state, &cache);
    const auto a = static_cast<std::size_t>(batch[i].action[0]);
    if (a >= kDiscreteActionCount) throw IndexError("transition action index out of range");
    const double err = q[a] - ys[i];
    loss += err * err * inv_b;
    std::vector<double> upstream(kDiscreteActionCount, 0.0);
    upstream[a] = 2.0 * err * inv_b;
    grad.add(backward(qnet_, cache, upstream));
  }
  adam_step(qnet_, grad, opt_, hyper_.lr);
  if (++steps_since_sync_ >= hyper_.target_sync_period) {
    hard_update(qnet_target_, qnet_);
    steps_since_sync_ = 0;
  }
  return loss;
}

double DqnAgent::train_from_replay(std::mt19937_64& rng) {
  const std::size_t need = std::max(hyper_.warmup_steps, hyper_.batch_size);
  if (replay_.size() < need) {
    throw NotReadyError("replay holds " + std::to_string(replay_.size()) + " of " +
                        std::to_string(need) + " warmup transitions");
  }
  return train_step(replay_.sample(hyper_.batch_size, rng));
}

void DqnAgent::save(const std::string& path) const {
  save_checkpoint(path, {{"qnet", &qnet_}, {"qnet_target", &qnet_target_}});
}

void DqnAgent::load(const std::string& path) {
  auto nets = load_checkpoint(path);
  for (auto& [name, net] : nets) {
    if (name == "qnet") {
      if (net.input_size() != obs_dim_) throw CheckpointError("checkpoint qnet dim mismatch");
      qnet_ = std::move(net);
    } else if (name == "qnet_target") {
      qnet_target_ = std::move(net);
    }
  }
  opt_ = AdamState::zeros_like(qnet_);
}

// ---- drivers ----

std::string TrainingLog::csv() const {
  std::ostringstream out;
  out << "episode,steps,episode_return,critic_loss,actor_objective,exploration\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  for (const TrainingRecord& r : records) {
    out << r.episode << ',' << r.steps << ',' << num(r.episode_return) << ','
        << num(r.critic_loss) << ',' << num(r.actor_objective) << ',' << num(r.exploration)
        << '\n';
  }
  return out.str();
}

namespace {

double annealed(const TrainSchedule& sched, std::size_t episode) {
  if (sched.episodes <= 1) return sched.explore_start;
  const double f = static_cast<double>(episode) / static_cast<double>(sched.episodes - 1);
  return sched.explore_start + f * (sched.explore_end - sched.explore_start);
}

}  // namespace

TrainingLog train_ddpg(DdpgAgent& agent, const ObservationTimeline& timeline,
                       const EnvConfig& env_cfg, const TrainSchedule& sched,
                       std::uint64_t seed) {
  EnvConfig cfg = env_cfg;
  cfg.episode = EpisodeMode::RandomWindow;
  cfg.window_steps = sched.episode_length;
  TradingEnv env(timeline, cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform_raw(-1.0, 1.0);

  TrainingLog log;
  std::size_t total_steps = 0;
  for (std::size_t ep = 0; ep < sched.episodes; ++ep) {
    const double sigma = annealed(sched, ep);
    std::vector<double> obs = env.reset(rng);
    TrainingRecord rec;
    rec.episode = ep;
    rec.exploration = sigma;
    double growth = 1.0;
    std::size_t train_steps = 0;
    bool done = false;
    while (!done) {
      const bool warm = total_steps < agent.hyper().warmup_steps;
      const double raw =
          warm ? uniform_raw(rng) : agent.act(obs, true, sigma, rng);
      const StepResult sr = env.step(encode_action(raw));
      std::vector<double> next_obs = env.features();
      agent.replay().push({obs, {raw}, sr.reward, next_obs, sr.done});
      obs = std::move(next_obs);
      growth *= 1.0 + sr.reward;
      done = sr.done;
      ++total_steps;
      ++rec.steps;
      if (agent.replay().size() >= std::max(agent.hyper().warmup_steps,
                                            agent.hyper().batch_size)) {
        const TrainStepStats stats = agent.train_from_replay(rng);
        rec.critic_loss += stats.critic_loss;
        rec.actor_objective += stats.actor_objective;
        ++train_steps;
      }
    }
    if (train_steps > 0) {
      rec.critic_loss /= static_cast<double>(train_steps);
      rec.actor_objective /= static_cast<double>(train_steps);
    }
    rec.episode_return = growth - 1.0;
    log.records.push_back(rec);
  }
  return log;
}

TrainingLog train_dqn(DqnAgent& agent, const ObservationTimeline& timeline,
                      const EnvConfig& env_cfg, const TrainSchedule& sched,
                      std::uint64_t seed) {
  EnvConfig cfg = env_cfg;
  cfg.episode = EpisodeMode::RandomWindow;
  cfg.window_steps = sched.episode_length;
  TradingEnv env(timeline, cfg);
  std::mt19937_64 rng(seed);

  TrainingLog log;
  std::size_t total_steps = 0;
  for (std::size_t ep = 0; ep < sched.episodes; ++ep) {
    const double epsilon = annealed(sched, ep);
    std::vector<double> obs = env.reset(rng);
    TrainingRecord rec;
    rec.episode = ep;
    rec.exploration = epsilon;
    double growth = 1.0;
    std::size_t train_steps = 0;
    bool done = false;
    while (!done) {
      const bool warm = total_steps < agent.hyper().warmup_steps;
      const std::size_t a = warm ? agent.act(obs, 1.0, rng) : agent.act(obs, epsilon, rng);
      const StepResult sr = env.step(decode_discrete(a));
      std::vector<double> next_obs = env.features();
      agent.replay().push({obs, {static_cast<double>(a)}, sr.reward, next_obs, sr.done});
      obs = std::move(next_obs);
      growth *= 1.0 + sr.reward;
      done = sr.done;
      ++total_steps;
      ++rec.steps;
      if (agent.replay().size() >= std::max(agent.hyper().warmup_steps,
                                            agent.hyper().batch_size)) {
        rec.critic_loss += agent.train_from_replay(rng);
        ++train_steps;
      }
    }
    if (train_steps > 0) rec.critic_loss /= static_cast<double>(train_steps);
    rec.episode_return = growth - 1.0;
    log.records.push_back(rec);
  }
  return log;
}

Policy make_buy_and_hold_policy(std::size_t start_t) {
  return [start_t](const TradingEnv& env) { return buy_and_hold_decide(env.t(), start_t); };
}

Policy make_turtle_policy(std::size_t buy_window, std::size_t sell_window) {
  return [buy_window, sell_window](const TradingEnv& env) {
    return turtle_decide(env.timeline().raw(), env.t(), buy_window, sell_window);
  };
}

Policy make_ddpg_policy(const DdpgAgent& agent) {
  return [&agent](const TradingEnv& env) {
    std::mt19937_64 unused(0);
    return encode_action(agent.act(env.features(), false, unused));
  };
}

Policy make_dqn_policy(const DqnAgent& agent) {
  return [&agent](const TradingEnv& env) { return decode_discrete(agent.greedy(env.features())); };
}

EquityCurve evaluate_policy(const ObservationTimeline& timeline, const EnvConfig& env_cfg,
                            std::size_t start_t, const Policy& policy) {
  EnvConfig cfg = env_cfg;
  cfg.episode = EpisodeMode::FullSpan;
  TradingEnv env(timeline, cfg);
  env.reset_at(start_t);
  EquityCurve curve;
  curve.timestamps.push_back(timeline.raw().bars[env.t()].timestamp);
  curve.values.push_back(env.value());
  while (!env.done()) {
    env.step(policy(env));
    curve.timestamps.push_back(timeline.raw().bars[env.t()].timestamp);
    curve.values.push_back(env.value());
  }
  return curve;
}

EquityCurve market_curve(const BarSeries& series, std::size_t begin, std::size_t end,
                         double initial) {
  if (end >= series.bars.size() || begin > end) throw IndexError("market_curve range invalid");
  EquityCurve curve;
  const double base = series.bars[begin].close;
  for (std::size_t i = begin; i <= end; ++i) {
    curve.timestamps.push_back(series.bars[i].timestamp);
    curve.values.push_back(initial * series.bars[i].close / base);
  }
  return curve;
}

}  // namespace mss
