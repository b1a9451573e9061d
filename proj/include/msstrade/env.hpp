#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "msstrade/features.hpp"

namespace mss {

struct Portfolio {
  long long holdings = 0;  // share count, never negative
  double cash = 0.0;       // never negative
  double last_value = 0.0;
};

inline double portfolio_value(const Portfolio& p, double price) {
  return p.cash + static_cast<double>(p.holdings) * price;
}

enum class ActionKind { Buy, Hold, Sell };

struct Action {
  ActionKind alpha = ActionKind::Hold;
  double w = 0.0;  // trade fraction, in [0,1]; zero iff Hold
};

inline constexpr double kActionDeadZone = 0.1;

// Maps a continuous actor output in [-1,1] (clamped) to a trade directive:
// positive past the dead zone buys, negative sells, the middle holds.
Action encode_action(double raw, double dead_zone = kActionDeadZone);

// Fixed grid over (alpha, w) for discrete agents: {Sell, Hold, Buy} with
// w in {0.25, 0.5, 1.0} per side, expressed as raw values through
// encode_action.
inline constexpr std::size_t kDiscreteActionCount = 7;
Action decode_discrete(std::size_t index);
double discrete_raw(std::size_t index);

// Integer-share fills; infeasible sizes degrade to partial/zero by the floor,
// so holdings and cash stay non-negative without exceptions.
Portfolio execute_trade(const Portfolio& p, const Action& a, double price, double fee_rate);

enum class EpisodeMode { FullSpan, RandomWindow };

struct EnvConfig {
  double fee_rate = 0.001;
  double initial_cash = 1e6;
  EpisodeMode episode = EpisodeMode::FullSpan;
  std::size_t window_steps = 252;  // RandomWindow episode length
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
};

struct EnvState {
  FeatureMatrix observation;
  Portfolio portfolio;
  std::size_t t = 0;
};

// Single-asset trading MDP over a precomputed causal observation timeline.
// Trades execute at the close of the decision bar; reward is the simple
// return of portfolio value between consecutive closes.
class TradingEnv {
 public:
  TradingEnv(const ObservationTimeline& timeline, EnvConfig cfg);

  std::vector<double> reset(std::mt19937_64& rng);
  std::vector<double> reset_at(std::size_t start_t);
  StepResult step(const Action& a);

  // Flattened normalized observation plus [position fraction, cash fraction].
  std::vector<double> features() const;
  std::size_t feature_dim() const { return timeline_->feature_dim() + 2; }

  EnvState state() const;
  const Portfolio& portfolio() const { return portfolio_; }
  std::size_t t() const { return t_; }
  std::size_t episode_end() const { return episode_end_; }
  bool done() const { return done_; }
  double value() const;
  double close(std::size_t t) const { return timeline_->raw().bars[t].close; }
  const EnvConfig& config() const { return cfg_; }
  const ObservationTimeline& timeline() const { return *timeline_; }

 private:
  const ObservationTimeline* timeline_;
  EnvConfig cfg_;
  Portfolio portfolio_;
  std::size_t t_ = 0;
  std::size_t episode_end_ = 0;  // final bar index of the episode
  bool done_ = true;
};

}  // namespace mss
