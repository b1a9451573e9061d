#include "msstrade/env.hpp"

#include <algorithm>
#include <cmath>

#include "msstrade/errors.hpp"

namespace mss {

Action encode_action(double raw, double dead_zone) {
  const double r = std::clamp(raw, -1.0, 1.0);
  if (r > dead_zone) return {ActionKind::Buy, r};
  if (r < -dead_zone) return {ActionKind::Sell, -r};
  return {ActionKind::Hold, 0.0};
}

double discrete_raw(std::size_t index) {
  // {Sell, Hold, Buy} x w in {0.25, 0.5, 1.0}, Hold deduplicated.
  static constexpr double kGrid[kDiscreteActionCount] = {-1.0, -0.5, -0.25, 0.0,
                                                         0.25, 0.5,  1.0};
  if (index >= kDiscreteActionCount) throw IndexError("discrete action index out of range");
  return kGrid[index];
}

Action decode_discrete(std::size_t index) { return encode_action(discrete_raw(index)); }

Portfolio execute_trade(const Portfolio& p, const Action& a, double price, double fee_rate) {
  if (price <= 0) throw SpecError("execution price must be positive");
  Portfolio out = p;
  switch (a.alpha) {
    case ActionKind::Buy: {
      const double unit_cost = price * (1.0 + fee_rate);
      const auto shares = static_cast<long long>(std::floor(a.w * p.cash / unit_cost));
      if (shares > 0) {
        out.cash -= static_cast<double>(shares) * unit_cost;
        out.holdings += shares;
        if (out.cash < 0) out.cash = 0;  // guard float dust
      }
      break;
    }
    case ActionKind::Sell: {
      const auto shares = static_cast<long long>(std::floor(a.w * static_cast<double>(p.holdings)));
      if (shares > 0) {
        out.cash += static_cast<double>(shares) * price * (1.0 - fee_rate);
        out.holdings -= shares;
      }
      break;
    }
    case ActionKind::Hold:
      break;
  }
  return out;
}

TradingEnv::TradingEnv(const ObservationTimeline& timeline, EnvConfig cfg)
    : timeline_(&timeline), cfg_(std::move(cfg)) {
  if (cfg_.fee_rate < 0) throw ConfigError("fee_rate must be non-negative");
  if (cfg_.initial_cash <= 0) throw ConfigError("initial_cash must be positive");
  if (cfg_.episode == EpisodeMode::RandomWindow && cfg_.window_steps == 0) {
    throw ConfigError("window_steps must be positive");
  }
}

std::vector<double> TradingEnv::reset(std::mt19937_64& rng) {
  const std::size_t first = timeline_->first_full_window();
  const std::size_t last = timeline_->size() - 1;
  if (cfg_.episode == EpisodeMode::FullSpan) return reset_at(first);
  if (timeline_->size() < timeline_->config().window_length + cfg_.window_steps) {
    throw DataError("series too short for a " + std::to_string(cfg_.window_steps) +
                    "-step episode");
  }
  std::uniform_int_distribution<std::size_t> pick(first, last - cfg_.window_steps);
  return reset_at(pick(rng));
}

std::vector<double> TradingEnv::reset_at(std::size_t start_t) {
  if (start_t + 1 >= timeline_->size()) {
    throw DataError("episode start leaves no step to take");
  }
  t_ = start_t;
  episode_end_ = (cfg_.episode == EpisodeMode::RandomWindow)
                     ? std::min(start_t + cfg_.window_steps, timeline_->size() - 1)
                     : timeline_->size() - 1;
  portfolio_ = Portfolio{0, cfg_.initial_cash, cfg_.initial_cash};
  done_ = false;
  return features();
}

StepResult TradingEnv::step(const Action& a) {
  if (done_) throw EpisodeError("step() after episode end");
  const double value_before = portfolio_value(portfolio_, close(t_));
  portfolio_ = execute_trade(portfolio_, a, close(t_), cfg_.fee_rate);
  ++t_;
  const double value_after = portfolio_value(portfolio_, close(t_));
  portfolio_.last_value = value_after;
  done_ = (t_ >= episode_end_);
  return {(value_after - value_before) / value_before, done_};
}

std::vector<double> TradingEnv::features() const {
  std::vector<double> out = timeline_->features(t_);
  const double v = portfolio_value(portfolio_, close(t_));
  out.push_back(static_cast<double>(portfolio_.holdings) * close(t_) / v);
  out.push_back(portfolio_.cash / v);
  return out;
}

EnvState TradingEnv::state() const {
  return {timeline_->observation(t_), portfolio_, t_};
}

double TradingEnv::value() const { return portfolio_value(portfolio_, close(t_)); }

}  // namespace mss
