#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "msstrade/env.hpp"
#include "msstrade/errors.hpp"
#include "oracles.hpp"

using namespace mss;

namespace {

// strictly increasing closes 10, 11, 12, ... with honest ranges
BarSeries ramp_series(std::size_t n) {
  BarSeries s;
  s.scale = TimeScale::day();
  for (std::size_t i = 0; i < n; ++i) {
    const double close = 10.0 + static_cast<double>(i);
    Bar b;
    b.timestamp = 946857600 + static_cast<std::int64_t>(i) * 86400;
    b.open = close - 0.5;
    b.close = close;
    b.high = close + 1.0;
    b.low = close - 1.0;
    b.volume = 1000;
    s.bars.push_back(b);
  }
  return s;
}

BarSeries flat_series(std::size_t n, double price) {
  BarSeries s;
  s.scale = TimeScale::day();
  for (std::size_t i = 0; i < n; ++i) {
    Bar b;
    b.timestamp = 946857600 + static_cast<std::int64_t>(i) * 86400;
    b.open = price - 0.25;
    b.close = price;
    b.high = price + 0.5;
    b.low = price - 0.5;
    b.volume = 1000;
    s.bars.push_back(b);
  }
  return s;
}

PipelineConfig tiny_cfg(std::size_t window) {
  PipelineConfig cfg;
  cfg.stroke_scales = {TimeScale::day()};
  cfg.window_length = window;
  return cfg;
}

}  // namespace

// ---------------------------------------------------------------------------
// action encoding
// ---------------------------------------------------------------------------

TEST_CASE("encode_action maps the dead zone to Hold") {
  CHECK(encode_action(0.0).alpha == ActionKind::Hold);
  CHECK(encode_action(0.05).alpha == ActionKind::Hold);
  CHECK(encode_action(0.1).alpha == ActionKind::Hold);   // boundary stays Hold
  CHECK(encode_action(-0.1).alpha == ActionKind::Hold);
  CHECK(encode_action(0.100001).alpha == ActionKind::Buy);

  const Action buy = encode_action(0.75);
  CHECK(buy.alpha == ActionKind::Buy);
  CHECK(buy.w == doctest::Approx(0.75));

  const Action sell = encode_action(-1.0);
  CHECK(sell.alpha == ActionKind::Sell);
  CHECK(sell.w == doctest::Approx(1.0));
}

TEST_CASE("encode_action clamps out-of-range raw values") {
  CHECK(encode_action(1.7).w == doctest::Approx(1.0));
  CHECK(encode_action(-3.0).alpha == ActionKind::Sell);
  CHECK(encode_action(-3.0).w == doctest::Approx(1.0));
}

TEST_CASE("discrete grid covers both sides at three sizes") {
  CHECK(discrete_raw(0) == -1.0);
  CHECK(discrete_raw(1) == -0.5);
  CHECK(discrete_raw(2) == -0.25);
  CHECK(discrete_raw(3) == 0.0);
  CHECK(discrete_raw(4) == 0.25);
  CHECK(discrete_raw(5) == 0.5);
  CHECK(discrete_raw(6) == 1.0);
  CHECK_THROWS_AS(discrete_raw(7), IndexError);

  CHECK(decode_discrete(0).alpha == ActionKind::Sell);
  CHECK(decode_discrete(0).w == doctest::Approx(1.0));
  CHECK(decode_discrete(3).alpha == ActionKind::Hold);
  CHECK(decode_discrete(4).alpha == ActionKind::Buy);
  CHECK(decode_discrete(4).w == doctest::Approx(0.25));
}

// ---------------------------------------------------------------------------
// trade execution
// ---------------------------------------------------------------------------

TEST_CASE("fee-free full buy converts all cash to shares") {
  const Portfolio p{0, 1000, 1000};
  const Portfolio out = execute_trade(p, {ActionKind::Buy, 1.0}, 10.0, 0.0);
  CHECK(out.holdings == 100);
  CHECK(out.cash == doctest::Approx(0.0));
}

TEST_CASE("half sell with fee credits the discounted proceeds") {
  const Portfolio p{10, 0, 100};
  const Portfolio out = execute_trade(p, {ActionKind::Sell, 0.5}, 10.0, 0.001);
  CHECK(out.holdings == 5);
  CHECK(out.cash == doctest::Approx(49.95));
}

TEST_CASE("hold leaves the portfolio untouched") {
  const Portfolio p{7, 123.5, 0};
  const Portfolio out = execute_trade(p, {ActionKind::Hold, 0.0}, 55.0, 0.001);
  CHECK(out.holdings == 7);
  CHECK(out.cash == 123.5);
}

TEST_CASE("buys too small for one share do nothing") {
  const Portfolio p{0, 9.99, 9.99};
  const Portfolio out = execute_trade(p, {ActionKind::Buy, 1.0}, 10.0, 0.0);
  CHECK(out.holdings == 0);
  CHECK(out.cash == 9.99);
}

TEST_CASE("fee shrinks an all-in buy to the affordable share count") {
  const Portfolio p{0, 1e6, 1e6};
  const Portfolio out = execute_trade(p, {ActionKind::Buy, 1.0}, 10.0, 0.001);
  CHECK(out.holdings == 99900);
  CHECK(out.cash == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("non-positive prices are rejected") {
  const Portfolio p{0, 1000, 1000};
  CHECK_THROWS_AS(execute_trade(p, {ActionKind::Buy, 1.0}, 0.0, 0.0), SpecError);
  CHECK_THROWS_AS(execute_trade(p, {ActionKind::Buy, 1.0}, -5.0, 0.0), SpecError);
}

TEST_CASE("fee-free trades conserve marked value and never go negative") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> act(-1.0, 1.0);
  std::uniform_real_distribution<double> price_step(-0.05, 0.05);

  Portfolio p{0, 1e6, 1e6};
  double price = 50.0;
  for (int i = 0; i < 100000; ++i) {
    const double before = portfolio_value(p, price);
    p = execute_trade(p, encode_action(act(rng)), price, 0.0);
    const double after = portfolio_value(p, price);
    CHECK(std::fabs(after - before) <= 1e-10 * before);
    CHECK(p.cash >= 0.0);
    CHECK(p.holdings >= 0);
    price *= 1.0 + price_step(rng);
  }
}

TEST_CASE("with fees the portfolio still never goes negative") {
  std::mt19937_64 rng(405);
  std::uniform_real_distribution<double> act(-1.0, 1.0);
  std::uniform_real_distribution<double> price_step(-0.05, 0.05);
  Portfolio p{0, 1e6, 1e6};
  double price = 50.0;
  for (int i = 0; i < 20000; ++i) {
    p = execute_trade(p, encode_action(act(rng)), price, 0.003);
    CHECK(p.cash >= 0.0);
    CHECK(p.holdings >= 0);
    price *= 1.0 + price_step(rng);
  }
}

// ---------------------------------------------------------------------------
// episode mechanics
// ---------------------------------------------------------------------------

TEST_CASE("full-span reset starts at the first full window, all cash") {
  const BarSeries raw = oracle::fuzz_walk(21, 80);
  const ObservationTimeline tl(raw, tiny_cfg(10));
  EnvConfig cfg;
  cfg.fee_rate = 0.0;
  TradingEnv env(tl, cfg);

  std::mt19937_64 rng(1);
  const auto obs = env.reset(rng);
  CHECK(env.t() == 9);
  CHECK(env.episode_end() == 79);
  CHECK_FALSE(env.done());
  CHECK(env.portfolio().holdings == 0);
  CHECK(env.portfolio().cash == 1e6);
  CHECK(env.value() == 1e6);

  REQUIRE(obs.size() == env.feature_dim());
  CHECK(obs.size() == tl.feature_dim() + 2);
  CHECK(obs[obs.size() - 2] == 0.0);  // position fraction
  CHECK(obs[obs.size() - 1] == 1.0);  // cash fraction
  CHECK(obs == env.features());
}

TEST_CASE("random windows are seed-reproducible and bounded") {
  const BarSeries raw = oracle::fuzz_walk(22, 400);
  const ObservationTimeline tl(raw, tiny_cfg(10));
  EnvConfig cfg;
  cfg.episode = EpisodeMode::RandomWindow;
  cfg.window_steps = 50;
  TradingEnv env(tl, cfg);

  std::mt19937_64 rng_a(7), rng_b(7);
  env.reset(rng_a);
  const std::size_t start_a = env.t();
  env.reset(rng_b);
  CHECK(env.t() == start_a);
  CHECK(start_a >= tl.first_full_window());
  CHECK(start_a + cfg.window_steps <= tl.size() - 1);
  CHECK(env.episode_end() == start_a + 50);

  std::size_t steps = 0;
  while (!env.done()) {
    env.step(Action{ActionKind::Hold, 0.0});
    ++steps;
  }
  CHECK(steps == 50);
}

TEST_CASE("short series cannot host a random window") {
  const BarSeries raw = oracle::fuzz_walk(23, 80);
  const ObservationTimeline tl(raw, tiny_cfg(10));
  EnvConfig cfg;
  cfg.episode = EpisodeMode::RandomWindow;
  cfg.window_steps = 252;
  TradingEnv env(tl, cfg);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(env.reset(rng), DataError);
}

TEST_CASE("reset_at rejects a start with no step left") {
  const BarSeries raw = oracle::fuzz_walk(24, 40);
  const ObservationTimeline tl(raw, tiny_cfg(5));
  TradingEnv env(tl, EnvConfig{});
  CHECK_THROWS_AS(env.reset_at(39), DataError);
  CHECK_THROWS_AS(env.reset_at(40), DataError);
}

TEST_CASE("invalid env configs are rejected") {
  const BarSeries raw = oracle::fuzz_walk(25, 40);
  const ObservationTimeline tl(raw, tiny_cfg(5));
  EnvConfig bad_fee;
  bad_fee.fee_rate = -0.001;
  CHECK_THROWS_AS(TradingEnv(tl, bad_fee), ConfigError);
  EnvConfig bad_cash;
  bad_cash.initial_cash = 0;
  CHECK_THROWS_AS(TradingEnv(tl, bad_cash), ConfigError);
  EnvConfig bad_window;
  bad_window.episode = EpisodeMode::RandomWindow;
  bad_window.window_steps = 0;
  CHECK_THROWS_AS(TradingEnv(tl, bad_window), ConfigError);
}

// ---------------------------------------------------------------------------
// rewards
// ---------------------------------------------------------------------------

TEST_CASE("holding cash earns exactly zero reward") {
  const ObservationTimeline tl(ramp_series(30), tiny_cfg(4));
  EnvConfig cfg;
  cfg.fee_rate = 0.001;
  TradingEnv env(tl, cfg);
  env.reset_at(3);
  for (int i = 0; i < 10; ++i) {
    const StepResult r = env.step(Action{ActionKind::Hold, 0.0});
    CHECK(r.reward == 0.0);
  }
}

TEST_CASE("a fee-free all-in buy captures the next bar's return") {
  // closes ramp 10, 11, 12, ...: buy at 13 (t=3), next close 14
  const ObservationTimeline tl(ramp_series(30), tiny_cfg(4));
  EnvConfig cfg;
  cfg.fee_rate = 0.0;
  cfg.initial_cash = 1000.0;
  TradingEnv env(tl, cfg);
  env.reset_at(3);

  const StepResult r = env.step(Action{ActionKind::Buy, 1.0});
  CHECK(env.portfolio().holdings == 76);  // floor(1000 / 13)
  CHECK(r.reward == doctest::Approx((14.0 - 13.0) / 13.0 * (76 * 13.0 / 1000.0)));
  CHECK(env.value() == doctest::Approx(1000.0 + 76.0));
}

TEST_CASE("buying on a flat price pays exactly the fee drag") {
  const ObservationTimeline tl(flat_series(30, 10.0), tiny_cfg(4));
  EnvConfig cfg;
  cfg.fee_rate = 0.001;
  cfg.initial_cash = 1e6;
  TradingEnv env(tl, cfg);
  env.reset_at(3);

  const StepResult r = env.step(Action{ActionKind::Buy, 1.0});
  CHECK(std::fabs(r.reward - (-0.000999)) < 1e-9);
}

TEST_CASE("stepping a finished episode throws") {
  const ObservationTimeline tl(ramp_series(8), tiny_cfg(4));
  TradingEnv env(tl, EnvConfig{});
  env.reset_at(5);
  env.step(Action{ActionKind::Hold, 0.0});
  const StepResult r = env.step(Action{ActionKind::Hold, 0.0});
  CHECK(r.done);
  CHECK(env.done());
  CHECK_THROWS_AS(env.step(Action{ActionKind::Hold, 0.0}), EpisodeError);
}

TEST_CASE("rewards telescope into the final portfolio value") {
  const BarSeries raw = oracle::fuzz_walk(26, 300);
  const ObservationTimeline tl(raw, tiny_cfg(10));
  EnvConfig cfg;
  cfg.fee_rate = 0.002;
  TradingEnv env(tl, cfg);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> act(-1.0, 1.0);
  env.reset_at(tl.first_full_window());
  double growth = 1.0;
  while (!env.done()) {
    growth *= 1.0 + env.step(encode_action(act(rng))).reward;
  }
  const double expected = env.value() / cfg.initial_cash;
  CHECK(std::fabs(growth - expected) <= 1e-10 * expected);
}

TEST_CASE("portfolio fractions always sum to one") {
  const BarSeries raw = oracle::fuzz_walk(27, 120);
  const ObservationTimeline tl(raw, tiny_cfg(10));
  EnvConfig cfg;
  cfg.fee_rate = 0.001;
  TradingEnv env(tl, cfg);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> act(-1.0, 1.0);
  env.reset_at(tl.first_full_window());
  while (!env.done()) {
    env.step(encode_action(act(rng)));
    const auto f = env.features();
    const double pos = f[f.size() - 2];
    const double cash = f[f.size() - 1];
    CHECK(pos >= 0.0);
    CHECK(cash >= 0.0);
    CHECK(pos + cash == doctest::Approx(1.0));
  }
  // after trading, state() reflects the same t and holdings as the env
  const EnvState st = env.state();
  CHECK(st.t == env.t());
  CHECK(st.portfolio.holdings == env.portfolio().holdings);
}
