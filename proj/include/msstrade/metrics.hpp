#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mss {

struct EquityCurve {
  std::vector<std::int64_t> timestamps;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  // Per-bar simple returns, length size()-1.
  std::vector<double> returns() const;
};

// Throws DataError on length mismatch or non-positive values.
void validate_curve(const EquityCurve& e);

struct MetricsConfig {
  double rf_annual = 0.0;
  double periods_per_year = 252.0;
};

// A scalar that may be undefined (zero-volatility Sharpe, degenerate beta).
// Undefined values render as "-" and never masquerade as 0.
struct Metric {
  double value = 0.0;
  bool defined = false;

  static Metric of(double v) { return {v, true}; }
  static Metric undefined() { return {0.0, false}; }
};

double cumulative_return(const EquityCurve& e);
double annual_return(const EquityCurve& e, double trading_days_per_year = 252.0);
double max_drawdown(const EquityCurve& e);

Metric sharpe(const std::vector<double>& returns, double rf_annual, double periods_per_year);

struct AlphaBeta {
  Metric alpha;
  Metric beta;
};

AlphaBeta alpha_beta(const std::vector<double>& strategy_returns,
                     const std::vector<double>& market_returns, double rf_annual,
                     double periods_per_year);

struct BacktestReport {
  std::string strategy;
  std::string dataset;
  std::int64_t span_begin = 0;
  std::int64_t span_end = 0;
  std::uint64_t seed = 0;
  double cumulative = 0.0;
  double annual = 0.0;
  double drawdown = 0.0;
  Metric alpha_v;
  Metric beta_v;
  Metric sharpe_v;
};

// `is_market` drops alpha/beta/sharpe (the index is its own benchmark).
BacktestReport build_report(const EquityCurve& e, const EquityCurve& market,
                            const MetricsConfig& cfg, const std::string& strategy,
                            const std::string& dataset, std::uint64_t seed,
                            bool is_market = false);

// One row per report; metric columns in Table-2 order
// (cumulative, annual, drawdown, alpha, beta, sharpe); undefined cells as "-".
std::string report_csv(const std::vector<BacktestReport>& reports);

std::string equity_csv(const EquityCurve& e);

}  // namespace mss
