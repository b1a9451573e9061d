#include "msstrade/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "msstrade/errors.hpp"
#include "msstrade/timeutil.hpp"

namespace mss {

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt_metric(const Metric& m) { return m.defined ? fmt_num(m.value) : "-"; }

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

std::vector<double> EquityCurve::returns() const {
  std::vector<double> out;
  if (values.size() < 2) return out;
  out.reserve(values.size() - 1);
  for (std::size_t i = 1; i < values.size(); ++i) {
    out.push_back(values[i] / values[i - 1] - 1.0);
  }
  return out;
}

void validate_curve(const EquityCurve& e) {
  if (!e.timestamps.empty() && e.timestamps.size() != e.values.size()) {
    throw DataError("equity curve timestamp/value length mismatch");
  }
  for (double v : e.values) {
    if (!(v > 0)) throw DataError("equity curve values must be positive");
  }
}

double cumulative_return(const EquityCurve& e) {
  if (e.values.size() < 2) throw DataError("cumulative_return needs at least 2 points");
  validate_curve(e);
  return e.values.back() / e.values.front() - 1.0;
}

double annual_return(const EquityCurve& e, double trading_days_per_year) {
  const double cum = cumulative_return(e);
  const double years =
      static_cast<double>(e.values.size() - 1) / trading_days_per_year;
  return std::pow(1.0 + cum, 1.0 / years) - 1.0;
}

double max_drawdown(const EquityCurve& e) {
  if (e.values.empty()) throw DataError("max_drawdown needs at least 1 point");
  validate_curve(e);
  double peak = e.values.front();
  double worst = 0.0;
  for (double v : e.values) {
    peak = std::max(peak, v);
    worst = std::max(worst, (peak - v) / peak);
  }
  return worst;
}

Metric sharpe(const std::vector<double>& returns, double rf_annual, double periods_per_year) {
  if (returns.size() < 2) throw DataError("sharpe needs at least 2 returns");
  const double rf_bar = rf_annual / periods_per_year;
  const double mean = mean_of(returns);
  double ss = 0.0;
  for (double r : returns) ss += (r - mean) * (r - mean);
  const double stddev = std::sqrt(ss / static_cast<double>(returns.size() - 1));
  if (stddev < 1e-15) return Metric::undefined();
  return Metric::of((mean - rf_bar) / stddev * std::sqrt(periods_per_year));
}

AlphaBeta alpha_beta(const std::vector<double>& strategy_returns,
                     const std::vector<double>& market_returns, double rf_annual,
                     double periods_per_year) {
  if (strategy_returns.size() != market_returns.size()) {
    throw DataError("alpha_beta needs aligned return series");
  }
  if (strategy_returns.size() < 2) throw DataError("alpha_beta needs at least 2 returns");
  const double n = static_cast<double>(market_returns.size());
  const double mean_s = mean_of(strategy_returns);
  const double mean_m = mean_of(market_returns);
  double cov = 0.0, var_m = 0.0;
  for (std::size_t i = 0; i < market_returns.size(); ++i) {
    cov += (strategy_returns[i] - mean_s) * (market_returns[i] - mean_m);
    var_m += (market_returns[i] - mean_m) * (market_returns[i] - mean_m);
  }
  cov /= n;
  var_m /= n;
  if (var_m < 1e-18) return {Metric::undefined(), Metric::undefined()};
  const double beta = cov / var_m;
  const double rf_bar = rf_annual / periods_per_year;
  const double alpha_bar = (mean_s - rf_bar) - beta * (mean_m - rf_bar);
  return {Metric::of(alpha_bar * periods_per_year), Metric::of(beta)};
}

BacktestReport build_report(const EquityCurve& e, const EquityCurve& market,
                            const MetricsConfig& cfg, const std::string& strategy,
                            const std::string& dataset, std::uint64_t seed, bool is_market) {
  validate_curve(e);
  validate_curve(market);
  if (e.size() != market.size()) throw DataError("strategy/market spans differ");
  BacktestReport r;
  r.strategy = strategy;
  r.dataset = dataset;
  r.seed = seed;
  if (!e.timestamps.empty()) {
    r.span_begin = e.timestamps.front();
    r.span_end = e.timestamps.back();
  }
  r.cumulative = cumulative_return(e);
  r.annual = annual_return(e, cfg.periods_per_year);
  r.drawdown = max_drawdown(e);
  if (!is_market) {
    const std::vector<double> rs = e.returns();
    const std::vector<double> rm = market.returns();
    r.sharpe_v = sharpe(rs, cfg.rf_annual, cfg.periods_per_year);
    const AlphaBeta ab = alpha_beta(rs, rm, cfg.rf_annual, cfg.periods_per_year);
    r.alpha_v = ab.alpha;
    r.beta_v = ab.beta;
  }
  return r;
}

std::string report_csv(const std::vector<BacktestReport>& reports) {
  std::ostringstream out;
  out << "strategy,dataset,start,end,seed,cumulative_return,annual_return,"
         "max_drawdown,alpha,beta,sharpe\n";
  for (const BacktestReport& r : reports) {
    out << r.strategy << ',' << r.dataset << ',' << format_timestamp(r.span_begin) << ','
        << format_timestamp(r.span_end) << ',' << r.seed << ',' << fmt_num(r.cumulative) << ','
        << fmt_num(r.annual) << ',' << fmt_num(r.drawdown) << ',' << fmt_metric(r.alpha_v) << ','
        << fmt_metric(r.beta_v) << ',' << fmt_metric(r.sharpe_v) << '\n';
  }
  return out.str();
}

std::string equity_csv(const EquityCurve& e) {
  validate_curve(e);
  if (e.timestamps.size() != e.values.size()) {
    throw DataError("equity csv needs one timestamp per value");
  }
  std::ostringstream out;
  out << "timestamp,value\n";
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    out << format_timestamp(e.timestamps[i]) << ',' << fmt_num(e.values[i]) << '\n';
  }
  return out.str();
}

}  // namespace mss
