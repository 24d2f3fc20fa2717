#include "teleop/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <thread>

#include "teleop/errors.hpp"

namespace teleop {
namespace {

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fit_str(const FitValue& f) { return f ? num(*f) : "undefined"; }

void write_header(std::ostream& out, const ReportHeader& h) {
  out << "# tool_version=" << h.tool_version << '\n';
  out << "# config_hash=" << h.config_hash << '\n';
  out << "# rng=" << h.rng_algorithm << '\n';
  out << "# seeds=";
  for (std::size_t i = 0; i < h.seeds.size(); ++i) out << (i ? " " : "") << h.seeds[i];
  out << '\n';
  out << "# config=" << h.config_json << '\n';
}

void write_columns(std::ostream& out, const std::vector<std::string>& channels,
                   const char* seed_col, bool runtime) {
  out << "n_d,n_j,n_p," << seed_col;
  for (const auto& c : channels) out << ",mse_" << c;
  for (const auto& c : channels) out << ",est_" << c;
  out << ",est_aggregate";
  if (!runtime) out << ",est_aggregate_std";
  out << ",loss_realized";
  if (runtime) {
    out << ",runtime_ms,error";
  } else {
    out << ",runs,failed";
  }
  out << '\n';
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

std::vector<NetworkPoint> grid_product(const std::vector<double>& delays_ms,
                                       const std::vector<double>& jitters_ms,
                                       const std::vector<double>& losses) {
  if (delays_ms.empty() || jitters_ms.empty() || losses.empty()) {
    throw ContractViolation("network grid lists must be non-empty");
  }
  std::vector<NetworkPoint> out;
  for (double d : delays_ms) {
    for (double j : jitters_ms) {
      for (double p : losses) out.push_back({j, d, p});
    }
  }
  return out;
}

std::vector<NetworkPoint> table1_points() {
  return {{0, 0, 0.00}, {2, 5, 0.10}, {5, 7, 0.20}, {6, 3, 0.18},
          {4, 8, 0.13}, {4, 5, 0.20}, {6, 5, 0.15}};
}

std::vector<std::uint64_t> SweepSpec::seed_list() const {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < seeds; ++i) out.push_back(base_seed + static_cast<std::uint64_t>(i));
  return out;
}

std::size_t SweepResult::failures() const {
  std::size_t n = 0;
  for (const auto& r : runs) n += r.result ? 0 : 1;
  return n;
}

AggregateRow aggregate_runs(const NetworkPoint& point, const std::vector<RunRecord>& runs) {
  AggregateRow row;
  row.point = point;
  row.runs = runs.size();
  std::vector<const ScenarioResult*> ok;
  for (const auto& r : runs) {
    if (r.result) {
      ok.push_back(&*r.result);
    } else {
      ++row.failed;
    }
  }
  if (ok.empty()) return row;
  const std::size_t p = ok.front()->mse.size();
  row.mse_mean.assign(p, 0.0);
  for (std::size_t c = 0; c < p; ++c) {
    double sum = 0.0;
    double fit_sum = 0.0;
    std::size_t fit_count = 0;
    for (const auto* r : ok) {
      sum += r->mse[c];
      if (r->est_percent[c]) {
        fit_sum += *r->est_percent[c];
        ++fit_count;
      }
    }
    row.mse_mean[c] = sum / static_cast<double>(ok.size());
    row.est_mean.push_back(fit_count ? FitValue{fit_sum / static_cast<double>(fit_count)}
                                     : FitValue{});
  }
  std::vector<double> agg;
  double loss = 0.0;
  for (const auto* r : ok) {
    if (r->aggregate) agg.push_back(*r->aggregate);
    loss += r->channel_stats.realized_loss();
  }
  row.loss_realized_mean = loss / static_cast<double>(ok.size());
  if (!agg.empty()) {
    const double mean = std::accumulate(agg.begin(), agg.end(), 0.0) / static_cast<double>(agg.size());
    row.est_aggregate_mean = mean;
    if (agg.size() > 1) {
      double ss = 0.0;
      for (double v : agg) ss += (v - mean) * (v - mean);
      row.est_aggregate_std = std::sqrt(ss / static_cast<double>(agg.size() - 1));
    }
  }
  return row;
}

SweepResult run_sweep(const SystemModel& model, const TrajectorySet& data,
                      const SweepSpec& spec) {
  if (spec.points.empty()) throw ContractViolation("sweep has no network settings");
  if (spec.seeds < 1) throw ContractViolation("sweep needs at least one seed");
  const auto seeds = spec.seed_list();

  SweepResult out;
  for (const auto& pt : spec.points) {
    for (auto seed : seeds) out.runs.push_back({pt, seed, std::nullopt, {}});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < out.runs.size(); i = next++) {
      RunRecord& rec = out.runs[i];
      Scenario s;
      s.model = model;
      s.data = data;
      s.network.delay_ms = rec.point.delay_ms;
      s.network.jitter_ms = rec.point.jitter_ms;
      s.network.loss = rec.point.loss;
      s.network.seed = rec.seed;
      try {
        rec.result = run_scenario(s);
      } catch (const Error& e) {
        rec.error = e.what();
      }
    }
  };
  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(out.runs.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  for (std::size_t p = 0; p < spec.points.size(); ++p) {
    const auto first = out.runs.begin() + static_cast<std::ptrdiff_t>(p * seeds.size());
    out.rows.push_back(aggregate_runs(
        spec.points[p],
        std::vector<RunRecord>(first, first + static_cast<std::ptrdiff_t>(seeds.size()))));
  }
  return out;
}

void write_runs_csv(std::ostream& out, const SweepResult& sweep,
                    const std::vector<std::string>& channels, const ReportHeader& header) {
  write_header(out, header);
  write_columns(out, channels, "seed", true);
  for (const auto& r : sweep.runs) {
    out << num(r.point.delay_ms) << ',' << num(r.point.jitter_ms) << ','
        << num(r.point.loss) << ',' << r.seed;
    if (r.result) {
      for (double v : r.result->mse) out << ',' << num(v);
      for (const auto& f : r.result->est_percent) out << ',' << fit_str(f);
      out << ',' << fit_str(r.result->aggregate) << ','
          << num(r.result->channel_stats.realized_loss()) << ','
          << num(r.result->runtime_ms) << ",";
    } else {
      for (std::size_t i = 0; i < 2 * channels.size() + 2; ++i) out << ',';
      out << ",\"";
      for (char c : r.error) out << (c == '"' ? '\'' : c);
      out << '"';
    }
    out << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const SweepResult& sweep,
                         const std::vector<std::string>& channels,
                         const ReportHeader& header) {
  write_header(out, header);
  write_columns(out, channels, "seed", false);
  for (const auto& row : sweep.rows) {
    out << num(row.point.delay_ms) << ',' << num(row.point.jitter_ms) << ','
        << num(row.point.loss) << ",AGG";
    for (std::size_t c = 0; c < channels.size(); ++c) {
      out << ',' << (c < row.mse_mean.size() ? num(row.mse_mean[c]) : "");
    }
    for (std::size_t c = 0; c < channels.size(); ++c) {
      out << ',' << (c < row.est_mean.size() ? fit_str(row.est_mean[c]) : "");
    }
    out << ',' << fit_str(row.est_aggregate_mean) << ',' << num(row.est_aggregate_std)
        << ',' << num(row.loss_realized_mean) << ',' << row.runs << ',' << row.failed
        << '\n';
  }
}

void write_table(std::ostream& out, const SweepResult& sweep) {
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %-12s %-12s %-22s\n", "Jitter (ms)",
                "Delay (ms)", "Loss", "KF Estimation (%)");
  out << line;
  for (const auto& row : sweep.rows) {
    std::string est = "undefined";
    if (row.est_aggregate_mean) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f +/- %.2f", *row.est_aggregate_mean,
                    row.est_aggregate_std);
      est = buf;
    }
    if (row.failed) est += " (" + std::to_string(row.failed) + " failed)";
    std::snprintf(line, sizeof line, "%-12g %-12g %-12.2f %-22s\n", row.point.jitter_ms,
                  row.point.delay_ms, row.point.loss, est.c_str());
    out << line;
  }
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ContractViolation("spearman needs two equal-length samples of size >= 2");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> severity_rank(const std::vector<NetworkPoint>& points) {
  std::vector<double> key;
  // Loss dominates; jitter only separates equal loss values.
  for (const auto& p : points) key.push_back(p.loss * 1e6 + p.jitter_ms);
  return average_ranks(key);
}

}  // namespace teleop
