/*
 * Copyright 2026 The RMFT Toolkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rmft/pareto.hpp"

#include <algorithm>
#include <cmath>

#include "rmft/csv.hpp"
#include "rmft/errors.hpp"

namespace rmft {

double mdp_pct(double ppl_t, double ppl_b) {
  if (!(ppl_b > 0.0)) throw DomainError("baseline perplexity must be positive");
  return 100.0 * (ppl_t - ppl_b) / ppl_b;
}

double ter_drop_pct(double ter_t, double ter_b) {
  if (!(ter_b > 0.0)) throw DomainError("baseline TER must be positive");
  return 100.0 * (ter_b - ter_t) / ter_b;
}

std::vector<TradeoffPoint> tradeoff_points(const std::string& technique,
                                           std::span<const CheckpointMetrics> series,
                                           std::span<const CheckpointMetrics> baseline) {
  if (series.size() != baseline.size()) {
    throw DomainError("technique and baseline series differ in length");
  }
  std::vector<TradeoffPoint> out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i].checkpoint_index != baseline[i].checkpoint_index) {
      throw OrderingError("series checkpoints do not pair with the baseline");
    }
    if (!(baseline[i].ter > 0.0)) continue;
    out.push_back({series[i].checkpoint_index, technique,
                   mdp_pct(series[i].avg_ppl, baseline[i].avg_ppl),
                   ter_drop_pct(series[i].ter, baseline[i].ter)});
  }
  return out;
}

std::vector<double> make_tau_grid(double tau_min, double tau_max, double step) {
  if (!(step > 0.0) || !(tau_max >= tau_min)) {
    throw DomainError("tau grid needs step > 0 and tau_max >= tau_min");
  }
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    const double tau = tau_min + static_cast<double>(i) * step;
    if (tau > tau_max + 1e-9) break;
    grid.push_back(tau);
  }
  return grid;
}

std::vector<double> default_tau_grid() { return make_tau_grid(0.0, 100.0, 0.5); }

MaxTERCurve maxter_curve(std::span<const TradeoffPoint> points, std::span<const double> grid) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("tau grid must be strictly ascending");
  }
  std::vector<const TradeoffPoint*> by_mdp;
  by_mdp.reserve(points.size());
  for (const auto& p : points) by_mdp.push_back(&p);
  std::sort(by_mdp.begin(), by_mdp.end(),
            [](const auto* a, const auto* b) { return a->mdp_pct < b->mdp_pct; });

  MaxTERCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.reserve(grid.size());
  std::optional<double> best;
  std::size_t next = 0;
  for (double tau : grid) {
    while (next < by_mdp.size() && by_mdp[next]->mdp_pct <= tau) {
      const double drop = by_mdp[next]->ter_drop_pct;
      best = best ? std::max(*best, drop) : drop;
      ++next;
    }
    curve.values.push_back(best);
  }
  return curve;
}

AURCResult aurc(const MaxTERCurve& curve) {
  if (curve.grid.empty()) throw DomainError("AURC needs a non-empty grid");
  AURCResult r;
  std::size_t feasible = 0;
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    if (curve.values[i]) ++feasible;
    if (i == 0) continue;
    const auto& lo = curve.values[i - 1];
    const auto& hi = curve.values[i];
    if (lo && hi) r.area += 0.5 * (*lo + *hi) * (curve.grid[i] - curve.grid[i - 1]);
  }
  r.feasible_fraction = static_cast<double>(feasible) / static_cast<double>(curve.grid.size());
  return r;
}

void write_curve_csv(const MaxTERCurve& curve, std::ostream& out) {
  write_csv_row(out, {"tau", "value", "feasible"});
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const auto& v = curve.values[i];
    write_csv_row(out, {format_double(curve.grid[i]), v ? format_double(*v) : std::string(),
                        v ? "true" : "false"});
  }
}

void write_points_csv(std::span<const TradeoffPoint> points, std::ostream& out) {
  write_csv_row(out, {"technique", "checkpoint", "mdp_pct", "ter_drop_pct", "ter_change_pct"});
  for (const auto& p : points) {
    write_csv_row(out, {p.technique, std::to_string(p.checkpoint_index), format_double(p.mdp_pct),
                        format_double(p.ter_drop_pct), format_double(p.signed_ter_change_pct())});
  }
}

}  // namespace rmft
