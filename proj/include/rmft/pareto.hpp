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

#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rmft/metrics.hpp"

namespace rmft {

// Relative perplexity increase of a technique over the baseline, percent.
// Throws DomainError unless ppl_b > 0.
double mdp_pct(double ppl_t, double ppl_b);

// Relative TER reduction of a technique against the baseline, percent;
// positive means fewer leaks. The printed form of this quantity,
// (ter_t - ter_b) / ter_b * 100, is its negation. Throws DomainError unless
// ter_b > 0.
double ter_drop_pct(double ter_t, double ter_b);

struct TradeoffPoint {
  std::size_t checkpoint_index = 0;
  std::string technique;
  double mdp_pct = 0.0;
  double ter_drop_pct = 0.0;

  double signed_ter_change_pct() const { return -ter_drop_pct; }
};

// Pairs technique and baseline checkpoints by index. Checkpoints where the
// baseline TER is zero have no defined drop and are skipped.
std::vector<TradeoffPoint> tradeoff_points(const std::string& technique,
                                           std::span<const CheckpointMetrics> series,
                                           std::span<const CheckpointMetrics> baseline);

// tau_min, tau_min + step, ... up to tau_max inclusive (within 1e-9).
std::vector<double> make_tau_grid(double tau_min, double tau_max, double step);
// 0% to 100% in 0.5% steps.
std::vector<double> default_tau_grid();

// values[i] is the best TER drop among points with mdp_pct <= grid[i], or
// nullopt when no point qualifies (the infeasible region).
struct MaxTERCurve {
  std::vector<double> grid;
  std::vector<std::optional<double>> values;
};

// Throws DomainError unless grid is strictly ascending.
MaxTERCurve maxter_curve(std::span<const TradeoffPoint> points, std::span<const double> grid);

struct AURCResult {
  double area = 0.0;              // %·%
  double feasible_fraction = 0.0;
};

// Trapezoidal area under the feasible part of the curve. A segment with an
// infeasible endpoint contributes nothing. Throws DomainError on an empty grid.
AURCResult aurc(const MaxTERCurve& curve);

// tau,value,feasible (value empty when infeasible)
void write_curve_csv(const MaxTERCurve& curve, std::ostream& out);
// technique,checkpoint,mdp_pct,ter_drop_pct,ter_change_pct
void write_points_csv(std::span<const TradeoffPoint> points, std::ostream& out);

}  // namespace rmft
