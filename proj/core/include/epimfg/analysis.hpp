/*
* Copyright (C) 2026 epimfg contributors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef EPIMFG_ANALYSIS_HPP
#define EPIMFG_ANALYSIS_HPP

#include <string>
#include <vector>

#include "epimfg/config.hpp"
#include "epimfg/model.hpp"

namespace epimfg {

struct EquilibriumSolution;

/// Per-group vaccination jump structure read off the susceptible value
/// path: how often kappa*u(S) - c_nu changes sign, and where vaccination
/// first stops.
struct JumpReport {
    std::vector<double> jump_times;   ///< first downward threshold crossing, 0 if none
    std::vector<int> crossing_counts; ///< total sign changes across the grid
    std::vector<double> thresholds;   ///< c_nu / kappa per group
    std::vector<bool> initial_above;  ///< u_0(S) strictly above the threshold
};

/// Counts sign changes of kappa*u(S) - c_nu across grid points; the jump
/// time is the first grid interval where the sign turns non-positive,
/// linearly interpolated between the bracketing points. A path that starts
/// at or below the threshold has jump time 0 (vaccination never starts).
JumpReport detect_jumps(const ValueFunction& u, const std::vector<GroupParams>& groups,
                        const TimeGrid& grid);

/// Peak and protection metrics of one trajectory. Argmax ties break to the
/// earliest time; everything is evaluated on the grid without interpolation.
struct GroupMetrics {
    double peak_time            = 0.0;
    double peak_proportion      = 0.0;
    double min_alpha_S          = 0.0;
    double cumulative_recovered = 0.0;
};

struct EpidemicMetrics {
    std::vector<GroupMetrics> per_group;
    GroupMetrics composite; ///< mass-weighted across groups
};

EpidemicMetrics epidemic_metrics(const StateDistribution& p, const TimeGroupStateGrid& alpha,
                                 const std::vector<double>& masses, const TimeGrid& grid);

/// Parameter axes a sweep can move along. Guideline fields apply the value
/// to all groups and all grid points; awareness enables the
/// population-awareness terms.
enum class SweepField { LambdaS, LambdaI, AwarenessCoeff, VaccinationCost };

const char* sweep_field_name(SweepField field);
SweepField sweep_field_from_name(const std::string& name);

struct SweepAxis {
    SweepField field;
    std::vector<double> values;
};

/// One grid point of a sweep: the axis values applied plus the solution
/// summary. Failed solves are recorded, not thrown, so one divergent cell
/// does not lose the grid.
struct SweepCell {
    std::vector<double> axis_values;
    bool solved    = false; ///< solver ran without error
    bool converged = false;
    int iterations = 0;
    std::string failure; ///< diagnostic when solved == false
    JumpReport jumps;
    EpidemicMetrics metrics;
};

struct SweepResult {
    std::vector<SweepAxis> axes;
    std::vector<SweepCell> cells; ///< row-major over the axes
    std::string provenance;       ///< hash of the base config
};

/// Solves every point of the Cartesian grid independently (cells may run
/// concurrently); deterministic for a fixed base config and axes.
SweepResult sweep(const ModelConfig& base_config, const std::vector<SweepAxis>& axes,
                  const SolverSettings& settings);

/// The policy grid of guideline levels (lambda_S, lambda_I) in
/// [lo, hi]^2 at the given resolution per axis.
std::vector<SweepAxis> guideline_grid_axes(double lo, double hi, int resolution);

} // namespace epimfg

#endif // EPIMFG_ANALYSIS_HPP
