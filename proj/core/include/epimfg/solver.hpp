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
#ifndef EPIMFG_SOLVER_HPP
#define EPIMFG_SOLVER_HPP

#include <vector>

#include "epimfg/config.hpp"
#include "epimfg/model.hpp"

namespace epimfg {

/// Converged equilibrium trajectories plus the diagnostics extracted from
/// them. When the fixed point does not converge within max_iterations the
/// solution is returned with `converged == false` and the residual history
/// for diagnosis.
struct EquilibriumSolution {
    StateDistribution p;
    ValueFunction u;
    ControlProfile controls;
    Aggregate z;

    int iterations = 0;
    bool converged = false;
    bool regularity_satisfied = true; ///< model regularity (connectivity) held
    std::vector<double> residual_history;

    std::vector<double> jump_times;   ///< per-group first vaccination stop time
    std::vector<int> crossing_counts; ///< per-group threshold crossings of u(S)
};

/// Sup over time points of the Euclidean norm across all (group, state)
/// components of the difference.
double residual_norm(const TimeGroupStateGrid& prev, const TimeGroupStateGrid& next);

/// Forward Kolmogorov sweep by explicit Euler from the initial
/// distributions, under the given controls and aggregate. Each step moves
/// probability mass along the generator, so the per-group state sums are
/// conserved. Negative drift beyond 1e-12 aborts with a step-size error.
StateDistribution solve_forward(const ControlProfile& controls, const Aggregate& z,
                                const std::vector<GroupParams>& groups,
                                const std::vector<std::array<double, 3>>& initial,
                                const TimeGrid& grid);

/// Backward value sweep by explicit Euler from the zero terminal condition.
/// The recovered value is identically zero; the infected value decouples
/// from the controls. The state distribution is only read when awareness is
/// enabled, through the composite infected proportion.
ValueFunction solve_backward(const ControlProfile& controls, const Aggregate& z,
                             const StateDistribution& p, const std::vector<GroupParams>& groups,
                             const Guidelines& guide, const TimeGrid& grid, bool awareness);

/// Fixed-point iteration on the coupled forward-backward system:
/// aggregate from the current densities, best-response controls from the
/// current values, forward sweep, backward sweep, repeat until both the
/// density and value residuals fall below epsilon. Finishes with a
/// best-response recomputation so the returned controls are consistent with
/// the returned values and aggregate.
EquilibriumSolution fixed_point_solve(const ModelConfig& config, const SolverSettings& settings);

/// Same, with the settings embedded in the config.
EquilibriumSolution fixed_point_solve(const ModelConfig& config);

} // namespace epimfg

#endif // EPIMFG_SOLVER_HPP
