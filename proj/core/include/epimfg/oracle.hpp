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
#ifndef EPIMFG_ORACLE_HPP
#define EPIMFG_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epimfg/config.hpp"
#include "epimfg/model.hpp"
#include "epimfg/solver.hpp"

namespace epimfg {

/// Explicit solution of the infected value equation,
///   u_t(I) = (c_I / gamma) * (1 - exp(-gamma (T - t))),
/// used as an independent check on the backward sweep.
double closed_form_u_I(const GroupParams& g, double horizon, double t);

/// A unilateral strategy perturbation of one agent. The mean-field
/// environment stays frozen; only this agent's controls change.
struct DeviationSpec {
    enum class Kind {
        ScaleAlphaS,       ///< multiply the socialization path by `magnitude`, projected to [0, 1]
        ShiftJumpTime,     ///< vaccinate until jump_time + `magnitude` (days), clamped to [0, T]
        ForceNoVaccination,///< nu identically 0
        ConstantAlphaS,    ///< socialization path identically `magnitude`
    };

    Kind kind;
    double magnitude = 0.0;

    static DeviationSpec scale_alpha_S(double factor)
    {
        return {Kind::ScaleAlphaS, factor};
    }
    static DeviationSpec shift_jump_time(double days)
    {
        return {Kind::ShiftJumpTime, days};
    }
    static DeviationSpec force_no_vaccination() { return {Kind::ForceNoVaccination, 0.0}; }
    static DeviationSpec constant_alpha_S(double level)
    {
        return {Kind::ConstantAlphaS, level};
    }

    std::string describe() const;
};

/// Sample mean and standard error of the pathwise cost of one strategy arm.
struct CostEstimate {
    double mean           = 0.0;
    double standard_error = 0.0;
    int n_paths           = 0;
};

/// Paired comparison of an equilibrium arm against a deviated arm under
/// common random numbers. `gap = deviated - equilibrium`; a significantly
/// negative gap would contradict the equilibrium property.
struct DeviationReport {
    std::string deviation;
    CostEstimate equilibrium;
    CostEstimate deviated;
    double gap                = 0.0;
    double gap_standard_error = 0.0; ///< of the paired per-path differences
    int n_paths               = 0;
    std::uint64_t seed        = 0;
};

/// Monte-Carlo estimate of one agent's expected cost in `group` under the
/// frozen mean-field environment of `solution`. The agent's state follows a
/// continuous-time Markov chain with rates piecewise constant per grid step
/// (exact event times within steps, via thinning against a global rate
/// bound). `deviation == nullopt` plays the equilibrium strategy.
/// Reproducible: identical (seed, inputs) give identical estimates.
CostEstimate simulate_agent_cost(const EquilibriumSolution& solution, const ModelConfig& config,
                                 int group, const std::optional<DeviationSpec>& deviation,
                                 int n_paths, std::uint64_t seed);

/// Runs every deviation against the equilibrium arm with common random
/// numbers (identical exponential clocks and thinning uniforms per path
/// index across arms).
std::vector<DeviationReport> nash_gap_test(const EquilibriumSolution& solution,
                                           const ModelConfig& config, int group,
                                           const std::vector<DeviationSpec>& deviations,
                                           int n_paths, std::uint64_t seed);

/// Empirical state occupancy of the equilibrium agent at the given grid
/// indices, from n_paths simulated trajectories. Used to cross-check the
/// forward densities against the pathwise dynamics.
std::vector<std::array<double, 3>> simulate_occupancy(const EquilibriumSolution& solution,
                                                      const ModelConfig& config, int group,
                                                      const std::vector<int>& grid_indices,
                                                      int n_paths, std::uint64_t seed);

} // namespace epimfg

#endif // EPIMFG_ORACLE_HPP
