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
#include "epimfg/solver.hpp"

#include <algorithm>
#include <cmath>

#include "epimfg/analysis.hpp"

namespace epimfg {

namespace {

constexpr double kDensityDriftTolerance = 1e-12;

constexpr int S = state_index(HealthState::Susceptible);
constexpr int I = state_index(HealthState::Infected);
constexpr int R = state_index(HealthState::Recovered);

double clip_probability(double value, const TimeGrid& grid)
{
    if (value < 0.0) {
        if (value < -kDensityDriftTolerance) {
            throw SolverError("forward sweep produced a negative density (" +
                              std::to_string(value) + "); reduce the step size dt=" +
                              std::to_string(grid.dt));
        }
        return 0.0;
    }
    if (value > 1.0) {
        if (value > 1.0 + kDensityDriftTolerance) {
            throw SolverError("forward sweep produced a density above 1 (" +
                              std::to_string(value) + "); reduce the step size dt=" +
                              std::to_string(grid.dt));
        }
        return 1.0;
    }
    return value;
}

/// Composite infected proportion P_t(I) at one grid point.
double composite_infected(const StateDistribution& p, const std::vector<GroupParams>& groups,
                          int t)
{
    double total = 0.0;
    for (std::size_t k = 0; k < groups.size(); ++k) {
        total += groups[k].mass * p(t, static_cast<int>(k), I);
    }
    return total;
}

/// Aggregate per (time point, group) from infected densities and guidelines.
Aggregate aggregate_from_density(const StateDistribution& p, const Guidelines& guide,
                                 const ContactMatrix& w, const std::vector<double>& masses)
{
    const int n_points = p.n_points();
    const int K = p.n_groups();
    Aggregate z(n_points, K);
    std::vector<double> infected(static_cast<std::size_t>(K));
    std::vector<double> guide_I(static_cast<std::size_t>(K));
    for (int t = 0; t < n_points; ++t) {
        for (int k = 0; k < K; ++k) {
            infected[static_cast<std::size_t>(k)] = p(t, k, I);
            guide_I[static_cast<std::size_t>(k)] = guide(t, k, I);
        }
        const auto zt = compute_aggregate(infected, guide_I, w, masses);
        for (int k = 0; k < K; ++k) {
            z(t, k) = zt[static_cast<std::size_t>(k)];
        }
    }
    return z;
}

/// Best-response controls over the whole grid from a value iterate and an
/// aggregate. Infected and recovered individuals comply with their
/// guidelines.
ControlProfile best_response_controls(const ValueFunction& u, const Aggregate& z,
                                      const std::vector<GroupParams>& groups,
                                      const Guidelines& guide)
{
    const int n_points = u.n_points();
    const int K = u.n_groups();
    ControlProfile controls;
    controls.alpha = TimeGroupStateGrid(n_points, K);
    controls.nu = TimeGroupGrid(n_points, K);
    for (int t = 0; t < n_points; ++t) {
        for (int k = 0; k < K; ++k) {
            const GroupParams& g = groups[static_cast<std::size_t>(k)];
            controls.alpha(t, k, S) =
                best_response_alpha_S(u(t, k, S), u(t, k, I), z(t, k), g, guide(t, k, S));
            controls.alpha(t, k, I) = guide(t, k, I);
            controls.alpha(t, k, R) = guide(t, k, R);
            controls.nu(t, k) = best_response_nu(u(t, k, S), g);
        }
    }
    return controls;
}

void relax(TimeGroupStateGrid& next, const TimeGroupStateGrid& prev, double damping)
{
    if (damping == 1.0) {
        return;
    }
    auto& out = next.data();
    const auto& old = prev.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = damping * out[i] + (1.0 - damping) * old[i];
    }
}

} // namespace

double residual_norm(const TimeGroupStateGrid& prev, const TimeGroupStateGrid& next)
{
    if (!prev.same_shape(next)) {
        throw std::logic_error("residual_norm: shape mismatch");
    }
    const int n_points = prev.n_points();
    const int K = prev.n_groups();
    double worst = 0.0;
    for (int t = 0; t < n_points; ++t) {
        double sq = 0.0;
        for (int k = 0; k < K; ++k) {
            for (int e = 0; e < kNumStates; ++e) {
                const double d = next(t, k, e) - prev(t, k, e);
                sq += d * d;
            }
        }
        worst = std::max(worst, sq);
    }
    return std::sqrt(worst);
}

StateDistribution solve_forward(const ControlProfile& controls, const Aggregate& z,
                                const std::vector<GroupParams>& groups,
                                const std::vector<std::array<double, 3>>& initial,
                                const TimeGrid& grid)
{
    const int K = static_cast<int>(groups.size());
    const int n_points = grid.n_points();
    StateDistribution p(n_points, K);
    for (int k = 0; k < K; ++k) {
        for (int e = 0; e < kNumStates; ++e) {
            p(0, k, e) = initial[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)];
        }
    }

    for (int t = 0; t < grid.n_steps; ++t) {
        for (int k = 0; k < K; ++k) {
            const GroupParams& g = groups[static_cast<std::size_t>(k)];
            const auto rates = transition_rates(controls.alpha(t, k, S), controls.nu(t, k),
                                                z(t, k), g);
            // Mass moved along each edge of the generator within the step;
            // subtracting and adding the same flow conserves the state sum.
            const double flow_si = grid.dt * rates.s_to_i * p(t, k, S);
            const double flow_sr = grid.dt * rates.s_to_r * p(t, k, S);
            const double flow_ir = grid.dt * rates.i_to_r * p(t, k, I);

            p(t + 1, k, S) = clip_probability(p(t, k, S) - flow_si - flow_sr, grid);
            p(t + 1, k, I) = clip_probability(p(t, k, I) + flow_si - flow_ir, grid);
            p(t + 1, k, R) = clip_probability(p(t, k, R) + flow_ir + flow_sr, grid);
        }
    }
    return p;
}

ValueFunction solve_backward(const ControlProfile& controls, const Aggregate& z,
                             const StateDistribution& p, const std::vector<GroupParams>& groups,
                             const Guidelines& guide, const TimeGrid& grid, bool awareness)
{
    const int K = static_cast<int>(groups.size());
    ValueFunction u(grid.n_points(), K);

    for (int t = grid.n_steps - 1; t >= 0; --t) {
        const int s = t + 1; // right endpoint of the step, where the RHS is evaluated
        const double pop_infected = awareness ? composite_infected(p, groups, s) : 0.0;
        for (int k = 0; k < K; ++k) {
            const GroupParams& g = groups[static_cast<std::size_t>(k)];
            const double alpha = controls.alpha(s, k, S);
            const double nu = controls.nu(s, k);
            const double dev = guide(s, k, S) - alpha;

            const double du_I = g.gamma * (u(s, k, I) - u(s, k, R)) - g.c_infection -
                                g.c_awareness_I * pop_infected;
            const double du_S = g.beta * alpha * z(s, k) * (u(s, k, S) - u(s, k, I)) +
                                g.kappa * nu * (u(s, k, S) - u(s, k, R)) -
                                g.c_lambda * dev * dev - g.c_nu * nu -
                                g.c_awareness_S * pop_infected;

            u(t, k, S) = u(s, k, S) - grid.dt * du_S;
            u(t, k, I) = u(s, k, I) - grid.dt * du_I;
            u(t, k, R) = 0.0;

            if (!std::isfinite(u(t, k, S)) || !std::isfinite(u(t, k, I))) {
                throw SolverError("backward sweep produced a non-finite value at t=" +
                                  std::to_string(grid.time(t)) + ", group " +
                                  std::to_string(k + 1));
            }
        }
    }
    return u;
}

EquilibriumSolution fixed_point_solve(const ModelConfig& config, const SolverSettings& settings)
{
    settings.validate();
    config.validate();

    const int K = config.n_groups();
    const int n_points = config.grid.n_points();
    const auto masses = config.masses();
    const bool regular = check_model_regularity(config.contact, config.initial);

    // Initial iterate: densities frozen at pi_0, values at zero, so the
    // first pass is the no-anticipation baseline.
    StateDistribution p(n_points, K);
    for (int t = 0; t < n_points; ++t) {
        for (int k = 0; k < K; ++k) {
            for (int e = 0; e < kNumStates; ++e) {
                p(t, k, e) =
                    config.initial[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)];
            }
        }
    }
    ValueFunction u(n_points, K);

    EquilibriumSolution solution;
    solution.regularity_satisfied = regular;

    Aggregate z;
    ControlProfile controls;
    bool converged = false;
    int iterations = 0;

    while (iterations < settings.max_iterations) {
        ++iterations;

        z = aggregate_from_density(p, config.guidelines, config.contact, masses);
        controls = best_response_controls(u, z, config.groups, config.guidelines);

        StateDistribution p_next =
            solve_forward(controls, z, config.groups, config.initial, config.grid);
        relax(p_next, p, settings.damping);

        ValueFunction u_next = solve_backward(controls, z, p_next, config.groups,
                                              config.guidelines, config.grid, settings.awareness);
        relax(u_next, u, settings.damping);

        const double res_p = residual_norm(p, p_next);
        const double res_u = residual_norm(u, u_next);
        solution.residual_history.push_back(std::max(res_p, res_u));

        p = std::move(p_next);
        u = std::move(u_next);

        if (res_p <= settings.epsilon && res_u <= settings.epsilon) {
            converged = true;
            break;
        }
    }

    // Final best-response recomputation against the converged iterate.
    solution.z = aggregate_from_density(p, config.guidelines, config.contact, masses);
    solution.controls = best_response_controls(u, solution.z, config.groups, config.guidelines);
    solution.p = std::move(p);
    solution.u = std::move(u);
    solution.iterations = iterations;
    solution.converged = converged;

    const JumpReport jumps = detect_jumps(solution.u, config.groups, config.grid);
    solution.jump_times = jumps.jump_times;
    solution.crossing_counts = jumps.crossing_counts;

    if (converged && regular) {
        // Strict aggregate positivity is guaranteed under model regularity;
        // a violation means the numerics broke down.
        for (double value : solution.z.data()) {
            if (!(value > 0.0)) {
                throw SolverError("aggregate lost strict positivity on a converged solution "
                                  "despite model regularity");
            }
        }
    }
    return solution;
}

EquilibriumSolution fixed_point_solve(const ModelConfig& config)
{
    return fixed_point_solve(config, config.solver);
}

} // namespace epimfg
