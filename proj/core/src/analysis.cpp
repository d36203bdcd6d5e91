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
#include "epimfg/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "epimfg/solver.hpp"

namespace epimfg {

namespace {

constexpr int S = state_index(HealthState::Susceptible);
constexpr int I = state_index(HealthState::Infected);
constexpr int R = state_index(HealthState::Recovered);

void apply_axis(ModelConfig& config, SweepField field, double value)
{
    switch (field) {
    case SweepField::LambdaS:
        set_guideline(config, HealthState::Susceptible, value);
        return;
    case SweepField::LambdaI:
        set_guideline(config, HealthState::Infected, value);
        return;
    case SweepField::AwarenessCoeff:
        set_awareness_coefficients(config, value);
        config.solver.awareness = true;
        return;
    case SweepField::VaccinationCost:
        set_vaccination_cost(config, value);
        return;
    }
    throw std::logic_error("unknown sweep field");
}

GroupMetrics metrics_of_path(const std::vector<double>& infected,
                             const std::vector<double>& alpha_S, double recovered_at_T,
                             const TimeGrid& grid)
{
    GroupMetrics m;
    std::size_t argmax = 0;
    for (std::size_t t = 1; t < infected.size(); ++t) {
        if (infected[t] > infected[argmax]) { // strict: ties keep the earliest time
            argmax = t;
        }
    }
    m.peak_time = grid.time(static_cast<int>(argmax));
    m.peak_proportion = infected[argmax];
    m.min_alpha_S = *std::min_element(alpha_S.begin(), alpha_S.end());
    m.cumulative_recovered = recovered_at_T;
    return m;
}

} // namespace

JumpReport detect_jumps(const ValueFunction& u, const std::vector<GroupParams>& groups,
                        const TimeGrid& grid)
{
    const int n_points = u.n_points();
    const int K = u.n_groups();
    JumpReport report;
    report.jump_times.assign(static_cast<std::size_t>(K), 0.0);
    report.crossing_counts.assign(static_cast<std::size_t>(K), 0);
    report.thresholds.resize(static_cast<std::size_t>(K));
    report.initial_above.assign(static_cast<std::size_t>(K), false);

    for (int k = 0; k < K; ++k) {
        const GroupParams& g = groups[static_cast<std::size_t>(k)];
        report.thresholds[static_cast<std::size_t>(k)] = g.vaccination_threshold();

        // Sign of kappa*u(S) - c_nu; "above" means vaccination is active.
        auto above = [&](int t) { return g.kappa * u(t, k, S) > g.c_nu; };

        report.initial_above[static_cast<std::size_t>(k)] = above(0);
        int crossings = 0;
        double jump_time = 0.0;
        bool jump_found = false;
        for (int t = 0; t + 1 < n_points; ++t) {
            const bool here = above(t);
            const bool next = above(t + 1);
            if (here != next) {
                ++crossings;
                if (here && !next && !jump_found) {
                    const double s0 = g.kappa * u(t, k, S) - g.c_nu;
                    const double s1 = g.kappa * u(t + 1, k, S) - g.c_nu;
                    jump_time = grid.time(t) + grid.dt * s0 / (s0 - s1);
                    jump_found = true;
                }
            }
        }
        report.crossing_counts[static_cast<std::size_t>(k)] = crossings;
        report.jump_times[static_cast<std::size_t>(k)] =
            report.initial_above[static_cast<std::size_t>(k)] ? jump_time : 0.0;
    }
    return report;
}

EpidemicMetrics epidemic_metrics(const StateDistribution& p, const TimeGroupStateGrid& alpha,
                                 const std::vector<double>& masses, const TimeGrid& grid)
{
    const int n_points = p.n_points();
    const int K = p.n_groups();
    if (static_cast<int>(masses.size()) != K) {
        throw std::logic_error("epidemic_metrics: mass vector does not match group count");
    }

    EpidemicMetrics metrics;
    std::vector<double> composite_infected(static_cast<std::size_t>(n_points), 0.0);
    std::vector<double> composite_alpha(static_cast<std::size_t>(n_points), 0.0);
    double composite_recovered = 0.0;

    for (int k = 0; k < K; ++k) {
        std::vector<double> infected(static_cast<std::size_t>(n_points));
        std::vector<double> alpha_S(static_cast<std::size_t>(n_points));
        for (int t = 0; t < n_points; ++t) {
            infected[static_cast<std::size_t>(t)] = p(t, k, I);
            alpha_S[static_cast<std::size_t>(t)] = alpha(t, k, S);
            composite_infected[static_cast<std::size_t>(t)] +=
                masses[static_cast<std::size_t>(k)] * p(t, k, I);
            composite_alpha[static_cast<std::size_t>(t)] +=
                masses[static_cast<std::size_t>(k)] * alpha(t, k, S);
        }
        composite_recovered += masses[static_cast<std::size_t>(k)] * p(n_points - 1, k, R);
        metrics.per_group.push_back(
            metrics_of_path(infected, alpha_S, p(n_points - 1, k, R), grid));
    }

    metrics.composite = metrics_of_path(composite_infected, composite_alpha,
                                        composite_recovered, grid);
    return metrics;
}

const char* sweep_field_name(SweepField field)
{
    switch (field) {
    case SweepField::LambdaS:
        return "lambda_S";
    case SweepField::LambdaI:
        return "lambda_I";
    case SweepField::AwarenessCoeff:
        return "cp";
    case SweepField::VaccinationCost:
        return "cnu";
    }
    return "?";
}

SweepField sweep_field_from_name(const std::string& name)
{
    if (name == "lambda_S") {
        return SweepField::LambdaS;
    }
    if (name == "lambda_I") {
        return SweepField::LambdaI;
    }
    if (name == "cp") {
        return SweepField::AwarenessCoeff;
    }
    if (name == "cnu") {
        return SweepField::VaccinationCost;
    }
    throw ConfigError("unknown sweep axis '" + name +
                      "' (available: lambda_S, lambda_I, cp, cnu)");
}

SweepResult sweep(const ModelConfig& base_config, const std::vector<SweepAxis>& axes,
                  const SolverSettings& settings)
{
    if (axes.empty()) {
        throw ConfigError("sweep requires at least one axis");
    }
    std::size_t n_cells = 1;
    for (const auto& axis : axes) {
        if (axis.values.empty()) {
            throw ConfigError("sweep axis has no values");
        }
        n_cells *= axis.values.size();
    }

    SweepResult result;
    result.axes = axes;
    result.provenance = config_hash(base_config);
    result.cells.resize(n_cells);

    auto solve_cell = [&](std::size_t index) {
        SweepCell& cell = result.cells[index];
        ModelConfig config = base_config;

        // Decode the row-major index into per-axis positions.
        std::size_t rest = index;
        cell.axis_values.resize(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            const std::size_t pos = rest % axes[a].values.size();
            rest /= axes[a].values.size();
            cell.axis_values[a] = axes[a].values[pos];
            apply_axis(config, axes[a].field, axes[a].values[pos]);
        }

        try {
            SolverSettings cell_settings = settings;
            cell_settings.awareness = config.solver.awareness || settings.awareness;
            EquilibriumSolution solution = fixed_point_solve(config, cell_settings);
            cell.solved = true;
            cell.converged = solution.converged;
            cell.iterations = solution.iterations;
            cell.jumps = detect_jumps(solution.u, config.groups, config.grid);
            cell.metrics = epidemic_metrics(solution.p, solution.controls.alpha,
                                            config.masses(), config.grid);
            if (!solution.converged) {
                cell.failure = "did not converge within max_iterations";
            }
        } catch (const std::exception& err) {
            cell.solved = false;
            cell.converged = false;
            cell.failure = err.what();
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_workers = std::min<std::size_t>(hw, n_cells);
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < n_cells; ++i) {
            solve_cell(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n_cells; i = next.fetch_add(1)) {
                    solve_cell(i);
                }
            });
        }
        for (auto& worker : workers) {
            worker.join();
        }
    }
    return result;
}

std::vector<SweepAxis> guideline_grid_axes(double lo, double hi, int resolution)
{
    if (resolution < 1) {
        throw ConfigError("sweep resolution must be at least 1");
    }
    std::vector<double> values(static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
        values[static_cast<std::size_t>(i)] =
            resolution == 1 ? lo : lo + (hi - lo) * i / (resolution - 1);
    }
    return {SweepAxis{SweepField::LambdaS, values}, SweepAxis{SweepField::LambdaI, values}};
}

} // namespace epimfg
