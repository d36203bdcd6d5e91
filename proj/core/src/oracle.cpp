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
#include "epimfg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace epimfg {

namespace {

constexpr int S = state_index(HealthState::Susceptible);
constexpr int I = state_index(HealthState::Infected);
constexpr int R = state_index(HealthState::Recovered);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t path)
{
    // splitmix64 of the path-shifted seed; gives independent per-path streams.
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (path + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

/// Canonical uniform in [0, 1) with 53 random bits; avoids the
/// implementation-defined distribution adaptors for cross-platform
/// reproducibility.
double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Frozen mean-field environment of one group, resampled onto Euler steps
/// (left-endpoint values, constant within each step).
struct SimulationEnv {
    TimeGrid grid;
    GroupParams g;
    std::array<double, 3> pi0{};
    std::vector<double> z;            // aggregate per step
    std::vector<double> guide_S;      // guidelines per step
    std::vector<double> guide_I;
    std::vector<double> guide_R;
    std::vector<double> pop_infected; // composite infected per step (0 if awareness off)
    double rate_bound = 0.0;          // uniformization constant
};

/// Per-arm tables: transition rates out of S and the running-cost rate per
/// state, per step.
struct ArmTables {
    std::vector<double> rate_s_to_i;
    std::vector<double> rate_s_to_r;
    std::vector<double> cost_S;
    std::vector<double> cost_I;
    std::vector<double> cost_R;
};

SimulationEnv make_env(const EquilibriumSolution& solution, const ModelConfig& config, int group)
{
    if (group < 0 || group >= config.n_groups()) {
        throw std::invalid_argument("simulate_agent_cost: group index out of range");
    }
    SimulationEnv env;
    env.grid = config.grid;
    env.g = config.groups[static_cast<std::size_t>(group)];
    env.pi0 = config.initial[static_cast<std::size_t>(group)];

    const int n_steps = config.grid.n_steps;
    env.z.resize(static_cast<std::size_t>(n_steps));
    env.guide_S.resize(static_cast<std::size_t>(n_steps));
    env.guide_I.resize(static_cast<std::size_t>(n_steps));
    env.guide_R.resize(static_cast<std::size_t>(n_steps));
    env.pop_infected.assign(static_cast<std::size_t>(n_steps), 0.0);

    for (int n = 0; n < n_steps; ++n) {
        env.z[static_cast<std::size_t>(n)] = solution.z(n, group);
        env.guide_S[static_cast<std::size_t>(n)] = config.guidelines(n, group, S);
        env.guide_I[static_cast<std::size_t>(n)] = config.guidelines(n, group, I);
        env.guide_R[static_cast<std::size_t>(n)] = config.guidelines(n, group, R);
        if (config.solver.awareness) {
            double total = 0.0;
            for (int l = 0; l < config.n_groups(); ++l) {
                total += config.groups[static_cast<std::size_t>(l)].mass * solution.p(n, l, I);
            }
            env.pop_infected[static_cast<std::size_t>(n)] = total;
        }
    }

    // A strategy-independent bound on the total exit rate: any admissible
    // socialization is at most 1 and any vaccination rate at most 1, so the
    // same uniformized clock serves every deviation arm.
    const double z_max = env.z.empty() ? 0.0 : *std::max_element(env.z.begin(), env.z.end());
    env.rate_bound = std::max(env.g.gamma, env.g.beta * z_max + env.g.kappa);
    return env;
}

/// Per-step control paths of one arm; built from the equilibrium and
/// optionally transformed by a deviation.
struct AgentStrategy {
    std::vector<double> alpha_S;
    std::vector<double> nu;
};

AgentStrategy equilibrium_strategy(const EquilibriumSolution& solution, int group, int n_steps)
{
    AgentStrategy strat;
    strat.alpha_S.resize(static_cast<std::size_t>(n_steps));
    strat.nu.resize(static_cast<std::size_t>(n_steps));
    for (int n = 0; n < n_steps; ++n) {
        strat.alpha_S[static_cast<std::size_t>(n)] = solution.controls.alpha(n, group, S);
        strat.nu[static_cast<std::size_t>(n)] = solution.controls.nu(n, group);
    }
    return strat;
}

void apply_deviation(AgentStrategy& strat, const DeviationSpec& spec,
                     const EquilibriumSolution& solution, int group, const TimeGrid& grid)
{
    switch (spec.kind) {
    case DeviationSpec::Kind::ScaleAlphaS:
        if (spec.magnitude < 0.0) {
            throw std::invalid_argument("deviation scale factor must be nonnegative");
        }
        for (double& a : strat.alpha_S) {
            a = std::clamp(a * spec.magnitude, 0.0, 1.0);
        }
        return;
    case DeviationSpec::Kind::ConstantAlphaS:
        if (spec.magnitude < 0.0 || spec.magnitude > 1.0) {
            throw std::invalid_argument(
                "constant socialization override must lie in [0, 1] to be admissible");
        }
        std::fill(strat.alpha_S.begin(), strat.alpha_S.end(), spec.magnitude);
        return;
    case DeviationSpec::Kind::ForceNoVaccination:
        std::fill(strat.nu.begin(), strat.nu.end(), 0.0);
        return;
    case DeviationSpec::Kind::ShiftJumpTime: {
        const double t1 = solution.jump_times[static_cast<std::size_t>(group)];
        const double shifted = std::clamp(t1 + spec.magnitude, 0.0, grid.horizon);
        for (int n = 0; n < static_cast<int>(strat.nu.size()); ++n) {
            strat.nu[static_cast<std::size_t>(n)] = grid.time(n) < shifted ? 1.0 : 0.0;
        }
        return;
    }
    }
    throw std::invalid_argument("unknown deviation kind");
}

ArmTables make_arm_tables(const SimulationEnv& env, const AgentStrategy& strat)
{
    const std::size_t n_steps = env.z.size();
    ArmTables arm;
    arm.rate_s_to_i.resize(n_steps);
    arm.rate_s_to_r.resize(n_steps);
    arm.cost_S.resize(n_steps);
    arm.cost_I.resize(n_steps);
    arm.cost_R.resize(n_steps);
    for (std::size_t n = 0; n < n_steps; ++n) {
        const auto rates = transition_rates(strat.alpha_S[n], strat.nu[n], env.z[n], env.g);
        arm.rate_s_to_i[n] = rates.s_to_i;
        arm.rate_s_to_r[n] = rates.s_to_r;
        arm.cost_S[n] = running_cost(HealthState::Susceptible, strat.alpha_S[n], strat.nu[n],
                                     env.pop_infected[n], env.g, env.guide_S[n]);
        arm.cost_I[n] = running_cost(HealthState::Infected, env.guide_I[n], 0.0,
                                     env.pop_infected[n], env.g, env.guide_I[n]);
        arm.cost_R[n] = running_cost(HealthState::Recovered, env.guide_R[n], 0.0,
                                     env.pop_infected[n], env.g, env.guide_R[n]);
    }
    return arm;
}

double integrate_piecewise(const std::vector<double>& rate, double a, double b, double dt)
{
    if (b <= a || rate.empty()) {
        return 0.0;
    }
    const int last = static_cast<int>(rate.size()) - 1;
    int n = std::clamp(static_cast<int>(a / dt), 0, last);
    double t = a;
    double total = 0.0;
    while (t < b) {
        const double seg_end = (n >= last) ? b : std::min(b, (n + 1) * dt);
        if (seg_end > t) {
            total += rate[static_cast<std::size_t>(n)] * (seg_end - t);
            t = seg_end;
        }
        if (n < last) {
            ++n;
        } else {
            break;
        }
    }
    return total;
}

const std::vector<double>& cost_table(const ArmTables& arm, int state)
{
    switch (state) {
    case S:
        return arm.cost_S;
    case I:
        return arm.cost_I;
    default:
        return arm.cost_R;
    }
}

/// One trajectory on [0, T]: exponential candidate clocks at the
/// uniformization rate, thinned against the current per-step rates. Both
/// the clock increments and the thinning uniforms come from `rng`, so two
/// arms driven by identically seeded generators share their randomness.
/// Optionally records the state at the given checkpoint times.
double simulate_path(const SimulationEnv& env, const ArmTables& arm, std::mt19937_64& rng,
                     const std::vector<double>* checkpoint_times, std::vector<int>* states_out)
{
    const double T = env.grid.horizon;
    const double dt = env.grid.dt;
    const double qbar = env.rate_bound;

    // Initial state from pi_0.
    const double u0 = uniform01(rng);
    int state = R;
    if (u0 < env.pi0[S]) {
        state = S;
    } else if (u0 < env.pi0[S] + env.pi0[I]) {
        state = I;
    }

    std::size_t checkpoint = 0;
    auto record_until = [&](double t_end) {
        if (checkpoint_times == nullptr) {
            return;
        }
        while (checkpoint < checkpoint_times->size() && (*checkpoint_times)[checkpoint] < t_end) {
            (*states_out)[checkpoint] = state;
            ++checkpoint;
        }
    };
    auto record_rest = [&]() {
        if (checkpoint_times == nullptr) {
            return;
        }
        while (checkpoint < checkpoint_times->size()) {
            (*states_out)[checkpoint] = state;
            ++checkpoint;
        }
    };

    double t = 0.0;
    double cost = 0.0;
    while (t < T) {
        if (state == R) {
            // Absorbing and compliant: the remaining cost integral closes the
            // path without spending further clock draws.
            cost += integrate_piecewise(arm.cost_R, t, T, dt);
            record_rest();
            return cost;
        }
        const double increment = -std::log1p(-uniform01(rng)) / qbar;
        const double tau = t + increment;
        const double segment_end = std::min(tau, T);
        cost += integrate_piecewise(cost_table(arm, state), t, segment_end, dt);
        record_until(segment_end);
        if (tau >= T) {
            break;
        }

        const double u = uniform01(rng);
        const int n = std::clamp(static_cast<int>(tau / dt), 0, env.grid.n_steps - 1);
        if (state == S) {
            const double p_infect = arm.rate_s_to_i[static_cast<std::size_t>(n)] / qbar;
            const double p_vaccinate = arm.rate_s_to_r[static_cast<std::size_t>(n)] / qbar;
            if (u < p_infect) {
                state = I;
            } else if (u < p_infect + p_vaccinate) {
                state = R;
            }
        } else { // Infected
            if (u < env.g.gamma / qbar) {
                state = R;
            }
        }
        t = tau;
    }
    record_rest();
    return cost;
}

struct RunningStats {
    int n         = 0;
    double sum    = 0.0;
    double sum_sq = 0.0;

    void add(double x)
    {
        ++n;
        sum += x;
        sum_sq += x * x;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
    double standard_error() const
    {
        if (n < 2) {
            return 0.0;
        }
        const double m = mean();
        const double var = std::max(0.0, (sum_sq - n * m * m) / (n - 1));
        return std::sqrt(var / n);
    }
    CostEstimate estimate() const { return {mean(), standard_error(), n}; }
};

} // namespace

double closed_form_u_I(const GroupParams& g, double horizon, double t)
{
    if (t < 0.0 || t > horizon) {
        throw std::domain_error("closed_form_u_I: t must lie in [0, horizon]");
    }
    return g.c_infection / g.gamma * (1.0 - std::exp(-g.gamma * (horizon - t)));
}

std::string DeviationSpec::describe() const
{
    char buf[64];
    switch (kind) {
    case Kind::ScaleAlphaS:
        std::snprintf(buf, sizeof(buf), "scale_alpha_S x%.3g", magnitude);
        return buf;
    case Kind::ShiftJumpTime:
        std::snprintf(buf, sizeof(buf), "shift_jump_time %+.3g days", magnitude);
        return buf;
    case Kind::ForceNoVaccination:
        return "force_no_vaccination";
    case Kind::ConstantAlphaS:
        std::snprintf(buf, sizeof(buf), "constant_alpha_S %.3g", magnitude);
        return buf;
    }
    return "?";
}

CostEstimate simulate_agent_cost(const EquilibriumSolution& solution, const ModelConfig& config,
                                 int group, const std::optional<DeviationSpec>& deviation,
                                 int n_paths, std::uint64_t seed)
{
    if (n_paths < 1) {
        throw std::invalid_argument("simulate_agent_cost: n_paths must be at least 1");
    }
    const SimulationEnv env = make_env(solution, config, group);
    AgentStrategy strat = equilibrium_strategy(solution, group, config.grid.n_steps);
    if (deviation.has_value()) {
        apply_deviation(strat, *deviation, solution, group, config.grid);
    }
    const ArmTables arm = make_arm_tables(env, strat);

    RunningStats stats;
    for (int i = 0; i < n_paths; ++i) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        stats.add(simulate_path(env, arm, rng, nullptr, nullptr));
    }
    return stats.estimate();
}

std::vector<DeviationReport> nash_gap_test(const EquilibriumSolution& solution,
                                           const ModelConfig& config, int group,
                                           const std::vector<DeviationSpec>& deviations,
                                           int n_paths, std::uint64_t seed)
{
    if (n_paths < 1) {
        throw std::invalid_argument("nash_gap_test: n_paths must be at least 1");
    }
    const SimulationEnv env = make_env(solution, config, group);
    const AgentStrategy eq_strat = equilibrium_strategy(solution, group, config.grid.n_steps);
    const ArmTables eq_arm = make_arm_tables(env, eq_strat);

    std::vector<DeviationReport> reports;
    reports.reserve(deviations.size());
    for (const DeviationSpec& spec : deviations) {
        AgentStrategy dev_strat = eq_strat;
        apply_deviation(dev_strat, spec, solution, group, config.grid);
        const ArmTables dev_arm = make_arm_tables(env, dev_strat);

        RunningStats eq_stats;
        RunningStats dev_stats;
        RunningStats diff_stats;
        for (int i = 0; i < n_paths; ++i) {
            // Identical streams across arms: the thinning scheme consumes
            // draws at the same positions whatever the accepted rates are.
            std::mt19937_64 rng_eq(mix_seed(seed, static_cast<std::uint64_t>(i)));
            std::mt19937_64 rng_dev(mix_seed(seed, static_cast<std::uint64_t>(i)));
            const double cost_eq = simulate_path(env, eq_arm, rng_eq, nullptr, nullptr);
            const double cost_dev = simulate_path(env, dev_arm, rng_dev, nullptr, nullptr);
            eq_stats.add(cost_eq);
            dev_stats.add(cost_dev);
            diff_stats.add(cost_dev - cost_eq);
        }

        DeviationReport report;
        report.deviation = spec.describe();
        report.equilibrium = eq_stats.estimate();
        report.deviated = dev_stats.estimate();
        report.gap = diff_stats.mean();
        report.gap_standard_error = diff_stats.standard_error();
        report.n_paths = n_paths;
        report.seed = seed;
        reports.push_back(std::move(report));
    }
    return reports;
}

std::vector<std::array<double, 3>> simulate_occupancy(const EquilibriumSolution& solution,
                                                      const ModelConfig& config, int group,
                                                      const std::vector<int>& grid_indices,
                                                      int n_paths, std::uint64_t seed)
{
    if (n_paths < 1) {
        throw std::invalid_argument("simulate_occupancy: n_paths must be at least 1");
    }
    const SimulationEnv env = make_env(solution, config, group);
    const AgentStrategy strat = equilibrium_strategy(solution, group, config.grid.n_steps);
    const ArmTables arm = make_arm_tables(env, strat);

    std::vector<double> checkpoint_times;
    checkpoint_times.reserve(grid_indices.size());
    for (int idx : grid_indices) {
        if (idx < 0 || idx >= config.grid.n_points()) {
            throw std::invalid_argument("simulate_occupancy: grid index out of range");
        }
        checkpoint_times.push_back(config.grid.time(idx));
    }
    if (!std::is_sorted(checkpoint_times.begin(), checkpoint_times.end())) {
        throw std::invalid_argument("simulate_occupancy: grid indices must be sorted");
    }

    std::vector<std::array<double, 3>> occupancy(grid_indices.size(), {0.0, 0.0, 0.0});
    std::vector<int> states(grid_indices.size(), R);
    for (int i = 0; i < n_paths; ++i) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        simulate_path(env, arm, rng, &checkpoint_times, &states);
        for (std::size_t c = 0; c < states.size(); ++c) {
            occupancy[c][static_cast<std::size_t>(states[c])] += 1.0;
        }
    }
    for (auto& row : occupancy) {
        for (double& v : row) {
            v /= n_paths;
        }
    }
    return occupancy;
}

} // namespace epimfg
