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
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epimfg/analysis.hpp"
#include "epimfg/config.hpp"
#include "epimfg/io.hpp"
#include "epimfg/model.hpp"
#include "epimfg/oracle.hpp"
#include "epimfg/solver.hpp"

namespace {

using namespace epimfg;

constexpr int kStateS = state_index(HealthState::Susceptible);
constexpr int kStateI = state_index(HealthState::Infected);

struct Options {
    std::string config_path;
    std::string preset;
    std::string out_dir = ".";
    std::optional<double> cp;
    std::optional<double> lambda_S;
    std::optional<double> lambda_I;
    std::optional<double> cnu;
    std::optional<double> epsilon;
    std::optional<double> damping;
    int grid_res        = 7;
    int stride          = 1;
    std::uint64_t seed  = 42;
    int n_paths         = 10000;
};

void add_common_options(CLI::App* cmd, Options& opts)
{
    cmd->add_option("--config", opts.config_path, "Path to a JSON model config");
    cmd->add_option("--preset", opts.preset, "Built-in preset (table1, table2)");
    cmd->add_option("--out-dir", opts.out_dir, "Directory for output files");
    cmd->add_option("--cp", opts.cp,
                    "Set the awareness coefficients of all groups and enable awareness");
    cmd->add_option("--lambda-S", opts.lambda_S, "Override the susceptible guideline");
    cmd->add_option("--lambda-I", opts.lambda_I, "Override the infected guideline");
    cmd->add_option("--cnu", opts.cnu, "Override the vaccination cost of all groups");
    cmd->add_option("--epsilon", opts.epsilon, "Fixed-point convergence tolerance");
    cmd->add_option("--damping", opts.damping, "Relaxation weight in (0, 1]");
}

ModelConfig build_config(const Options& opts)
{
    if (opts.config_path.empty() == opts.preset.empty()) {
        throw ConfigError("exactly one of --config or --preset is required");
    }
    ModelConfig config =
        opts.preset.empty() ? load_config(opts.config_path) : make_preset(opts.preset);

    if (opts.cp.has_value()) {
        set_awareness_coefficients(config, *opts.cp);
        config.solver.awareness = true;
    }
    if (opts.lambda_S.has_value()) {
        set_guideline(config, HealthState::Susceptible, *opts.lambda_S);
    }
    if (opts.lambda_I.has_value()) {
        set_guideline(config, HealthState::Infected, *opts.lambda_I);
    }
    if (opts.cnu.has_value()) {
        set_vaccination_cost(config, *opts.cnu);
    }
    if (opts.epsilon.has_value()) {
        config.solver.epsilon = *opts.epsilon;
    }
    if (opts.damping.has_value()) {
        config.solver.damping = *opts.damping;
    }

    for (const std::string& warning : config.validate()) {
        std::cerr << "warning: " << warning << "\n";
    }
    return config;
}

std::string out_path(const Options& opts, const std::string& name)
{
    std::filesystem::create_directories(opts.out_dir);
    return (std::filesystem::path(opts.out_dir) / name).string();
}

std::string fmt(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

std::vector<int> strided_points(int n_points, int stride)
{
    std::vector<int> rows;
    for (int t = 0; t < n_points; t += stride) {
        rows.push_back(t);
    }
    if (rows.back() != n_points - 1) {
        rows.push_back(n_points - 1);
    }
    return rows;
}

int run_solve(const Options& opts)
{
    const ModelConfig config = build_config(opts);
    const EquilibriumSolution solution = fixed_point_solve(config);

    write_trajectories_csv(out_path(opts, "trajectories.csv"), solution, config, opts.stride);
    write_summary_json(out_path(opts, "summary.json"), solution, config);

    if (!solution.converged) {
        std::cerr << "solver did not converge within " << config.solver.max_iterations
                  << " iterations (final residual "
                  << (solution.residual_history.empty() ? 0.0 : solution.residual_history.back())
                  << "); see summary.json\n";
        return 1;
    }
    std::cout << "converged in " << solution.iterations << " iterations; wrote "
              << out_path(opts, "trajectories.csv") << " and " << out_path(opts, "summary.json")
              << "\n";
    return 0;
}

int run_sweep(const Options& opts)
{
    const ModelConfig config = build_config(opts);
    const auto axes = guideline_grid_axes(0.3, 0.9, opts.grid_res);
    const SweepResult result = sweep(config, axes, config.solver);
    write_sweep_csv(out_path(opts, "sweep.csv"), result);

    const bool all_ok = std::all_of(result.cells.begin(), result.cells.end(),
                                    [](const SweepCell& c) { return c.solved && c.converged; });
    std::cout << "swept " << result.cells.size() << " cells; wrote "
              << out_path(opts, "sweep.csv") << "\n";
    if (!all_ok) {
        std::cerr << "some sweep cells failed or did not converge; see the sweep table\n";
        return 1;
    }
    return 0;
}

int run_verify(const Options& opts)
{
    const ModelConfig config = build_config(opts);
    const EquilibriumSolution solution = fixed_point_solve(config);
    if (!solution.converged) {
        std::cerr << "cannot verify a non-converged solution\n";
        return 1;
    }

    const std::vector<DeviationSpec> deviations = {
        DeviationSpec::scale_alpha_S(0.9),   DeviationSpec::scale_alpha_S(1.1),
        DeviationSpec::shift_jump_time(5.0), DeviationSpec::shift_jump_time(-5.0),
        DeviationSpec::force_no_vaccination(),
    };
    const int N = config.grid.n_steps;
    const std::vector<int> checkpoints = {N / 4, N / 2, 3 * N / 4, N};
    const int occupancy_paths = 10 * opts.n_paths;

    bool all_passed = true;
    for (int k = 0; k < config.n_groups(); ++k) {
        const auto reports =
            nash_gap_test(solution, config, k, deviations, opts.n_paths, opts.seed);
        const auto empirical =
            simulate_occupancy(solution, config, k, checkpoints, occupancy_paths, opts.seed + 1);

        std::vector<std::array<double, 3>> expected;
        for (int idx : checkpoints) {
            expected.push_back({solution.p(idx, k, 0), solution.p(idx, k, 1),
                                solution.p(idx, k, 2)});
        }

        bool passed = true;
        for (const auto& report : reports) {
            const bool ok = report.gap >= -2.0 * report.gap_standard_error;
            passed = passed && ok;
            std::cout << "group " << (k + 1) << " deviation " << report.deviation << ": gap "
                      << fmt(report.gap) << " (se " << fmt(report.gap_standard_error) << ") "
                      << (ok ? "ok" : "PROFITABLE?") << "\n";
        }
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            for (int e = 0; e < kNumStates; ++e) {
                const double p_hat = empirical[c][static_cast<std::size_t>(e)];
                const double se =
                    std::sqrt(std::max(p_hat * (1.0 - p_hat), 1e-12) / occupancy_paths);
                const bool ok =
                    std::abs(p_hat - expected[c][static_cast<std::size_t>(e)]) <= 3.0 * se;
                passed = passed && ok;
            }
        }

        const std::string path =
            out_path(opts, "verification_group" + std::to_string(k + 1) + ".json");
        write_verification_json(path, reports, checkpoints, empirical, expected, k,
                                occupancy_paths, config, passed);
        std::cout << "group " << (k + 1) << " verification "
                  << (passed ? "passed" : "FAILED") << "; wrote " << path << "\n";
        all_passed = all_passed && passed;
    }
    return all_passed ? 0 : 1;
}

int run_emit_plots(const Options& opts)
{
    const ModelConfig base = build_config(opts);
    bool all_converged = true;

    // Vaccination paths, value functions and socialization/infection paths
    // across awareness levels.
    {
        std::ofstream f1(out_path(opts, "fig1_vaccination.csv"));
        std::ofstream f1j(out_path(opts, "fig1_jump_times.csv"));
        std::ofstream f2(out_path(opts, "fig2_value_threshold.csv"));
        std::ofstream f3(out_path(opts, "fig3_socialization_infection.csv"));
        f1 << "cp,t,group,nu\n";
        f1j << "cp,group,jump_time,crossing_count\n";
        f2 << "cp,t,group,u_S,threshold\n";
        f3 << "cp,t,group,alpha_S,p_I\n";

        for (double cp : {0.0, 0.1, 0.5}) {
            ModelConfig config = base;
            set_awareness_coefficients(config, cp);
            config.solver.awareness = cp > 0.0;
            const EquilibriumSolution sol = fixed_point_solve(config);
            all_converged = all_converged && sol.converged;

            for (int k = 0; k < config.n_groups(); ++k) {
                f1j << fmt(cp) << ',' << (k + 1) << ','
                    << fmt(sol.jump_times[static_cast<std::size_t>(k)]) << ','
                    << sol.crossing_counts[static_cast<std::size_t>(k)] << '\n';
            }
            for (int t : strided_points(config.grid.n_points(), opts.stride)) {
                for (int k = 0; k < config.n_groups(); ++k) {
                    const double time = config.grid.time(t);
                    f1 << fmt(cp) << ',' << fmt(time) << ',' << (k + 1) << ','
                       << fmt(sol.controls.nu(t, k)) << '\n';
                    f2 << fmt(cp) << ',' << fmt(time) << ',' << (k + 1) << ','
                       << fmt(sol.u(t, k, kStateS)) << ','
                       << fmt(config.groups[static_cast<std::size_t>(k)].vaccination_threshold())
                       << '\n';
                    f3 << fmt(cp) << ',' << fmt(time) << ',' << (k + 1) << ','
                       << fmt(sol.controls.alpha(t, k, kStateS)) << ','
                       << fmt(sol.p(t, k, kStateI)) << '\n';
                }
            }
        }
    }

    // Policy grid over the guideline space.
    {
        const SweepResult grid =
            sweep(base, guideline_grid_axes(0.3, 0.9, opts.grid_res), base.solver);
        write_sweep_csv(out_path(opts, "fig4_policy_grid.csv"), grid);
        all_converged =
            all_converged && std::all_of(grid.cells.begin(), grid.cells.end(),
                                         [](const SweepCell& c) { return c.converged; });
    }

    // Comparison runs: stricter guideline for the infected, and a uniformly
    // low vaccination cost.
    auto emit_comparison = [&](const std::string& file, const std::string& label_column,
                               const std::vector<std::pair<std::string, ModelConfig>>& runs) {
        std::ofstream out(out_path(opts, file));
        out << label_column << ",t,group,p_S,p_I,p_R,alpha_S,nu\n";
        for (const auto& [label, config] : runs) {
            const EquilibriumSolution sol = fixed_point_solve(config);
            all_converged = all_converged && sol.converged;
            for (int t : strided_points(config.grid.n_points(), opts.stride)) {
                for (int k = 0; k < config.n_groups(); ++k) {
                    out << label << ',' << fmt(config.grid.time(t)) << ',' << (k + 1) << ','
                        << fmt(sol.p(t, k, 0)) << ',' << fmt(sol.p(t, k, 1)) << ','
                        << fmt(sol.p(t, k, 2)) << ',' << fmt(sol.controls.alpha(t, k, kStateS))
                        << ',' << fmt(sol.controls.nu(t, k)) << '\n';
                }
            }
        }
    };

    {
        ModelConfig strict = base;
        set_guideline(strict, HealthState::Infected, 0.6);
        emit_comparison("fig5_policy_compare.csv", "policy",
                        {{"baseline", base}, {"strict_infected", strict}});

        double low_cost = base.groups.front().c_nu;
        for (const auto& g : base.groups) {
            low_cost = std::min(low_cost, g.c_nu);
        }
        ModelConfig uniform = base;
        set_vaccination_cost(uniform, low_cost);
        emit_comparison("fig6_vaccination_cost_compare.csv", "regime",
                        {{"group_specific", base}, {"uniform_low", uniform}});
    }

    std::cout << "wrote figure data to " << opts.out_dir << "\n";
    if (!all_converged) {
        std::cerr << "some figure solves did not converge\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mean-field Nash equilibrium solver for an SIR epidemic game with "
                 "socialization and vaccination controls"};
    app.require_subcommand(1);

    Options opts;
    auto* solve = app.add_subcommand("solve", "Solve one equilibrium and write trajectories");
    add_common_options(solve, opts);
    solve->add_option("--stride", opts.stride, "Downsample the time axis of the trajectory CSV");

    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Solve a grid of (lambda_S, lambda_I) guidelines and tabulate metrics");
    add_common_options(sweep_cmd, opts);
    sweep_cmd->add_option("--grid-res", opts.grid_res, "Grid resolution per guideline axis");

    auto* verify = app.add_subcommand(
        "verify", "Monte-Carlo check of the equilibrium property and the forward densities");
    add_common_options(verify, opts);
    verify->add_option("--seed", opts.seed, "Random seed");
    verify->add_option("--n-paths", opts.n_paths, "Simulated paths per deviation arm");

    auto* emit = app.add_subcommand("emit-plots", "Write per-figure CSV series");
    add_common_options(emit, opts);
    emit->add_option("--grid-res", opts.grid_res, "Grid resolution of the policy-grid figure");
    emit->add_option("--stride", opts.stride, "Downsample the time axis of figure series");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            return run_solve(opts);
        }
        if (sweep_cmd->parsed()) {
            return run_sweep(opts);
        }
        if (verify->parsed()) {
            return run_verify(opts);
        }
        if (emit->parsed()) {
            return run_emit_plots(opts);
        }
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 2;
}
