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
#include "epimfg/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace epimfg {

using nlohmann::json;

namespace {

constexpr int S = state_index(HealthState::Susceptible);
constexpr int I = state_index(HealthState::Infected);
constexpr int R = state_index(HealthState::Recovered);

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write output file: " + path);
    }
    return out;
}

std::string fmt(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

json metrics_to_json(const GroupMetrics& m)
{
    return {{"peak_time", m.peak_time},
            {"peak_proportion", m.peak_proportion},
            {"min_alpha_S", m.min_alpha_S},
            {"cumulative_recovered", m.cumulative_recovered}};
}

json estimate_to_json(const CostEstimate& e)
{
    return {{"mean", e.mean}, {"standard_error", e.standard_error}, {"n_paths", e.n_paths}};
}

} // namespace

void write_trajectories_csv(const std::string& path, const EquilibriumSolution& solution,
                            const ModelConfig& config, int stride)
{
    if (stride < 1) {
        throw std::invalid_argument("stride must be at least 1");
    }
    auto out = open_out(path);
    out << "t,group,p_S,p_I,p_R,u_S,u_I,u_R,alpha_S,nu,Z\n";
    const int n_points = solution.p.n_points();
    std::vector<int> rows;
    for (int t = 0; t < n_points; t += stride) {
        rows.push_back(t);
    }
    if (rows.back() != n_points - 1) {
        rows.push_back(n_points - 1); // keep the terminal point under downsampling
    }
    for (int t : rows) {
        for (int k = 0; k < solution.p.n_groups(); ++k) {
            out << fmt(config.grid.time(t)) << ',' << (k + 1) << ',' << fmt(solution.p(t, k, S))
                << ',' << fmt(solution.p(t, k, I)) << ',' << fmt(solution.p(t, k, R)) << ','
                << fmt(solution.u(t, k, S)) << ',' << fmt(solution.u(t, k, I)) << ','
                << fmt(solution.u(t, k, R)) << ',' << fmt(solution.controls.alpha(t, k, S)) << ','
                << fmt(solution.controls.nu(t, k)) << ',' << fmt(solution.z(t, k)) << '\n';
        }
    }
}

void write_summary_json(const std::string& path, const EquilibriumSolution& solution,
                        const ModelConfig& config)
{
    const EpidemicMetrics metrics =
        epidemic_metrics(solution.p, solution.controls.alpha, config.masses(), config.grid);

    json j;
    j["config_hash"] = config_hash(config);
    j["converged"] = solution.converged;
    j["iterations"] = solution.iterations;
    j["epsilon"] = config.solver.epsilon;
    j["regularity_satisfied"] = solution.regularity_satisfied;
    j["residual_history"] = solution.residual_history;
    if (!solution.residual_history.empty()) {
        j["final_residual"] = solution.residual_history.back();
    }

    json groups = json::array();
    for (int k = 0; k < config.n_groups(); ++k) {
        json g = metrics_to_json(metrics.per_group[static_cast<std::size_t>(k)]);
        g["group"] = k + 1;
        g["jump_time"] = solution.jump_times[static_cast<std::size_t>(k)];
        g["crossing_count"] = solution.crossing_counts[static_cast<std::size_t>(k)];
        g["vaccination_threshold"] =
            config.groups[static_cast<std::size_t>(k)].vaccination_threshold();
        groups.push_back(g);
    }
    j["groups"] = groups;
    j["composite"] = metrics_to_json(metrics.composite);

    open_out(path) << j.dump(2) << '\n';
}

void write_sweep_csv(const std::string& path, const SweepResult& result)
{
    auto out = open_out(path);
    for (const auto& axis : result.axes) {
        out << sweep_field_name(axis.field) << ',';
    }
    out << "group,solved,converged,iterations,jump_time,crossing_count,peak_time,"
           "peak_proportion,min_alpha_S,cumulative_recovered,composite_peak_time,"
           "composite_peak_proportion\n";

    for (const SweepCell& cell : result.cells) {
        const int n_groups = cell.solved ? static_cast<int>(cell.metrics.per_group.size()) : 1;
        for (int k = 0; k < n_groups; ++k) {
            for (double v : cell.axis_values) {
                out << fmt(v) << ',';
            }
            out << (k + 1) << ',' << (cell.solved ? 1 : 0) << ',' << (cell.converged ? 1 : 0)
                << ',' << cell.iterations << ',';
            if (cell.solved) {
                const auto& m = cell.metrics.per_group[static_cast<std::size_t>(k)];
                out << fmt(cell.jumps.jump_times[static_cast<std::size_t>(k)]) << ','
                    << cell.jumps.crossing_counts[static_cast<std::size_t>(k)] << ','
                    << fmt(m.peak_time) << ',' << fmt(m.peak_proportion) << ','
                    << fmt(m.min_alpha_S) << ',' << fmt(m.cumulative_recovered) << ','
                    << fmt(cell.metrics.composite.peak_time) << ','
                    << fmt(cell.metrics.composite.peak_proportion) << '\n';
            } else {
                out << ",,,,,,,\n";
            }
        }
    }
}

void write_verification_json(const std::string& path,
                             const std::vector<DeviationReport>& reports,
                             const std::vector<int>& occupancy_indices,
                             const std::vector<std::array<double, 3>>& empirical,
                             const std::vector<std::array<double, 3>>& expected, int group,
                             int occupancy_paths, const ModelConfig& config, bool passed)
{
    json j;
    j["config_hash"] = config_hash(config);
    j["group"] = group + 1;
    j["passed"] = passed;

    json jdev = json::array();
    for (const auto& report : reports) {
        json r;
        r["deviation"] = report.deviation;
        r["equilibrium"] = estimate_to_json(report.equilibrium);
        r["deviated"] = estimate_to_json(report.deviated);
        r["gap"] = report.gap;
        r["gap_standard_error"] = report.gap_standard_error;
        r["n_paths"] = report.n_paths;
        r["seed"] = report.seed;
        jdev.push_back(r);
    }
    j["deviations"] = jdev;

    json jocc = json::array();
    for (std::size_t c = 0; c < occupancy_indices.size(); ++c) {
        json r;
        r["t"] = config.grid.time(occupancy_indices[c]);
        r["n_paths"] = occupancy_paths;
        r["empirical"] = {{"S", empirical[c][0]}, {"I", empirical[c][1]}, {"R", empirical[c][2]}};
        r["density"] = {{"S", expected[c][0]}, {"I", expected[c][1]}, {"R", expected[c][2]}};
        jocc.push_back(r);
    }
    j["occupancy"] = jocc;

    open_out(path) << j.dump(2) << '\n';
}

} // namespace epimfg
