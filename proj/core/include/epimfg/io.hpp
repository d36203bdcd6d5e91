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
#ifndef EPIMFG_IO_HPP
#define EPIMFG_IO_HPP

#include <string>
#include <vector>

#include "epimfg/analysis.hpp"
#include "epimfg/config.hpp"
#include "epimfg/oracle.hpp"
#include "epimfg/solver.hpp"

namespace epimfg {

/// Trajectory table, one row per (grid point, group):
///   t,group,p_S,p_I,p_R,u_S,u_I,u_R,alpha_S,nu,Z
/// Groups are numbered from 1; `stride` downsamples the time axis (the final
/// grid point is always kept).
void write_trajectories_csv(const std::string& path, const EquilibriumSolution& solution,
                            const ModelConfig& config, int stride = 1);

/// Solve summary as JSON: convergence diagnostics, per-group jump structure
/// and epidemic metrics, config hash.
void write_summary_json(const std::string& path, const EquilibriumSolution& solution,
                        const ModelConfig& config);

/// Long-format sweep table: one row per (cell, group) plus per-cell
/// composite metrics; axis columns take the axis field names.
void write_sweep_csv(const std::string& path, const SweepResult& result);

/// Deviation reports and occupancy checks as JSON.
void write_verification_json(const std::string& path,
                             const std::vector<DeviationReport>& reports,
                             const std::vector<int>& occupancy_indices,
                             const std::vector<std::array<double, 3>>& empirical,
                             const std::vector<std::array<double, 3>>& expected, int group,
                             int occupancy_paths, const ModelConfig& config, bool passed);

} // namespace epimfg

#endif // EPIMFG_IO_HPP
