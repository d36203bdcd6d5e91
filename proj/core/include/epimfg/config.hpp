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
#ifndef EPIMFG_CONFIG_HPP
#define EPIMFG_CONFIG_HPP

#include <array>
#include <string>
#include <vector>

#include "epimfg/model.hpp"

namespace epimfg {

/// Fixed-point iteration settings. Damping 1.0 is plain Picard iteration;
/// smaller values relax the density/value updates.
struct SolverSettings {
    double epsilon     = 0.1;
    int max_iterations = 500;
    double damping     = 1.0;
    bool awareness     = false; ///< include the population-awareness cost terms

    void validate() const;
};

/// Complete problem description: group parameters, guidelines expanded over
/// the grid, contact structure, initial distributions and solver settings.
struct ModelConfig {
    std::vector<GroupParams> groups;
    Guidelines guidelines;
    ContactMatrix contact;
    std::vector<std::array<double, 3>> initial; ///< per-group pi_0 on the simplex
    TimeGrid grid;
    SolverSettings solver;

    int n_groups() const { return static_cast<int>(groups.size()); }
    std::vector<double> masses() const;

    /// Throws ConfigError on any violated invariant; returns human-readable
    /// warnings for soft conditions (model regularity).
    std::vector<std::string> validate() const;
};

bool operator==(const SolverSettings& a, const SolverSettings& b);
bool operator==(const GroupParams& a, const GroupParams& b);
bool operator==(const ModelConfig& a, const ModelConfig& b);

/// Parse a config from its JSON text. Scalar guidelines expand to
/// per-grid-point sequences; omitted solver fields take their defaults.
ModelConfig parse_config(const std::string& text);

/// Load and validate a config file; parse errors carry line information.
ModelConfig load_config(const std::string& path);

/// Canonical JSON serialization; reloading it yields an equal config.
std::string serialize_config(const ModelConfig& config);

void save_config(const ModelConfig& config, const std::string& path);

/// FNV-1a hash of the canonical serialization, as provenance for result
/// files.
std::string config_hash(const ModelConfig& config);

/// Single-population preset of the sensitivity study (80-day horizon,
/// uniform 0.9 guidelines, cheap vaccination).
ModelConfig make_table1_config();

/// Three-group preset calibrated to income strata (low, middle, high) with
/// group-specific infection and vaccination costs and a dense contact
/// matrix.
ModelConfig make_table2_config();

/// Resolve "table1" / "table2" by name.
ModelConfig make_preset(const std::string& name);

// Convenience mutators used by the CLI flags and sweep axes. All of them
// apply the value to every group.
void set_guideline(ModelConfig& config, HealthState e, double value);
void set_awareness_coefficients(ModelConfig& config, double value);
void set_vaccination_cost(ModelConfig& config, double value);

} // namespace epimfg

#endif // EPIMFG_CONFIG_HPP
