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
#include "epimfg/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace epimfg {

using nlohmann::json;

namespace {

const char* state_key(int e)
{
    static const char* keys[kNumStates] = {"S", "I", "R"};
    return keys[e];
}

/// A guideline entry is either a scalar (constant in time) or an array with
/// one value per grid point.
std::vector<double> read_guideline_sequence(const json& j, const TimeGrid& grid,
                                            const std::string& where)
{
    std::vector<double> seq;
    if (j.is_number()) {
        seq.assign(static_cast<std::size_t>(grid.n_points()), j.get<double>());
    } else if (j.is_array()) {
        seq = j.get<std::vector<double>>();
        if (static_cast<int>(seq.size()) != grid.n_points()) {
            throw ConfigError(where + ": time-varying guideline must have one value per grid "
                                      "point (" +
                              std::to_string(grid.n_points()) + "), got " +
                              std::to_string(seq.size()));
        }
    } else {
        throw ConfigError(where + ": guideline must be a number or an array of numbers");
    }
    return seq;
}

json guideline_to_json(const Guidelines& guide, int k, int e)
{
    const int n = guide.n_points();
    const double first = guide(0, k, e);
    bool constant = true;
    for (int t = 1; t < n; ++t) {
        if (guide(t, k, e) != first) {
            constant = false;
            break;
        }
    }
    if (constant) {
        return json(first);
    }
    std::vector<double> seq(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        seq[static_cast<std::size_t>(t)] = guide(t, k, e);
    }
    return json(seq);
}

} // namespace

void SolverSettings::validate() const
{
    if (!(epsilon > 0.0)) {
        throw ConfigError("solver.epsilon must be strictly positive");
    }
    if (max_iterations < 1) {
        throw ConfigError("solver.max_iterations must be at least 1");
    }
    if (!(damping > 0.0 && damping <= 1.0)) {
        throw ConfigError("solver.damping must lie in (0, 1]");
    }
}

std::vector<double> ModelConfig::masses() const
{
    std::vector<double> m(groups.size());
    for (std::size_t k = 0; k < groups.size(); ++k) {
        m[k] = groups[k].mass;
    }
    return m;
}

std::vector<std::string> ModelConfig::validate() const
{
    if (groups.empty()) {
        throw ConfigError("config must define at least one group");
    }
    const int K = n_groups();
    for (int k = 0; k < K; ++k) {
        validate_group_params(groups[static_cast<std::size_t>(k)], k);
    }
    validate_masses(groups);
    if (contact.n_groups() != K) {
        throw ConfigError("contact matrix must be K x K with K = number of groups");
    }
    validate_contact_matrix(contact);
    if (static_cast<int>(initial.size()) != K) {
        throw ConfigError("initial distributions must have one row per group");
    }
    for (int k = 0; k < K; ++k) {
        double total = 0.0;
        for (double v : initial[static_cast<std::size_t>(k)]) {
            if (v < 0.0 || v > 1.0) {
                throw ConfigError("initial distribution of group " + std::to_string(k + 1) +
                                  " has an entry outside [0, 1]");
            }
            total += v;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw ConfigError("initial distribution of group " + std::to_string(k + 1) +
                              " must lie on the simplex within 1e-12");
        }
    }
    if (guidelines.n_points() != grid.n_points() || guidelines.n_groups() != K) {
        throw ConfigError("guidelines must cover every (grid point, group, state)");
    }
    validate_guidelines(guidelines);
    solver.validate();

    std::vector<std::string> warnings;
    if (!check_model_regularity(contact, initial)) {
        warnings.push_back(
            "model regularity violated: some group is not connected to any group with positive "
            "initial infection; the aggregate can vanish and the epidemic may be trivial");
    }
    return warnings;
}

bool operator==(const SolverSettings& a, const SolverSettings& b)
{
    return a.epsilon == b.epsilon && a.max_iterations == b.max_iterations &&
           a.damping == b.damping && a.awareness == b.awareness;
}

bool operator==(const GroupParams& a, const GroupParams& b)
{
    return a.beta == b.beta && a.gamma == b.gamma && a.kappa == b.kappa &&
           a.c_lambda == b.c_lambda && a.c_nu == b.c_nu && a.c_infection == b.c_infection &&
           a.c_awareness_S == b.c_awareness_S && a.c_awareness_I == b.c_awareness_I &&
           a.mass == b.mass;
}

bool operator==(const ModelConfig& a, const ModelConfig& b)
{
    return a.groups == b.groups && a.guidelines.data() == b.guidelines.data() &&
           a.guidelines.n_groups() == b.guidelines.n_groups() &&
           a.contact.data() == b.contact.data() && a.initial == b.initial &&
           a.grid.horizon == b.grid.horizon && a.grid.dt == b.grid.dt &&
           a.grid.n_steps == b.grid.n_steps && a.solver == b.solver;
}

ModelConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("config parse error: ") + err.what());
    }

    ModelConfig config;
    try {
        config.grid = TimeGrid::make(j.at("horizon").get<double>(), j.at("dt").get<double>());

        const auto& jgroups = j.at("groups");
        if (!jgroups.is_array() || jgroups.empty()) {
            throw ConfigError("'groups' must be a non-empty array");
        }
        const int K = static_cast<int>(jgroups.size());
        config.guidelines = Guidelines(config.grid.n_points(), K);

        for (int k = 0; k < K; ++k) {
            const auto& jg = jgroups[static_cast<std::size_t>(k)];
            GroupParams g;
            g.beta = jg.at("beta").get<double>();
            g.gamma = jg.at("gamma").get<double>();
            g.kappa = jg.at("kappa").get<double>();
            g.c_lambda = jg.at("c_lambda").get<double>();
            g.c_nu = jg.at("c_nu").get<double>();
            g.c_infection = jg.at("c_infection").get<double>();
            g.c_awareness_S = jg.value("c_awareness_S", 0.0);
            g.c_awareness_I = jg.value("c_awareness_I", 0.0);
            g.mass = jg.value("mass", 1.0);
            config.groups.push_back(g);

            const auto& jinit = jg.at("initial");
            config.initial.push_back({jinit.at("S").get<double>(), jinit.at("I").get<double>(),
                                      jinit.at("R").get<double>()});

            const auto& jguide = jg.at("guidelines");
            for (int e = 0; e < kNumStates; ++e) {
                const std::string where = "group " + std::to_string(k + 1) + " guidelines." +
                                          state_key(e);
                auto seq = read_guideline_sequence(jguide.at(state_key(e)), config.grid, where);
                for (int t = 0; t < config.grid.n_points(); ++t) {
                    config.guidelines(t, k, e) = seq[static_cast<std::size_t>(t)];
                }
            }
        }

        if (j.contains("contact_matrix")) {
            const auto& jw = j.at("contact_matrix");
            if (static_cast<int>(jw.size()) != K) {
                throw ConfigError("contact_matrix must have K rows");
            }
            config.contact = ContactMatrix(K);
            for (int k = 0; k < K; ++k) {
                const auto& row = jw[static_cast<std::size_t>(k)];
                if (static_cast<int>(row.size()) != K) {
                    throw ConfigError("contact_matrix row " + std::to_string(k + 1) +
                                      " must have K entries");
                }
                for (int l = 0; l < K; ++l) {
                    config.contact(k, l) = row[static_cast<std::size_t>(l)].get<double>();
                }
            }
        } else if (K == 1) {
            config.contact = ContactMatrix(1, 1.0);
        } else {
            throw ConfigError("contact_matrix is required for multi-group configs");
        }

        if (j.contains("solver")) {
            const auto& js = j.at("solver");
            config.solver.epsilon = js.value("epsilon", config.solver.epsilon);
            config.solver.max_iterations = js.value("max_iterations", config.solver.max_iterations);
            config.solver.damping = js.value("damping", config.solver.damping);
            config.solver.awareness = js.value("awareness", config.solver.awareness);
        }
    } catch (const json::exception& err) {
        throw ConfigError(std::string("config field error: ") + err.what());
    }

    config.validate();
    return config;
}

ModelConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const ModelConfig& config)
{
    json j;
    j["horizon"] = config.grid.horizon;
    j["dt"] = config.grid.dt;

    json jgroups = json::array();
    for (int k = 0; k < config.n_groups(); ++k) {
        const GroupParams& g = config.groups[static_cast<std::size_t>(k)];
        json jg;
        jg["beta"] = g.beta;
        jg["gamma"] = g.gamma;
        jg["kappa"] = g.kappa;
        jg["c_lambda"] = g.c_lambda;
        jg["c_nu"] = g.c_nu;
        jg["c_infection"] = g.c_infection;
        jg["c_awareness_S"] = g.c_awareness_S;
        jg["c_awareness_I"] = g.c_awareness_I;
        jg["mass"] = g.mass;
        jg["initial"] = {{"S", config.initial[static_cast<std::size_t>(k)][0]},
                         {"I", config.initial[static_cast<std::size_t>(k)][1]},
                         {"R", config.initial[static_cast<std::size_t>(k)][2]}};
        json jguide;
        for (int e = 0; e < kNumStates; ++e) {
            jguide[state_key(e)] = guideline_to_json(config.guidelines, k, e);
        }
        jg["guidelines"] = jguide;
        jgroups.push_back(jg);
    }
    j["groups"] = jgroups;

    json jw = json::array();
    for (int k = 0; k < config.contact.n_groups(); ++k) {
        json row = json::array();
        for (int l = 0; l < config.contact.n_groups(); ++l) {
            row.push_back(config.contact(k, l));
        }
        jw.push_back(row);
    }
    j["contact_matrix"] = jw;

    j["solver"] = {{"epsilon", config.solver.epsilon},
                   {"max_iterations", config.solver.max_iterations},
                   {"damping", config.solver.damping},
                   {"awareness", config.solver.awareness}};

    return j.dump(2) + "\n";
}

void save_config(const ModelConfig& config, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write config file: " + path);
    }
    out << serialize_config(config);
}

std::string config_hash(const ModelConfig& config)
{
    // FNV-1a, 64 bit; deterministic across runs and platforms.
    const std::string text = serialize_config(config);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[2 + 16 + 1];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

ModelConfig make_table1_config()
{
    ModelConfig config;
    config.grid = TimeGrid::make(80.0, 0.016);

    GroupParams g;
    g.beta = 0.4;
    g.gamma = 1.0 / 7.0;
    g.kappa = 0.005;
    g.c_lambda = 1.0;
    g.c_nu = 0.001;
    g.c_infection = 1.0;
    g.mass = 1.0;
    config.groups.push_back(g);

    config.guidelines = Guidelines(config.grid.n_points(), 1, 0.9);
    config.contact = ContactMatrix(1, 1.0);
    config.initial.push_back({0.99, 0.01, 0.0});

    config.solver.epsilon = 0.1;
    config.solver.max_iterations = 500;
    config.solver.damping = 1.0;
    config.solver.awareness = false;
    return config;
}

ModelConfig make_table2_config()
{
    ModelConfig config;
    config.grid = TimeGrid::make(80.0, 0.016);

    const int K = 3;
    const double masses[K] = {0.3224, 0.3164, 0.3612};
    const double betas[K] = {0.40, 0.35, 0.30};
    const double c_nus[K] = {0.015, 0.013, 0.009};
    const double c_infections[K] = {1.05, 1.00, 0.80};
    for (int k = 0; k < K; ++k) {
        GroupParams g;
        g.beta = betas[k];
        g.gamma = 1.0 / 7.0;
        g.kappa = 0.003;
        g.c_lambda = 1.0;
        g.c_nu = c_nus[k];
        g.c_infection = c_infections[k];
        g.mass = masses[k];
        config.groups.push_back(g);
        config.initial.push_back({0.99, 0.01, 0.0});
    }

    config.guidelines = Guidelines(config.grid.n_points(), K, 0.9);
    config.contact = ContactMatrix(K, 0.925);
    for (int k = 0; k < K; ++k) {
        config.contact(k, k) = 1.0;
    }

    config.solver.epsilon = 0.1;
    config.solver.max_iterations = 500;
    config.solver.damping = 1.0;
    config.solver.awareness = false;
    return config;
}

ModelConfig make_preset(const std::string& name)
{
    if (name == "table1") {
        return make_table1_config();
    }
    if (name == "table2") {
        return make_table2_config();
    }
    throw ConfigError("unknown preset '" + name + "' (available: table1, table2)");
}

void set_guideline(ModelConfig& config, HealthState e, double value)
{
    for (int t = 0; t < config.guidelines.n_points(); ++t) {
        for (int k = 0; k < config.guidelines.n_groups(); ++k) {
            config.guidelines(t, k, e) = value;
        }
    }
}

void set_awareness_coefficients(ModelConfig& config, double value)
{
    for (auto& g : config.groups) {
        g.c_awareness_S = value;
        g.c_awareness_I = value;
    }
}

void set_vaccination_cost(ModelConfig& config, double value)
{
    for (auto& g : config.groups) {
        g.c_nu = value;
    }
}

} // namespace epimfg
