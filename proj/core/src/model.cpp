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
#include "epimfg/model.hpp"

#include <algorithm>
#include <cmath>

namespace epimfg {

namespace {

void require_positive(double value, const char* name, int group)
{
    if (!(value > 0.0)) {
        throw ConfigError("group " + std::to_string(group + 1) + ": parameter '" + name +
                          "' must be strictly positive, got " + std::to_string(value));
    }
}

void require_unit_interval(double value, const char* name)
{
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::domain_error(std::string(name) + " must lie in [0, 1], got " +
                                std::to_string(value));
    }
}

} // namespace

TimeGrid TimeGrid::make(double horizon, double dt)
{
    if (!(horizon > 0.0) || !(dt > 0.0)) {
        throw ConfigError("time grid requires horizon > 0 and dt > 0");
    }
    TimeGrid grid;
    grid.horizon = horizon;
    grid.dt = dt;
    grid.n_steps = static_cast<int>(std::llround(horizon / dt));
    if (grid.n_steps < 2) {
        throw ConfigError("time grid must have at least 2 steps");
    }
    if (std::abs(grid.n_steps * dt - horizon) > 1e-9) {
        throw ConfigError("horizon is not an integer multiple of dt (n_steps*dt differs from "
                          "horizon by more than 1e-9)");
    }
    return grid;
}

void validate_group_params(const GroupParams& g, int group)
{
    require_positive(g.beta, "beta", group);
    require_positive(g.gamma, "gamma", group);
    require_positive(g.kappa, "kappa", group);
    require_positive(g.c_lambda, "c_lambda", group);
    require_positive(g.c_nu, "c_nu", group);
    require_positive(g.c_infection, "c_infection", group);
    if (g.c_awareness_S < 0.0 || g.c_awareness_I < 0.0) {
        throw ConfigError("group " + std::to_string(group + 1) +
                          ": awareness coefficients must be nonnegative");
    }
    if (!(g.mass > 0.0 && g.mass <= 1.0)) {
        throw ConfigError("group " + std::to_string(group + 1) + ": mass must lie in (0, 1]");
    }
}

void validate_masses(const std::vector<GroupParams>& groups)
{
    double total = 0.0;
    for (const auto& g : groups) {
        total += g.mass;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ConfigError("group masses must sum to 1 within 1e-12, got " + std::to_string(total));
    }
}

void validate_guidelines(const Guidelines& guide)
{
    for (double v : guide.data()) {
        if (!(v > 0.0)) {
            throw ConfigError("guideline value must be strictly positive: full lockdown excluded");
        }
        if (v > 1.0) {
            throw ConfigError("guideline value must be at most 1, got " + std::to_string(v));
        }
    }
}

void validate_contact_matrix(const ContactMatrix& w)
{
    for (double v : w.data()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ConfigError("contact matrix entries must lie in [0, 1], got " +
                              std::to_string(v));
        }
    }
}

bool check_model_regularity(const ContactMatrix& w,
                            const std::vector<std::array<double, 3>>& initial)
{
    const int K = w.n_groups();
    for (int k = 0; k < K; ++k) {
        bool connected = false;
        for (int l = 0; l < K; ++l) {
            if (w(k, l) > 0.0 && initial[l][state_index(HealthState::Infected)] > 0.0) {
                connected = true;
                break;
            }
        }
        if (!connected) {
            return false;
        }
    }
    return true;
}

double running_cost(HealthState e, double alpha, double nu, double composite_infected,
                    const GroupParams& g, double guideline)
{
    require_unit_interval(alpha, "alpha");
    require_unit_interval(nu, "nu");
    require_unit_interval(composite_infected, "composite infected proportion");

    const double dev = guideline - alpha;
    switch (e) {
    case HealthState::Susceptible:
        return g.c_lambda * dev * dev + g.c_nu * nu + g.c_awareness_S * composite_infected;
    case HealthState::Infected:
        return dev * dev + g.c_infection + g.c_awareness_I * composite_infected;
    case HealthState::Recovered:
        return dev * dev;
    }
    throw std::domain_error("invalid health state");
}

double best_response_alpha_S(double u_S, double u_I, double z, const GroupParams& g,
                             double guideline_S)
{
    const double unclamped = guideline_S + g.beta * z * (u_S - u_I) / (2.0 * g.c_lambda);
    return std::clamp(unclamped, 0.0, 1.0);
}

double best_response_nu(double u_S, const GroupParams& g)
{
    return g.kappa * u_S > g.c_nu ? 1.0 : 0.0;
}

std::vector<double> compute_aggregate(const std::vector<double>& infected,
                                      const std::vector<double>& guide_I,
                                      const ContactMatrix& w, const std::vector<double>& masses)
{
    const std::size_t K = static_cast<std::size_t>(w.n_groups());
    if (infected.size() != K || guide_I.size() != K || masses.size() != K) {
        throw ConfigError("compute_aggregate: dimension mismatch between contact matrix and "
                          "per-group inputs");
    }
    std::vector<double> z(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        double acc = 0.0;
        for (std::size_t l = 0; l < K; ++l) {
            acc += w(static_cast<int>(k), static_cast<int>(l)) * guide_I[l] * infected[l] *
                   masses[l];
        }
        z[k] = acc;
    }
    return z;
}

TransitionRates transition_rates(double alpha, double nu, double z, const GroupParams& g)
{
    TransitionRates rates;
    rates.s_to_i = g.beta * alpha * z;
    rates.s_to_r = g.kappa * nu;
    rates.i_to_r = g.gamma;
    return rates;
}

} // namespace epimfg
