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
#ifndef EPIMFG_MODEL_HPP
#define EPIMFG_MODEL_HPP

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace epimfg {

/// Health states of the SIR compartment model. R is absorbing (no waning
/// immunity over the horizons considered here).
enum class HealthState : int { Susceptible = 0, Infected = 1, Recovered = 2 };

inline constexpr int kNumStates = 3;

inline constexpr int state_index(HealthState e)
{
    return static_cast<int>(e);
}

/// Thrown on malformed or contradictory configuration input.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a numerical sweep breaks down (negative densities beyond
/// tolerance, NaN/overflow in the value function).
class SolverError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Per-group model parameters: rates of the transition matrix and the
/// weights of the running cost. The awareness coefficients are zero in the
/// baseline model.
struct GroupParams {
    double beta          = 0.0; ///< transmission level (1/time)
    double gamma         = 0.0; ///< recovery rate (1/time)
    double kappa         = 0.0; ///< vaccination efficacy (1/time)
    double c_lambda      = 0.0; ///< policy-deviation cost weight
    double c_nu          = 0.0; ///< vaccination cost weight
    double c_infection   = 0.0; ///< flat cost per unit time infected
    double c_awareness_S = 0.0; ///< awareness cost coefficient while susceptible
    double c_awareness_I = 0.0; ///< awareness cost coefficient while infected
    double mass          = 1.0; ///< group proportion, all masses sum to 1

    /// Vaccination stops once the susceptible value drops to this level.
    double vaccination_threshold() const { return c_nu / kappa; }
};

/// Uniform time grid over [0, horizon] with n_steps Euler steps and
/// n_steps + 1 grid points.
struct TimeGrid {
    double horizon = 0.0;
    double dt      = 0.0;
    int n_steps    = 0;

    static TimeGrid make(double horizon, double dt);

    int n_points() const { return n_steps + 1; }
    double time(int n) const { return n * dt; }
};

/// Dense (time point, group, state) array, the storage layout shared by
/// densities, value functions, socialization controls and guidelines.
class TimeGroupStateGrid
{
public:
    TimeGroupStateGrid() = default;
    TimeGroupStateGrid(int n_points, int n_groups, double value = 0.0)
        : n_points_(n_points), n_groups_(n_groups),
          data_(static_cast<std::size_t>(n_points) * n_groups * kNumStates, value)
    {
    }

    double& operator()(int t, int k, int e) { return data_[index(t, k, e)]; }
    double operator()(int t, int k, int e) const { return data_[index(t, k, e)]; }
    double& operator()(int t, int k, HealthState e) { return (*this)(t, k, state_index(e)); }
    double operator()(int t, int k, HealthState e) const { return (*this)(t, k, state_index(e)); }

    int n_points() const { return n_points_; }
    int n_groups() const { return n_groups_; }
    bool same_shape(const TimeGroupStateGrid& other) const
    {
        return n_points_ == other.n_points_ && n_groups_ == other.n_groups_;
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t index(int t, int k, int e) const
    {
        return (static_cast<std::size_t>(t) * n_groups_ + k) * kNumStates + e;
    }

    int n_points_ = 0;
    int n_groups_ = 0;
    std::vector<double> data_;
};

/// Dense (time point, group) array, used for vaccination rates and the
/// aggregate interaction term.
class TimeGroupGrid
{
public:
    TimeGroupGrid() = default;
    TimeGroupGrid(int n_points, int n_groups, double value = 0.0)
        : n_points_(n_points), n_groups_(n_groups),
          data_(static_cast<std::size_t>(n_points) * n_groups, value)
    {
    }

    double& operator()(int t, int k) { return data_[static_cast<std::size_t>(t) * n_groups_ + k]; }
    double operator()(int t, int k) const
    {
        return data_[static_cast<std::size_t>(t) * n_groups_ + k];
    }

    int n_points() const { return n_points_; }
    int n_groups() const { return n_groups_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    int n_points_ = 0;
    int n_groups_ = 0;
    std::vector<double> data_;
};

/// Social-distancing guidelines per (time point, group, state), values in
/// (0, 1]. Constant guidelines are expanded over the grid at config load.
using Guidelines = TimeGroupStateGrid;

/// Population state distribution p_t^k(e) per (time point, group, state).
using StateDistribution = TimeGroupStateGrid;

/// Value function u_t^k(e) per (time point, group, state).
using ValueFunction = TimeGroupStateGrid;

/// Aggregate interaction term Z_t^k per (time point, group).
using Aggregate = TimeGroupGrid;

/// Equilibrium controls: socialization per (time, group, state) and the
/// bang-bang vaccination rate per (time, group) with values in {0, 1}.
struct ControlProfile {
    TimeGroupStateGrid alpha;
    TimeGroupGrid nu;
};

/// Symmetric-free K x K matrix of connection strengths w(k, l) in [0, 1].
class ContactMatrix
{
public:
    ContactMatrix() = default;
    explicit ContactMatrix(int n_groups, double value = 0.0)
        : n_groups_(n_groups), w_(static_cast<std::size_t>(n_groups) * n_groups, value)
    {
    }

    double& operator()(int k, int l) { return w_[static_cast<std::size_t>(k) * n_groups_ + l]; }
    double operator()(int k, int l) const
    {
        return w_[static_cast<std::size_t>(k) * n_groups_ + l];
    }

    int n_groups() const { return n_groups_; }
    const std::vector<double>& data() const { return w_; }
    std::vector<double>& data() { return w_; }

private:
    int n_groups_ = 0;
    std::vector<double> w_;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Throws ConfigError naming the violated invariant.
void validate_group_params(const GroupParams& g, int group);

/// Masses must sum to 1 within 1e-12.
void validate_masses(const std::vector<GroupParams>& groups);

/// Every guideline value must lie in (0, 1]; full lockdown is excluded.
void validate_guidelines(const Guidelines& guide);

/// Entries in [0, 1].
void validate_contact_matrix(const ContactMatrix& w);

/// Model regularity: every group k must be connected to some group l with
/// positive initial infection. Returns false (a warning condition, not an
/// error) when violated; the aggregate can then vanish.
bool check_model_regularity(const ContactMatrix& w,
                            const std::vector<std::array<double, 3>>& initial);

// ---------------------------------------------------------------------------
// Pointwise equilibrium mathematics
// ---------------------------------------------------------------------------

/// Running cost per unit time in state e under control (alpha, nu), with
/// composite_infected the population-awareness signal P_t(I). `guideline` is
/// the guideline value for state e itself. The baseline model is recovered
/// with zero awareness coefficients.
double running_cost(HealthState e, double alpha, double nu, double composite_infected,
                    const GroupParams& g, double guideline);

/// Best-response socialization level of a susceptible individual:
///   lambda_S + beta * z * (u_S - u_I) / (2 c_lambda),
/// projected onto [0, 1]. The quadratic Hamiltonian makes the projection of
/// the unconstrained minimizer the constrained minimizer.
double best_response_alpha_S(double u_S, double u_I, double z, const GroupParams& g,
                             double guideline_S);

/// Best-response vaccination rate: 1 iff kappa * u_S > c_nu strictly, 0 at
/// exact equality (the jump-time convention).
double best_response_nu(double u_S, const GroupParams& g);

/// Aggregate interaction intensity per group,
///   z^k = sum_l w(k, l) * guide_I^l * infected^l * mass^l,
/// using that infected individuals comply with their guideline at
/// equilibrium.
std::vector<double> compute_aggregate(const std::vector<double>& infected,
                                      const std::vector<double>& guide_I,
                                      const ContactMatrix& w, const std::vector<double>& masses);

/// Off-diagonal transition rates of the generator at one time point.
struct TransitionRates {
    double s_to_i = 0.0; ///< beta * alpha * z
    double s_to_r = 0.0; ///< kappa * nu
    double i_to_r = 0.0; ///< gamma
};

TransitionRates transition_rates(double alpha, double nu, double z, const GroupParams& g);

} // namespace epimfg

#endif // EPIMFG_MODEL_HPP
