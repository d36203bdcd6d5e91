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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "epimfg/model.hpp"

using namespace epimfg;

namespace {

GroupParams single_pop_params()
{
    GroupParams g;
    g.beta = 0.4;
    g.gamma = 1.0 / 7.0;
    g.kappa = 0.005;
    g.c_lambda = 1.0;
    g.c_nu = 0.001;
    g.c_infection = 1.0;
    g.mass = 1.0;
    return g;
}

} // namespace

TEST_CASE("running cost: compliant recovered individual pays nothing")
{
    const GroupParams g = single_pop_params();
    CHECK(running_cost(HealthState::Recovered, 0.9, 0.0, 0.0, g, 0.9) == 0.0);
    CHECK(running_cost(HealthState::Recovered, 0.35, 0.0, 0.5, g, 0.35) == 0.0);
}

TEST_CASE("running cost: susceptible pays only the vaccination cost at full compliance")
{
    const GroupParams g = single_pop_params();
    CHECK(running_cost(HealthState::Susceptible, 0.9, 1.0, 0.0, g, 0.9) ==
          doctest::Approx(0.001).epsilon(1e-12));
}

TEST_CASE("running cost: infected cost includes the awareness term")
{
    GroupParams g = single_pop_params();
    g.c_awareness_I = 0.5;
    CHECK(running_cost(HealthState::Infected, 0.9, 0.0, 0.01, g, 0.9) ==
          doctest::Approx(1.005).epsilon(1e-12));
}

TEST_CASE("running cost: out-of-range inputs are rejected")
{
    const GroupParams g = single_pop_params();
    CHECK_THROWS_AS(running_cost(HealthState::Susceptible, 1.5, 0.0, 0.0, g, 0.9),
                    std::domain_error);
    CHECK_THROWS_AS(running_cost(HealthState::Susceptible, 0.5, -0.1, 0.0, g, 0.9),
                    std::domain_error);
    CHECK_THROWS_AS(running_cost(HealthState::Infected, 0.5, 0.0, 1.2, g, 0.9),
                    std::domain_error);
}

TEST_CASE("running cost is nonnegative and vanishes only at full compliance")
{
    GroupParams g = single_pop_params();
    g.c_awareness_S = 0.3;
    g.c_awareness_I = 0.3;
    std::mt19937 rng(7041);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double alpha = unit(rng);
        const double nu = unit(rng);
        const double pop = unit(rng);
        const double guide = 0.05 + 0.95 * unit(rng);
        for (HealthState e :
             {HealthState::Susceptible, HealthState::Infected, HealthState::Recovered}) {
            const double cost = running_cost(e, alpha, nu, pop, g, guide);
            CHECK(cost >= 0.0);
            if (cost == 0.0) {
                CHECK(alpha == guide);
                if (e == HealthState::Susceptible) {
                    CHECK(nu * g.c_nu == 0.0);
                    CHECK(pop * g.c_awareness_S == 0.0);
                }
            }
        }
    }
}

TEST_CASE("best response socialization: zero value gap or zero pressure gives compliance")
{
    const GroupParams g = single_pop_params();
    CHECK(best_response_alpha_S(0.7, 0.7, 0.05, g, 0.9) == 0.9);
    CHECK(best_response_alpha_S(0.2, 5.0, 0.0, g, 0.9) == 0.9);
}

TEST_CASE("best response socialization: unit value gap dips below the guideline")
{
    const GroupParams g = single_pop_params();
    // 0.9 + 0.4 * 0.009 * (-1) / 2
    CHECK(best_response_alpha_S(1.0, 2.0, 0.009, g, 0.9) ==
          doctest::Approx(0.8982).epsilon(1e-12));
}

TEST_CASE("best response socialization minimizes the Hamiltonian")
{
    // First-order optimality of the returned level against nudged
    // alternatives, for draws whose unclamped optimum is interior.
    std::mt19937 rng(90121);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int tested = 0;
    while (tested < 1000) {
        GroupParams g = single_pop_params();
        g.beta = 0.1 + unit(rng);
        g.c_lambda = 0.5 + unit(rng);
        const double guide = 0.2 + 0.6 * unit(rng);
        const double z = 0.5 * unit(rng);
        const double u_S = 8.0 * unit(rng);
        const double u_I = 8.0 * unit(rng);

        const double unclamped = guide + g.beta * z * (u_S - u_I) / (2.0 * g.c_lambda);
        if (unclamped <= 1e-4 || unclamped >= 1.0 - 1e-4) {
            continue;
        }
        ++tested;

        const double alpha = best_response_alpha_S(u_S, u_I, z, g, guide);
        auto hamiltonian = [&](double a) {
            return g.c_lambda * (guide - a) * (guide - a) + g.beta * a * z * (u_I - u_S);
        };
        CHECK(hamiltonian(alpha) <= hamiltonian(alpha + 1e-4));
        CHECK(hamiltonian(alpha) <= hamiltonian(alpha - 1e-4));
    }
}

TEST_CASE("best response socialization is projected onto [0, 1]")
{
    GroupParams g = single_pop_params();
    g.c_lambda = 0.01;
    CHECK(best_response_alpha_S(0.0, 50.0, 0.9, g, 0.9) == 0.0);
    CHECK(best_response_alpha_S(50.0, 0.0, 0.9, g, 0.9) == 1.0);
}

TEST_CASE("best response vaccination: strict threshold with zero at equality")
{
    const GroupParams g = single_pop_params();
    CHECK(best_response_nu(0.3, g) == 1.0);       // 0.0015 > 0.001
    CHECK(best_response_nu(g.c_nu / g.kappa, g) == 0.0); // exact equality
    CHECK(best_response_nu(0.0, g) == 0.0);
}

TEST_CASE("best response vaccination is monotone in the susceptible value")
{
    const GroupParams g = single_pop_params();
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = value(rng);
        const double b = value(rng);
        const double lo = std::min(a, b);
        const double hi = std::max(a, b);
        CHECK(best_response_nu(lo, g) <= best_response_nu(hi, g));
    }
}

TEST_CASE("aggregate: single population with the sensitivity-study values")
{
    ContactMatrix w(1, 1.0);
    const auto z = compute_aggregate({0.01}, {0.9}, w, {1.0});
    REQUIRE(z.size() == 1);
    CHECK(z[0] == doctest::Approx(0.009).epsilon(1e-14));
}

TEST_CASE("aggregate: vanishes without infection")
{
    ContactMatrix w(3, 0.925);
    for (int k = 0; k < 3; ++k) {
        w(k, k) = 1.0;
    }
    const auto z = compute_aggregate({0.0, 0.0, 0.0}, {0.9, 0.9, 0.9}, w,
                                     {0.3224, 0.3164, 0.3612});
    for (double v : z) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("aggregate: three-group hand evaluation")
{
    ContactMatrix w(3, 0.925);
    for (int k = 0; k < 3; ++k) {
        w(k, k) = 1.0;
    }
    const auto z = compute_aggregate({0.01, 0.01, 0.01}, {0.9, 0.9, 0.9}, w,
                                     {0.3224, 0.3164, 0.3612});
    const double expected = 0.9 * 0.01 * (1.0 * 0.3224 + 0.925 * 0.3164 + 0.925 * 0.3612);
    CHECK(z[0] == doctest::Approx(expected).epsilon(1e-14));
    CHECK(z[0] == doctest::Approx(0.008543).epsilon(1e-4));
}

TEST_CASE("aggregate: dimension mismatch is a config error")
{
    ContactMatrix w(2, 0.5);
    CHECK_THROWS_AS(compute_aggregate({0.01}, {0.9, 0.9}, w, {0.5, 0.5}), ConfigError);
}

TEST_CASE("aggregate is linear in the infected proportions and monotone in the contacts")
{
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int K = 1 + static_cast<int>(unit(rng) * 4);
        ContactMatrix w(K);
        std::vector<double> masses(static_cast<std::size_t>(K), 1.0 / K);
        std::vector<double> guide(static_cast<std::size_t>(K));
        std::vector<double> pa(static_cast<std::size_t>(K));
        std::vector<double> pb(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            guide[static_cast<std::size_t>(k)] = 0.1 + 0.9 * unit(rng);
            pa[static_cast<std::size_t>(k)] = unit(rng);
            pb[static_cast<std::size_t>(k)] = unit(rng);
            for (int l = 0; l < K; ++l) {
                w(k, l) = unit(rng);
            }
        }
        const double s = unit(rng);

        // Linearity: z(pa + s*pb) = z(pa) + s*z(pb), entrywise.
        std::vector<double> combo(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            combo[static_cast<std::size_t>(k)] =
                pa[static_cast<std::size_t>(k)] + s * pb[static_cast<std::size_t>(k)];
        }
        const auto za = compute_aggregate(pa, guide, w, masses);
        const auto zb = compute_aggregate(pb, guide, w, masses);
        const auto zc = compute_aggregate(combo, guide, w, masses);
        for (int k = 0; k < K; ++k) {
            CHECK(zc[static_cast<std::size_t>(k)] ==
                  doctest::Approx(za[static_cast<std::size_t>(k)] +
                                  s * zb[static_cast<std::size_t>(k)])
                      .epsilon(1e-12));
        }

        // Monotonicity: increasing one contact entry cannot decrease any z.
        ContactMatrix w2 = w;
        const int ik = static_cast<int>(unit(rng) * K);
        const int il = static_cast<int>(unit(rng) * K);
        w2(ik, il) = std::min(1.0, w2(ik, il) + unit(rng) * (1.0 - w2(ik, il)));
        const auto z2 = compute_aggregate(pa, guide, w2, masses);
        for (int k = 0; k < K; ++k) {
            CHECK(z2[static_cast<std::size_t>(k)] >=
                  za[static_cast<std::size_t>(k)] - 1e-15);
        }

        // Upper bound: z^k never exceeds the contact-weighted total mass.
        for (int k = 0; k < K; ++k) {
            double bound = 0.0;
            for (int l = 0; l < K; ++l) {
                bound += w(k, l) * masses[static_cast<std::size_t>(l)];
            }
            CHECK(za[static_cast<std::size_t>(k)] <= bound + 1e-15);
        }
    }
}

TEST_CASE("transition rates: component products and trivial zeroes")
{
    const GroupParams g = single_pop_params();

    const auto quiet = transition_rates(0.9, 0.0, 0.0, g);
    CHECK(quiet.s_to_i == 0.0);
    CHECK(quiet.s_to_r == 0.0);
    CHECK(quiet.i_to_r == doctest::Approx(1.0 / 7.0).epsilon(1e-15));

    const auto active = transition_rates(0.9, 1.0, 0.009, g);
    CHECK(active.s_to_i == doctest::Approx(0.4 * 0.9 * 0.009).epsilon(1e-15));
    CHECK(active.s_to_i == doctest::Approx(0.00324).epsilon(1e-12));
    CHECK(active.s_to_r == doctest::Approx(0.005).epsilon(1e-15));

    const auto isolated = transition_rates(0.0, 1.0, 5.0, g);
    CHECK(isolated.s_to_i == 0.0);
}

TEST_CASE("transition rates assemble into a proper generator")
{
    std::mt19937 rng(1311);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        GroupParams g = single_pop_params();
        g.beta = 0.05 + unit(rng);
        g.kappa = 0.001 + 0.02 * unit(rng);
        g.gamma = 0.05 + 0.3 * unit(rng);
        const auto r = transition_rates(unit(rng), unit(rng) < 0.5 ? 1.0 : 0.0, unit(rng), g);
        CHECK(r.s_to_i >= 0.0);
        CHECK(r.s_to_r >= 0.0);
        CHECK(r.i_to_r >= 0.0);

        // Fill the 3x3 generator; the diagonal is the negative sum of the
        // off-diagonal entries, so summing those first cancels exactly.
        const double q[3][3] = {{-(r.s_to_i + r.s_to_r), r.s_to_i, r.s_to_r},
                                {0.0, -r.i_to_r, r.i_to_r},
                                {0.0, 0.0, 0.0}};
        for (const auto& row : q) {
            CHECK(row[0] + (row[1] + row[2]) == 0.0);
        }
    }
}

TEST_CASE("time grid rounds the step count and checks consistency")
{
    const TimeGrid grid = TimeGrid::make(80.0, 0.016);
    CHECK(grid.n_steps == 5000);
    CHECK(grid.n_points() == 5001);
    CHECK(grid.time(0) == 0.0);
    CHECK(grid.time(5000) == doctest::Approx(80.0).epsilon(1e-12));

    CHECK_THROWS_AS(TimeGrid::make(1.0, 0.3), ConfigError);  // 1 not a multiple of 0.3
    CHECK_THROWS_AS(TimeGrid::make(1.0, 1.0), ConfigError);  // fewer than 2 steps
    CHECK_THROWS_AS(TimeGrid::make(-1.0, 0.1), ConfigError);
}

TEST_CASE("parameter validation names the broken invariant")
{
    GroupParams g = single_pop_params();
    g.gamma = 0.0;
    CHECK_THROWS_WITH_AS(validate_group_params(g, 0),
                         doctest::Contains("gamma"), ConfigError);

    GroupParams a = single_pop_params();
    GroupParams b = single_pop_params();
    a.mass = 0.6;
    b.mass = 0.5;
    CHECK_THROWS_AS(validate_masses({a, b}), ConfigError);

    Guidelines guide(3, 1, 0.9);
    guide(1, 0, 0) = 0.0;
    CHECK_THROWS_WITH_AS(validate_guidelines(guide), doctest::Contains("full lockdown"),
                         ConfigError);

    ContactMatrix w(2, 0.5);
    w(0, 1) = 1.5;
    CHECK_THROWS_AS(validate_contact_matrix(w), ConfigError);
}

TEST_CASE("model regularity detects isolated groups")
{
    ContactMatrix w(2, 0.0);
    w(0, 0) = 1.0;
    w(1, 1) = 1.0;
    std::vector<std::array<double, 3>> initial = {{0.99, 0.01, 0.0}, {1.0, 0.0, 0.0}};
    CHECK_FALSE(check_model_regularity(w, initial));

    w(1, 0) = 0.2; // group 2 now sees group 1's infection
    CHECK(check_model_regularity(w, initial));
}
