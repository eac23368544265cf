// Copyright 2026 The ulasso Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

#include "ulasso/model.hpp"

namespace ulasso {

/// Law of the per-coordinate offsets that push alpha0 away from beta0.
enum class XiLaw {
    normal_3_1,   ///< Normal(mean 3, sd 1)
    uniform_2_5,  ///< Uniform(2, 5)
};

struct SimulationConfig
{
    Index p = 20;
    double rho = 0.0;
    XiLaw xi_law = XiLaw::normal_3_1;
    Index n_pop = 100000;
    std::uint64_t seed = 1;

    /// Throws a config error when p < 2 floor(sqrt p) or another field is out of range.
    void validate() const;
};

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an isolated RNG stream identified by (seed, a, b).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Entry (i, j) equals rho^|i - j|.
Matrix ar1_covariance(Index p, double rho);

/// floor(sqrt(p)), computed without floating-point rounding risk.
Index block_size(Index p);

/// First block of ones, second block of halves, remaining zeros.
Vector build_beta0(Index p);

Vector draw_xi(XiLaw law, Index p, std::uint64_t seed);

/// alpha0 = beta0 + xi / ln(N).
Vector alpha_from_xi(const Vector& beta0, const Vector& xi, double n_pop);

Vector build_alpha0(const Vector& beta0, XiLaw law, Index n_pop, std::uint64_t seed);

/// Design of the simulation settings: AR(1) covariance, unit surrogate noise.
DesignSpec simulation_design(const SimulationConfig& cfg);

/// X ~ Normal(0, sigma) via the lower Cholesky factor, S = alpha0'X + noise,
/// Y = 1(beta0'X + logistic > 0).
Dataset gen_population(const DesignSpec& spec, Index n_pop, std::uint64_t seed);

/// Standard logistic CDF.
double expit(double t);

} // namespace ulasso
