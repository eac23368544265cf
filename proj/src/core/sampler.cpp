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

#include "ulasso/sampler.hpp"

#include <cmath>

namespace ulasso {

void SimulationConfig::validate() const
{
    require(p >= 2 && p >= 2 * block_size(p), ErrorKind::config, "simulation: p must satisfy p >= 2 floor(sqrt p)");
    require(rho >= 0.0 && rho < 1.0, ErrorKind::config, "simulation: rho must lie in [0, 1)");
    require(n_pop >= 3, ErrorKind::config, "simulation: population size must be at least 3");
}

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

Matrix ar1_covariance(Index p, double rho)
{
    require(p >= 1, ErrorKind::domain, "ar1_covariance: p must be positive");
    require(rho >= 0.0 && rho < 1.0, ErrorKind::domain, "ar1_covariance: rho must lie in [0, 1)");
    Matrix m(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j)
            m(i, j) = (i == j) ? 1.0 : std::pow(rho, static_cast<double>(std::abs(i - j)));
    return m;
}

Index block_size(Index p)
{
    require(p >= 1, ErrorKind::domain, "block_size: p must be positive");
    Index c = static_cast<Index>(std::sqrt(static_cast<double>(p)));
    while (c * c > p) --c;
    while ((c + 1) * (c + 1) <= p) ++c;
    return c;
}

Vector build_beta0(Index p)
{
    const Index c = block_size(p);
    require(p >= 2 * c, ErrorKind::domain, "build_beta0: p must satisfy p >= 2 floor(sqrt p)");
    Vector b = Vector::Zero(p);
    b.head(c).setConstant(1.0);
    b.segment(c, c).setConstant(0.5);
    return b;
}

Vector draw_xi(XiLaw law, Index p, std::uint64_t seed)
{
    Rng rng(stream_seed(seed, 0x78690000ULL));
    Vector xi(p);
    if (law == XiLaw::normal_3_1) {
        std::normal_distribution<double> d(3.0, 1.0);
        for (Index j = 0; j < p; ++j) xi[j] = d(rng);
    } else {
        std::uniform_real_distribution<double> d(2.0, 5.0);
        for (Index j = 0; j < p; ++j) xi[j] = d(rng);
    }
    return xi;
}

Vector alpha_from_xi(const Vector& beta0, const Vector& xi, double n_pop)
{
    require(beta0.size() == xi.size(), ErrorKind::domain, "alpha_from_xi: length mismatch");
    require(beta0.allFinite() && xi.allFinite(), ErrorKind::domain, "alpha_from_xi: non-finite input");
    const double log_n = std::log(n_pop);
    require(log_n > 1.0, ErrorKind::domain, "alpha_from_xi: ln N must exceed 1");
    return beta0 + xi / log_n;
}

Vector build_alpha0(const Vector& beta0, XiLaw law, Index n_pop, std::uint64_t seed)
{
    require(n_pop >= 3, ErrorKind::domain, "build_alpha0: N must be at least 3");
    return alpha_from_xi(beta0, draw_xi(law, beta0.size(), seed), static_cast<double>(n_pop));
}

DesignSpec simulation_design(const SimulationConfig& cfg)
{
    cfg.validate();
    Vector beta0 = build_beta0(cfg.p);
    Vector alpha0 = build_alpha0(beta0, cfg.xi_law, cfg.n_pop, cfg.seed);
    return DesignSpec(ar1_covariance(cfg.p, cfg.rho), std::move(beta0), std::move(alpha0), 1.0);
}

double expit(double t)
{
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

Dataset gen_population(const DesignSpec& spec, Index n_pop, std::uint64_t seed)
{
    require(n_pop >= 1, ErrorKind::domain, "gen_population: N must be positive");
    const Index p = spec.p();
    Eigen::LLT<Matrix> llt(spec.sigma());
    require(llt.info() == Eigen::Success, ErrorKind::domain, "gen_population: covariance is not positive definite");
    const Matrix lower = llt.matrixL();

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    // Fill row by row so the draw order does not depend on storage layout.
    Matrix z(n_pop, p);
    for (Index i = 0; i < n_pop; ++i)
        for (Index j = 0; j < p; ++j) z(i, j) = normal(rng);
    Matrix x = z * lower.transpose();

    Vector s = x * spec.alpha0();
    const double sd = spec.surrogate_noise_sd();
    for (Index i = 0; i < n_pop; ++i) s[i] += sd * normal(rng);

    const Vector lin = x * spec.beta0();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector y(n_pop);
    for (Index i = 0; i < n_pop; ++i) {
        double u = unif(rng);
        while (u <= 0.0) u = unif(rng);
        const double eps = std::log(u) - std::log1p(-u);
        y[i] = (lin[i] + eps > 0.0) ? 1.0 : 0.0;
    }
    return Dataset(std::move(x), std::move(s), std::move(y));
}

} // namespace ulasso
