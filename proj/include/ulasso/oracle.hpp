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

#include <array>
#include <optional>

#include "ulasso/model.hpp"

namespace ulasso {

// Standard normal helpers. The cdf and pdf are accurate to about 1e-15 absolute;
// the quantile uses Wichura's AS241 rational approximations.
double normal_pdf(double t);
double normal_cdf(double t);
double normal_sf(double t);          ///< 1 - cdf(t), without cancellation
double normal_log_cdf(double t);     ///< log cdf(t), finite far into the lower tail
double normal_quantile(double u);    ///< domain error outside (0, 1)
/// pdf(t) / sf(t), the inverse Mills ratio, stable for large t.
double mills_ratio(double t);

/// Population quantities of the Gaussian surrogate model that every tail formula uses.
struct TheoryParams
{
    double sigma_s = 0.0;       ///< sd of S
    double alpha_var = 0.0;     ///< alpha0' sigma alpha0
    Vector gamma0;              ///< sigma alpha0 / sigma_s^2
    Matrix big_gamma;           ///< conditional covariance of X given S
    double eta0 = 0.0;          ///< sd of beta0'X
    double rho0 = 0.0;          ///< correlation of alpha0'X and beta0'X
    double rho_tilde = 0.0;     ///< rho0 sqrt(alpha_var) / sigma_s
    double beta_gamma = 0.0;    ///< beta0' gamma0
    double lambda_max_sigma = 0.0;
    double z_q = 0.0;           ///< (q/2) normal quantile
    double z_bar_q = 0.0;       ///< -z_q
};

TheoryParams theory_params(const DesignSpec& spec, double q);

struct TailMoments
{
    double mean_hi;       ///< E(S | upper tail)
    double mean_lo;       ///< E(S | lower tail)
    double var_s;         ///< second moment of S on the two-tailed event
    double mean_x_scale;  ///< E(X | upper tail) = mean_x_scale * gamma0
};

TailMoments trunc_tail_moments(double q, double sigma_s);

/// Second-moment matrix of X on the two-tailed event: sigma + gamma0 gamma0' sigma_s^2 xi_q.
Matrix restricted_var_x(const TheoryParams& params, const Matrix& sigma, double q);

/// Moment generating function of S restricted to the two-tailed event.
double restricted_mgf_s(double t, double q, double sigma_s);
/// Moment generating function of X restricted to the two-tailed event.
double restricted_mgf_x(const Vector& t, double q, const TheoryParams& params, const Matrix& sigma);

enum class EnvelopeKind { s, x };

struct Envelope
{
    double variance;   ///< sub-Gaussian variance proxy
    double prefactor;  ///< 1 for q <= 1/2, 4 above
};

/// mgf(t) <= prefactor * exp(variance * |t|^2 / 2).
Envelope subgaussian_envelope(EnvelopeKind kind, double q, const TheoryParams& params);

struct MisclassificationBounds
{
    double bound1;
    double bound2;
    double bound3;  ///< reported with unit constant; valid only up to a universal factor
};

MisclassificationBounds pi_q_bound(double q, const TheoryParams& params);

struct QuantileBounds
{
    double upper;                 ///< 2 sigma_s^2 ln(1/q)
    std::optional<double> lower;  ///< 2 sigma_s^2 ln(1/(5q)), for q >= 0.0002
};

/// Bounds on the squared upper threshold sigma_s^2 z_bar_q^2.
QuantileBounds zq_bounds(double q, double sigma_s);

struct XiQuantities
{
    double xi_q;        ///< z_bar * mills(z_bar)
    double xi_tilde_q;  ///< xi_q / (sigma_s^2 + xi_q alpha_var)
    double xi_star_q;   ///< sigma_s xi_tilde_q / (2 z_bar)
};

XiQuantities xi_quantities(double q, double sigma_s, double alpha_var);

struct SigmaQInverse
{
    Matrix inverse;
    XiQuantities xi;
};

/// Rank-one (Woodbury) inverse of the restricted second-moment matrix of X.
SigmaQInverse sigma_q_inverse(const Matrix& sigma, const Vector& alpha0, double noise_sd, double q);

/// Limit of the unpenalized extreme-subset regression: xi_star_q * alpha0.
Vector alpha_bar_population(const Matrix& sigma, const Vector& alpha0, double noise_sd, double q);

struct ProportionalityDecomposition
{
    double a_v;
    double b_v;
    double c_v;    ///< intercept term; zero for a centered Gaussian design
    double a_bar;  ///< beta0' sigma alpha0 / alpha0' sigma alpha0
    double rho;
};

/// Population least-squares coefficients of v'X on (alpha0'X, beta0'X).
ProportionalityDecomposition linearity_coefficients(const Vector& v, const Vector& beta0,
                                                    const Vector& alpha0, const Matrix& sigma);

/// True when some coordinate is zero in beta0 and nonzero in alpha0.
bool assumption_c1_holds(const Vector& beta0, const Vector& alpha0);

struct DeviationBound
{
    double bound;
    double d_bar;
    double d1;
    double d2;
    double c_min;
    double c_max;
};

DeviationBound deviation_bound(double lambda, double kappa_q, const Vector& beta0, const Vector& alpha0);

struct LambdaRate
{
    double a_nq;
    double prob_floor;
};

/// Default constants (c1, ..., c6) for the lambda-rate statement.
inline constexpr std::array<double, 6> kDefaultRateConstants{2.0, 2.0, 1.0, 2.0, 2.0, 1.0};

LambdaRate lambda_rate(const std::array<double, 6>& c, double sigma_q, double gamma_q, double pi_q,
                       double n_q, double p);

/// sqrt(gamma_q^2) = subgaussian_param(label mean) + sigma_q ||beta_bar_q||.
double gamma_q(double label_mean, double sigma_q, double beta_bar_norm);

/// Sub-Gaussian parameter of a Bernoulli(a) variable.
double binary_subgaussian_param(double a);

struct OptimalQ
{
    double eta_opt;
    double q_opt;
    double rate_opt;
};

OptimalQ optimal_q(double nu, double n_pop);

struct BqSandwich
{
    double center;
    double slack;
};

BqSandwich b_q_sandwich(double q, double c_star, double d_star, double nu, double theta);

/// Smallest eigenvalue of a centered design's Gram matrix; plug-in for the
/// restricted strong convexity constant.
double empirical_kappa(const Matrix& gram);

/// Every closed-form quantity for one (design, q) pair.
struct TheoryReport
{
    double q;
    TheoryParams params;
    TailMoments moments;
    Envelope envelope_s;
    Envelope envelope_x;
    std::optional<MisclassificationBounds> pi_bounds;
    QuantileBounds quantile_bounds;
    XiQuantities xi;
    Vector alpha_bar;
    double lambda_min_sigma_q;
    bool c1_holds;
    std::optional<DeviationBound> deviation_unit;  ///< at lambda = kappa = 1
};

TheoryReport theory_report(const DesignSpec& spec, double q);

} // namespace ulasso
