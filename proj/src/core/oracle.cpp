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

#include "ulasso/oracle.hpp"

#include <cmath>
#include <numbers>

namespace ulasso {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

double log_sum_exp(double a, double b)
{
    if (a == -INFINITY) return b;
    if (b == -INFINITY) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

} // namespace

double normal_pdf(double t)
{
    return kInvSqrt2Pi * std::exp(-0.5 * t * t);
}

double normal_cdf(double t)
{
    return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

double normal_sf(double t)
{
    return 0.5 * std::erfc(t / std::numbers::sqrt2);
}

double mills_ratio(double t)
{
    if (t < 10.0) return normal_pdf(t) / normal_sf(t);
    // Continued fraction sf/pdf = 1/(t + 1/(t + 2/(t + 3/(t + ...)))), evaluated from the tail.
    double f = t;
    for (int k = 80; k >= 1; --k) f = t + k / f;
    return f;
}

double normal_log_cdf(double t)
{
    if (t > -10.0) return std::log(normal_cdf(t));
    return -0.5 * t * t - kLogSqrt2Pi - std::log(mills_ratio(-t));
}

double normal_quantile(double u)
{
    require(u > 0.0 && u < 1.0, ErrorKind::domain, "normal_quantile: argument must lie in (0, 1)");
    const double q = u - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num = ((((((2509.0809287301226727 * r + 33430.575583588128105) * r
                                 + 67265.770927008700853) * r + 45921.953931549871457) * r
                               + 13731.693765509461125) * r + 1971.5909503065514427) * r
                             + 133.14166789178437745) * r + 3.387132872796366608;
        const double den = ((((((5226.495278852545925 * r + 28729.085735721942674) * r
                                 + 39307.89580009271061) * r + 21213.794301586595867) * r
                               + 5394.1960214247511077) * r + 687.1870074920579083) * r
                             + 42.313330701600911252) * r + 1.0;
        return q * num / den;
    }
    double r = std::sqrt(-std::log(q < 0.0 ? u : 1.0 - u));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num = ((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r
                                 + 0.24178072517745061177) * r + 1.27045825245236838258) * r
                               + 3.64784832476320460504) * r + 5.7694972214606914055) * r
                             + 4.6303378461565452959) * r + 1.42343711074968357734;
        const double den = ((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r
                                 + 0.0151986665636164571966) * r + 0.14810397642748007459) * r
                               + 0.68976733498510000455) * r + 1.6763848301838038494) * r
                             + 2.05319162663775882187) * r + 1.0;
        val = num / den;
    } else {
        r -= 5.0;
        const double num = ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                                 + 0.0012426609473880784386) * r + 0.026532189526576123093) * r
                               + 0.29656057182850489123) * r + 1.7848265399172913358) * r
                             + 5.4637849111641143699) * r + 6.6579046435011037772;
        const double den = ((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r
                                 + 1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r
                               + 0.0148753612908506148525) * r + 0.13692988092273580531) * r
                             + 0.59983220655588793769) * r + 1.0;
        val = num / den;
    }
    return q < 0.0 ? -val : val;
}

TheoryParams theory_params(const DesignSpec& spec, double q)
{
    require(q > 0.0 && q <= 1.0, ErrorKind::domain, "theory_params: q must lie in (0, 1]");
    const Matrix& sigma = spec.sigma();
    const Vector& a = spec.alpha0();
    const Vector& b = spec.beta0();

    TheoryParams tp;
    const Vector sa = sigma * a;
    tp.alpha_var = a.dot(sa);
    const double var_s = tp.alpha_var + spec.surrogate_noise_sd() * spec.surrogate_noise_sd();
    tp.sigma_s = std::sqrt(var_s);
    tp.gamma0 = sa / var_s;
    tp.big_gamma = sigma - var_s * tp.gamma0 * tp.gamma0.transpose();
    tp.eta0 = std::sqrt(b.dot(sigma * b));
    tp.rho0 = tp.eta0 > 0.0 ? b.dot(sa) / (tp.eta0 * std::sqrt(tp.alpha_var)) : 0.0;
    tp.rho_tilde = tp.rho0 * std::sqrt(tp.alpha_var) / tp.sigma_s;
    tp.beta_gamma = b.dot(tp.gamma0);
    tp.lambda_max_sigma = Eigen::SelfAdjointEigenSolver<Matrix>(sigma, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    tp.z_q = normal_quantile(q / 2.0);
    tp.z_bar_q = -tp.z_q;
    return tp;
}

TailMoments trunc_tail_moments(double q, double sigma_s)
{
    require(q > 0.0 && q <= 1.0, ErrorKind::domain, "trunc_tail_moments: q must lie in (0, 1]");
    require(sigma_s > 0.0, ErrorKind::domain, "trunc_tail_moments: sigma_s must be positive");
    const double z_bar = -normal_quantile(q / 2.0);
    const double m = mills_ratio(z_bar);
    TailMoments out;
    out.mean_hi = sigma_s * m;
    out.mean_lo = -out.mean_hi;
    out.var_s = sigma_s * sigma_s * (1.0 + z_bar * m);
    out.mean_x_scale = out.mean_hi;
    return out;
}

Matrix restricted_var_x(const TheoryParams& params, const Matrix& sigma, double q)
{
    const XiQuantities xi = xi_quantities(q, params.sigma_s, params.alpha_var);
    return sigma + params.gamma0 * params.gamma0.transpose() * (params.sigma_s * params.sigma_s * xi.xi_q);
}

namespace {

double log_tail_mgf(double quad, double u, double q, double sigma_s, double z_q)
{
    const double shift = sigma_s * u;
    return 0.5 * quad - std::log(q) + log_sum_exp(normal_log_cdf(z_q + shift), normal_log_cdf(z_q - shift));
}

} // namespace

double restricted_mgf_s(double t, double q, double sigma_s)
{
    require(q > 0.0 && q <= 1.0, ErrorKind::domain, "restricted_mgf_s: q must lie in (0, 1]");
    const double z_q = normal_quantile(q / 2.0);
    return std::exp(log_tail_mgf(sigma_s * sigma_s * t * t, t, q, sigma_s, z_q));
}

double restricted_mgf_x(const Vector& t, double q, const TheoryParams& params, const Matrix& sigma)
{
    require(q > 0.0 && q <= 1.0, ErrorKind::domain, "restricted_mgf_x: q must lie in (0, 1]");
    require(t.size() == sigma.rows(), ErrorKind::domain, "restricted_mgf_x: argument length differs from p");
    const double z_q = normal_quantile(q / 2.0);
    return std::exp(log_tail_mgf(t.dot(sigma * t), t.dot(params.gamma0), q, params.sigma_s, z_q));
}

Envelope subgaussian_envelope(EnvelopeKind kind, double q, const TheoryParams& params)
{
    require(q > 0.0 && q <= 1.0, ErrorKind::domain, "subgaussian_envelope: q must lie in (0, 1]");
    const double z = normal_quantile(q / 2.0);
    const double s2 = params.sigma_s * params.sigma_s;
    const bool narrow = q <= 0.5;
    if (kind == EnvelopeKind::s)
        return narrow ? Envelope{s2 * (1.0 + 2.0 * z * z), 1.0} : Envelope{s2, 4.0};
    return narrow ? Envelope{params.lambda_max_sigma + 2.0 * s2 * z * z * params.gamma0.squaredNorm(), 1.0}
                  : Envelope{params.lambda_max_sigma, 4.0};
}

MisclassificationBounds pi_q_bound(double q, const TheoryParams& params)
{
    require(q > 0.0 && q < 1.0, ErrorKind::domain, "pi_q_bound: q must lie in (0, 1)");
    const double zb = -normal_quantile(q / 2.0);
    require(zb > 0.0, ErrorKind::domain, "pi_q_bound: upper quantile must be positive");
    require(params.rho_tilde >= 0.0, ErrorKind::domain, "pi_q_bound: rho_tilde must be nonnegative");
    const double eta = params.eta0;
    const double rt = params.rho_tilde;
    const double shift = params.sigma_s * params.beta_gamma;

    const double log_b1 = normal_log_cdf(-zb - shift) - normal_log_cdf(-zb) + 0.5 * eta * eta;
    const double log_b3 = 0.5 * (1.0 - rt * rt) * eta * eta - zb * rt * eta;
    const double log_b2 = log_b3 + std::log(zb * zb + 1.0) - std::log(zb) - std::log(zb + rt * eta);
    return {std::exp(log_b1), std::exp(log_b2), std::exp(log_b3)};
}

QuantileBounds zq_bounds(double q, double sigma_s)
{
    require(q > 0.0 && q <= 1.0, ErrorKind::domain, "zq_bounds: q must lie in (0, 1]");
    QuantileBounds out;
    const double s2 = sigma_s * sigma_s;
    out.upper = -2.0 * s2 * std::log(q);
    if (q >= 0.0002) out.lower = -2.0 * s2 * std::log(5.0 * q);
    return out;
}

XiQuantities xi_quantities(double q, double sigma_s, double alpha_var)
{
    require(q > 0.0 && q <= 1.0, ErrorKind::domain, "xi_quantities: q must lie in (0, 1]");
    const double zb = -normal_quantile(q / 2.0);
    const double m = mills_ratio(zb);
    XiQuantities xi;
    xi.xi_q = zb * m;
    const double denom = sigma_s * sigma_s + xi.xi_q * alpha_var;
    xi.xi_tilde_q = xi.xi_q / denom;
    // sigma_s xi_tilde / (2 z_bar) with the z_bar cancelled, so q = 1 is finite.
    xi.xi_star_q = sigma_s * m / (2.0 * denom);
    return xi;
}

SigmaQInverse sigma_q_inverse(const Matrix& sigma, const Vector& alpha0, double noise_sd, double q)
{
    require(sigma.rows() == sigma.cols() && sigma.rows() == alpha0.size(), ErrorKind::domain,
            "sigma_q_inverse: dimension mismatch");
    Eigen::LLT<Matrix> llt(sigma);
    require(llt.info() == Eigen::Success, ErrorKind::domain, "sigma_q_inverse: covariance is not positive definite");
    const double alpha_var = alpha0.dot(sigma * alpha0);
    const double sigma_s = std::sqrt(alpha_var + noise_sd * noise_sd);
    SigmaQInverse out;
    out.xi = xi_quantities(q, sigma_s, alpha_var);
    out.inverse = llt.solve(Matrix::Identity(sigma.rows(), sigma.cols()))
                  - out.xi.xi_tilde_q * alpha0 * alpha0.transpose();
    return out;
}

Vector alpha_bar_population(const Matrix& sigma, const Vector& alpha0, double noise_sd, double q)
{
    const double alpha_var = alpha0.dot(sigma * alpha0);
    const double sigma_s = std::sqrt(alpha_var + noise_sd * noise_sd);
    return xi_quantities(q, sigma_s, alpha_var).xi_star_q * alpha0;
}

ProportionalityDecomposition linearity_coefficients(const Vector& v, const Vector& beta0,
                                                    const Vector& alpha0, const Matrix& sigma)
{
    const Vector sb = sigma * beta0;
    const Vector sa = sigma * alpha0;
    const double eb = std::sqrt(beta0.dot(sb));
    const double ea = std::sqrt(alpha0.dot(sa));
    require(eb > 0.0 && ea > 0.0, ErrorKind::domain, "linearity_coefficients: zero-variance index");
    ProportionalityDecomposition d;
    d.rho = beta0.dot(sa) / (eb * ea);
    const double one_minus = 1.0 - d.rho * d.rho;
    require(one_minus > 1e-12, ErrorKind::domain, "linearity_coefficients: beta0 and alpha0 are collinear");
    const double vb = v.dot(sb) / eb;
    const double va = v.dot(sa) / ea;
    d.b_v = (vb - d.rho * va) / (one_minus * eb);
    d.a_v = (va - d.rho * vb) / (one_minus * ea);
    d.c_v = 0.0;
    d.a_bar = beta0.dot(sa) / (ea * ea);
    return d;
}

bool assumption_c1_holds(const Vector& beta0, const Vector& alpha0)
{
    require(beta0.size() == alpha0.size(), ErrorKind::domain, "assumption_c1_holds: length mismatch");
    for (Index j = 0; j < beta0.size(); ++j)
        if (beta0[j] == 0.0 && alpha0[j] != 0.0) return true;
    return false;
}

DeviationBound deviation_bound(double lambda, double kappa_q, const Vector& beta0, const Vector& alpha0)
{
    require(lambda >= 0.0 && kappa_q > 0.0, ErrorKind::domain, "deviation_bound: need lambda >= 0 and kappa > 0");
    if (!assumption_c1_holds(beta0, alpha0))
        fail(ErrorKind::assumption_violated, "deviation_bound: no coordinate is zero in beta0 and nonzero in alpha0");

    double l1 = 0.0;
    double c_min = INFINITY;
    double c_max = 0.0;
    Index s = 0;
    for (Index j = 0; j < beta0.size(); ++j) {
        if (beta0[j] != 0.0) {
            ++s;
            continue;
        }
        const double m = std::abs(alpha0[j]);
        l1 += m;
        if (m > 0.0) {
            c_min = std::min(c_min, m);
            c_max = std::max(c_max, m);
        }
    }
    DeviationBound out;
    out.c_min = c_min;
    out.c_max = c_max;
    out.d_bar = 4.0 * l1 + 3.0 * std::sqrt(static_cast<double>(s)) * c_max / (c_min * c_min);
    out.d1 = 4.0 * out.d_bar * l1;
    out.d2 = out.d_bar * alpha0.norm();
    out.bound = lambda / kappa_q * (std::sqrt(9.0 * static_cast<double>(s) + out.d1) + out.d2);
    return out;
}

LambdaRate lambda_rate(const std::array<double, 6>& c, double sigma_q, double gamma_q, double pi_q,
                       double n_q, double p)
{
    const auto [c1, c2, c3, c4, c5, c6] = c;
    require(std::max(c1, c2) > 1.0 && c4 > 1.0 && c5 > 1.0, ErrorKind::domain,
            "lambda_rate: need max(c1, c2) > 1, c4 > 1 and c5 > 1");
    require(c3 > 0.0 && c6 > 0.0, ErrorKind::domain, "lambda_rate: c3 and c6 must be positive");
    require(pi_q >= 0.0 && pi_q < 0.5, ErrorKind::domain, "lambda_rate: pi_q must lie in [0, 1/2)");
    require(n_q >= 1.0 && p >= 2.0, ErrorKind::domain, "lambda_rate: need n_q >= 1 and p >= 2");
    const double c0 = c4 + c5 * c6;
    const double log_p = std::log(p);
    const double log_term = c1 * log_p + c2 * std::log(n_q);
    LambdaRate out;
    out.a_nq = sigma_q * std::sqrt(2.0 * log_term) * (pi_q + std::sqrt((1.0 - 2.0 * pi_q) * c3 / n_q))
               + 2.0 * sigma_q * gamma_q * (std::sqrt(8.0 * c4 * log_p / n_q) + c0 * log_p / n_q);
    out.prob_floor = 1.0 - std::pow(pi_q / (1.0 - pi_q), c3)
                     - 2.0 / (std::pow(p, c1 - 1.0) * std::pow(n_q, c2 - 1.0))
                     - 2.0 / std::pow(p, c4 - 1.0) - 2.0 / std::pow(p, c5 - 1.0) - 2.0 / std::pow(p, c6);
    return out;
}

double gamma_q(double label_mean, double sigma_q, double beta_bar_norm)
{
    return binary_subgaussian_param(label_mean) + sigma_q * beta_bar_norm;
}

double binary_subgaussian_param(double a)
{
    require(a >= 0.0 && a <= 1.0, ErrorKind::domain, "binary_subgaussian_param: a must lie in [0, 1]");
    if (a == 0.0 || a == 1.0) return 0.0;
    const double d = a - 0.5;
    if (d == 0.0) return 0.5;
    // log(a / (1 - a)) = 2 atanh(2d) keeps precision near one half.
    return std::sqrt(d / (2.0 * std::atanh(2.0 * d)));
}

OptimalQ optimal_q(double nu, double n_pop)
{
    require(nu > 0.0 && n_pop >= 2.0, ErrorKind::domain, "optimal_q: need nu > 0 and N >= 2");
    OptimalQ out;
    out.eta_opt = 1.0 / (2.0 * nu + 1.0);
    out.q_opt = std::pow(n_pop, -out.eta_opt);
    out.rate_opt = std::pow(n_pop, -nu / (2.0 * nu + 1.0));
    return out;
}

BqSandwich b_q_sandwich(double q, double c_star, double d_star, double nu, double theta)
{
    require(q > 0.0 && q < 1.0, ErrorKind::domain, "b_q_sandwich: q must lie in (0, 1)");
    require(nu > 0.0 && theta > 0.0, ErrorKind::domain, "b_q_sandwich: nu and theta must be positive");
    const double lq = -std::log(q);
    const double nu_star = std::min(nu / 2.0, theta);
    return {c_star / std::sqrt(lq), d_star * std::pow(q, nu_star) * std::sqrt(lq)};
}

double empirical_kappa(const Matrix& gram)
{
    require(gram.rows() == gram.cols() && gram.rows() >= 1, ErrorKind::domain, "empirical_kappa: need a square matrix");
    return Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

TheoryReport theory_report(const DesignSpec& spec, double q)
{
    TheoryReport r;
    r.q = q;
    r.params = theory_params(spec, q);
    r.moments = trunc_tail_moments(q, r.params.sigma_s);
    r.envelope_s = subgaussian_envelope(EnvelopeKind::s, q, r.params);
    r.envelope_x = subgaussian_envelope(EnvelopeKind::x, q, r.params);
    if (q < 1.0 && r.params.rho_tilde >= 0.0) r.pi_bounds = pi_q_bound(q, r.params);
    r.quantile_bounds = zq_bounds(q, r.params.sigma_s);
    r.xi = xi_quantities(q, r.params.sigma_s, r.params.alpha_var);
    r.alpha_bar = r.xi.xi_star_q * spec.alpha0();
    r.lambda_min_sigma_q = empirical_kappa(restricted_var_x(r.params, spec.sigma(), q));
    r.c1_holds = assumption_c1_holds(spec.beta0(), spec.alpha0());
    if (r.c1_holds) r.deviation_unit = deviation_bound(1.0, 1.0, spec.beta0(), spec.alpha0());
    return r;
}

} // namespace ulasso
