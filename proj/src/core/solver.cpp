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

#include "ulasso/solver.hpp"

#include <algorithm>
#include <cmath>

namespace ulasso {

namespace {

double soft(double z, double t)
{
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

double sign(double v) { return (v > 0.0) - (v < 0.0); }

/// Violation of 0 in grad_j - lambda * subgradient(|beta_j|), with grad = -d(loss)/d(beta).
double kkt_from_gradient(const Vector& grad, const Vector& beta, double lambda)
{
    double worst = 0.0;
    for (Index j = 0; j < beta.size(); ++j) {
        const double v = (beta[j] == 0.0) ? std::max(std::abs(grad[j]) - lambda, 0.0)
                                          : std::abs(grad[j] - lambda * sign(beta[j]));
        worst = std::max(worst, v);
    }
    return worst;
}

struct CdOutcome
{
    Vector beta;
    int sweeps = 0;
    bool converged = false;
    std::vector<double> trace;
};

/// Coordinate descent on (1/n)||y - X b||^2 + lambda ||b||_1 expressed through
/// gram = X'X/n, xty = X'y/n and yty = y'y/n.
CdOutcome cd_core(const Matrix& gram, const Vector& xty, double yty, double lambda,
                  const SolverOptions& opts, Vector beta)
{
    const Index p = gram.cols();
    const double half = lambda / 2.0;
    auto objective = [&](const Vector& b, const Vector& gb) {
        return yty - 2.0 * b.dot(xty) + b.dot(gb) + lambda * b.lpNorm<1>();
    };
    for (Index j = 0; j < p; ++j)
        if (gram(j, j) <= 0.0) beta[j] = 0.0;

    CdOutcome out;
    Vector gb = gram * beta;
    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Index j = 0; j < p; ++j) {
            const double gjj = gram(j, j);
            if (gjj <= 0.0) continue;
            const double old = beta[j];
            const double z = xty[j] - gb[j] + gjj * old;
            const double nb = soft(z, half) / gjj;
            const double d = nb - old;
            if (d != 0.0) {
                gb.noalias() += gram.col(j) * d;
                beta[j] = nb;
                max_change = std::max(max_change, std::abs(d));
            }
        }
        out.sweeps = sweep;
        out.trace.push_back(objective(beta, gb));
        if (max_change <= opts.tol) {
            gb.noalias() = gram * beta;  // discard accumulated update drift
            const Vector grad = 2.0 * (xty - gb);
            if (kkt_from_gradient(grad, beta, lambda) <= 10.0 * opts.tol) {
                out.converged = true;
                break;
            }
        }
    }
    out.beta = std::move(beta);
    return out;
}

} // namespace

CenteredDesign center(const Matrix& x, const Vector& y)
{
    const Index n = x.rows();
    const Index p = x.cols();
    require(n >= 2, ErrorKind::domain, "center: need at least two rows");
    require(y.size() == n, ErrorKind::domain, "center: response length differs from rows");

    CenteredDesign d;
    d.col_means = x.colwise().mean().transpose();
    d.x_tilde = x.rowwise() - d.col_means.transpose();
    for (Index j = 0; j < p; ++j) {
        const double first = x(0, j);
        if ((x.col(j).array() == first).all()) {
            d.col_means[j] = first;
            d.x_tilde.col(j).setZero();
        }
    }
    d.y_mean = y.mean();
    d.y_tilde = y.array() - d.y_mean;

    const double inv_n = 1.0 / static_cast<double>(n);
    d.gram = (d.x_tilde.transpose() * d.x_tilde) * inv_n;
    d.col_sq_norms = d.gram.diagonal();
    d.xty = (d.x_tilde.transpose() * d.y_tilde) * inv_n;
    d.yty = d.y_tilde.squaredNorm() * inv_n;
    return d;
}

CenteredDesign center(const ExtremeSubset& subset)
{
    return center(subset.x(), subset.y_star());
}

Vector gradient_t(const CenteredDesign& design, const Vector& beta)
{
    require(beta.size() == design.p(), ErrorKind::domain, "gradient_t: beta length differs from p");
    const Vector r = design.y_tilde - design.x_tilde * beta;
    return (design.x_tilde.transpose() * r) / static_cast<double>(design.n());
}

double squared_loss(const CenteredDesign& design, const Vector& beta)
{
    return (design.y_tilde - design.x_tilde * beta).squaredNorm() / static_cast<double>(design.n());
}

double kkt_residual(const CenteredDesign& design, const Vector& beta, double lambda)
{
    return kkt_from_gradient(2.0 * gradient_t(design, beta), beta, lambda);
}

double lambda_max(const CenteredDesign& design)
{
    return design.p() == 0 ? 0.0 : 2.0 * design.xty.cwiseAbs().maxCoeff();
}

FitResult lasso_fit(const CenteredDesign& design, double lambda, const SolverOptions& opts,
                    const Vector* warm_start)
{
    require(std::isfinite(lambda) && lambda >= 0.0, ErrorKind::domain, "lasso_fit: lambda must be nonnegative");
    require(opts.tol > 0.0 && opts.max_sweeps >= 1, ErrorKind::domain, "lasso_fit: invalid solver options");
    Vector start = Vector::Zero(design.p());
    if (warm_start) {
        require(warm_start->size() == design.p(), ErrorKind::domain, "lasso_fit: warm start length differs from p");
        start = *warm_start;
    }

    CdOutcome cd = cd_core(design.gram, design.xty, design.yty, lambda, opts, std::move(start));

    FitResult fit;
    fit.beta_hat = std::move(cd.beta);
    fit.lambda = lambda;
    fit.support = FitResult::support_of(fit.beta_hat);
    fit.kkt_residual = kkt_residual(design, fit.beta_hat, lambda);
    fit.objective = squared_loss(design, fit.beta_hat) + lambda * fit.beta_hat.lpNorm<1>();
    fit.n_iterations = cd.sweeps;
    fit.converged = cd.converged && fit.kkt_residual <= 10.0 * opts.tol;
    fit.intercept = design.y_mean - design.col_means.dot(fit.beta_hat);
    fit.objective_trace = std::move(cd.trace);
    return fit;
}

std::vector<FitResult> lasso_path(const CenteredDesign& design, const std::vector<double>& lambdas,
                                  const SolverOptions& opts)
{
    require(!lambdas.empty(), ErrorKind::domain, "lasso_path: empty grid");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        require(std::isfinite(lambdas[i]) && lambdas[i] >= 0.0, ErrorKind::domain,
                "lasso_path: penalties must be nonnegative");
        if (i > 0)
            require(lambdas[i] < lambdas[i - 1], ErrorKind::domain, "lasso_path: grid must be strictly descending");
    }
    std::vector<FitResult> fits;
    fits.reserve(lambdas.size());
    for (double lam : lambdas) {
        const Vector* warm = fits.empty() ? nullptr : &fits.back().beta_hat;
        fits.push_back(lasso_fit(design, lam, opts, warm));
    }
    return fits;
}

double logistic_nll(const Matrix& x, const Vector& y, double intercept, const Vector& beta)
{
    const Vector eta = (x * beta).array() + intercept;
    double total = 0.0;
    for (Index i = 0; i < eta.size(); ++i) {
        const double e = eta[i];
        // log(1 + exp(e)) without overflow
        const double softplus = e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
        total += softplus - y[i] * e;
    }
    return total / static_cast<double>(eta.size());
}

namespace {

Vector expit_vec(const Vector& eta)
{
    Vector p(eta.size());
    for (Index i = 0; i < eta.size(); ++i) {
        const double e = eta[i];
        p[i] = e >= 0.0 ? 1.0 / (1.0 + std::exp(-e)) : std::exp(e) / (1.0 + std::exp(e));
    }
    return p;
}

} // namespace

double logistic_kkt_residual(const Matrix& x, const Vector& y, double intercept, const Vector& beta,
                             double lambda)
{
    const Vector eta = (x * beta).array() + intercept;
    const Vector resid = y - expit_vec(eta);
    const double n = static_cast<double>(x.rows());
    const Vector grad = (x.transpose() * resid) / n;
    return std::max(kkt_from_gradient(grad, beta, lambda), std::abs(resid.sum() / n));
}

FitResult logistic_lasso_fit(const Matrix& x, const Vector& y, double lambda, const LogisticOptions& opts,
                             const FitResult* warm_start)
{
    const Index n = x.rows();
    const Index p = x.cols();
    require(n >= 2 && y.size() == n, ErrorKind::domain, "logistic_lasso_fit: inconsistent dimensions");
    require(std::isfinite(lambda) && lambda >= 0.0, ErrorKind::domain, "logistic_lasso_fit: lambda must be nonnegative");
    const double ybar = y.mean();
    require(ybar > 0.0 && ybar < 1.0, ErrorKind::domain, "logistic_lasso_fit: y must contain both classes");

    double b0 = std::log(ybar / (1.0 - ybar));
    Vector beta = Vector::Zero(p);
    if (warm_start) {
        require(warm_start->beta_hat.size() == p, ErrorKind::domain, "logistic_lasso_fit: warm start length differs from p");
        b0 = warm_start->intercept;
        beta = warm_start->beta_hat;
    }
    auto penalized = [&](double a, const Vector& b) { return logistic_nll(x, y, a, b) + lambda * b.lpNorm<1>(); };

    const SolverOptions inner{opts.tol * 0.1, opts.max_sweeps};
    FitResult fit;
    double obj = penalized(b0, beta);
    fit.objective_trace.push_back(obj);
    bool separated = false;
    bool converged = false;
    int outer = 0;
    for (outer = 1; outer <= opts.max_outer; ++outer) {
        const Vector eta = (x * beta).array() + b0;
        const Vector prob = expit_vec(eta);
        Vector w(n), z(n);
        for (Index i = 0; i < n; ++i) {
            w[i] = std::max(prob[i] * (1.0 - prob[i]), opts.weight_floor);
            z[i] = eta[i] + (y[i] - prob[i]) / w[i];
        }
        // Weighted quadratic model: (1/2n) sum w (z - a - x b)^2 + lambda |b|_1.
        // Profiling out a and scaling rows by sqrt(w) gives a plain lasso with penalty 2 lambda.
        const double wsum = w.sum();
        const Vector xbar = (x.transpose() * w) / wsum;
        const double zbar = w.dot(z) / wsum;
        const Vector sw = w.cwiseSqrt();
        const Matrix xs = sw.asDiagonal() * (x.rowwise() - xbar.transpose());
        const Vector zs = sw.cwiseProduct(z.array().matrix() - Vector::Constant(n, zbar));
        const double inv_n = 1.0 / static_cast<double>(n);
        const Matrix gram = (xs.transpose() * xs) * inv_n;
        const Vector xty = (xs.transpose() * zs) * inv_n;
        CdOutcome cd = cd_core(gram, xty, zs.squaredNorm() * inv_n, 2.0 * lambda, inner, beta);
        Vector cand = std::move(cd.beta);
        double cand_b0 = zbar - xbar.dot(cand);

        // Step halving keeps the penalized objective from increasing.
        double cand_obj = penalized(cand_b0, cand);
        double step = 1.0;
        while (!(cand_obj <= obj) && step > 1e-10) {
            step *= 0.5;
            cand = beta + step * (cand - beta);
            cand_b0 = b0 + step * (cand_b0 - b0);
            cand_obj = penalized(cand_b0, cand);
        }
        if (!(cand_obj <= obj)) {
            cand = beta;
            cand_b0 = b0;
            cand_obj = obj;
        }
        const double change = std::max((cand - beta).cwiseAbs().maxCoeff(), std::abs(cand_b0 - b0));
        beta = std::move(cand);
        b0 = cand_b0;
        obj = cand_obj;
        fit.objective_trace.push_back(obj);

        if (beta.cwiseAbs().maxCoeff() > opts.coef_cap || std::abs(b0) > opts.coef_cap) {
            separated = true;
            break;
        }
        if (change <= opts.tol) {
            converged = true;
            break;
        }
    }

    fit.beta_hat = std::move(beta);
    fit.intercept = b0;
    fit.lambda = lambda;
    fit.support = FitResult::support_of(fit.beta_hat);
    fit.kkt_residual = logistic_kkt_residual(x, y, b0, fit.beta_hat, lambda);
    fit.objective = obj;
    fit.n_iterations = std::min(outer, opts.max_outer);
    // The inner solves stop at a relative tolerance; a loose certificate guards
    // against reporting a stalled fit as converged.
    fit.converged = converged && !separated && fit.kkt_residual <= std::max(1e-4, 100.0 * opts.tol);
    return fit;
}

} // namespace ulasso
