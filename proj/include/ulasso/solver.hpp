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

#include <vector>

#include "ulasso/model.hpp"

namespace ulasso {

/// Column-centered design and response, with the second-moment summaries
/// used by covariance-update coordinate descent.
struct CenteredDesign
{
    Matrix x_tilde;
    Vector y_tilde;
    Vector col_means;
    double y_mean = 0.0;
    Vector col_sq_norms;  ///< (1/n) sum of squared centered entries, per column
    Matrix gram;          ///< X~'X~ / n
    Vector xty;           ///< X~'y~ / n
    double yty = 0.0;     ///< y~'y~ / n

    Index n() const noexcept { return x_tilde.rows(); }
    Index p() const noexcept { return x_tilde.cols(); }
};

/// Centers an arbitrary (X, y) pair. Constant columns become exactly zero.
CenteredDesign center(const Matrix& x, const Vector& y);

/// Centers the subset design and the surrogate labels.
CenteredDesign center(const ExtremeSubset& subset);

/// (1/n) X~'(y~ - X~ beta). The smooth part of the objective has gradient -2 times this.
Vector gradient_t(const CenteredDesign& design, const Vector& beta);

/// (1/n) sum (y~ - X~ beta)^2, evaluated from residuals.
double squared_loss(const CenteredDesign& design, const Vector& beta);

/// Largest subgradient-optimality violation of beta at penalty lambda.
double kkt_residual(const CenteredDesign& design, const Vector& beta, double lambda);

/// Smallest lambda at which the zero vector solves the problem.
double lambda_max(const CenteredDesign& design);

struct SolverOptions
{
    double tol = 1e-7;
    int max_sweeps = 10000;
};

/// Minimizes (1/n)||y~ - X~ beta||^2 + lambda ||beta||_1 by cyclic coordinate descent.
/// A fit is declared converged once a sweep moves no coordinate by more than tol
/// and the KKT residual is at most 10 tol.
FitResult lasso_fit(const CenteredDesign& design, double lambda, const SolverOptions& opts = {},
                    const Vector* warm_start = nullptr);

/// Warm-started fits along a strictly descending grid.
std::vector<FitResult> lasso_path(const CenteredDesign& design, const std::vector<double>& lambdas,
                                  const SolverOptions& opts = {});

struct LogisticOptions
{
    double tol = 1e-7;       ///< outer tolerance on the max parameter change
    int max_outer = 100;
    int max_sweeps = 10000;  ///< per inner weighted least-squares problem
    double weight_floor = 1e-5;
    double coef_cap = 1e4;   ///< larger coefficients are taken as a sign of separation
};

/// Minimizes (1/n) negative log-likelihood + lambda ||beta||_1 with an
/// unpenalized intercept, by iteratively reweighted least squares.
FitResult logistic_lasso_fit(const Matrix& x, const Vector& y, double lambda,
                             const LogisticOptions& opts = {}, const FitResult* warm_start = nullptr);

/// (1/n) negative log-likelihood of (intercept, beta).
double logistic_nll(const Matrix& x, const Vector& y, double intercept, const Vector& beta);

/// KKT residual of a logistic fit, including the intercept's stationarity.
double logistic_kkt_residual(const Matrix& x, const Vector& y, double intercept,
                             const Vector& beta, double lambda);

} // namespace ulasso
