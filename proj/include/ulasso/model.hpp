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

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ulasso/error.hpp"

namespace ulasso {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class OutcomeNoise { logistic_unit };

/// Ground-truth population parameters: X ~ Normal(0, sigma), S = alpha0'X + e*,
/// Y = 1(beta0'X + e > 0).
class DesignSpec
{
public:
    DesignSpec(Matrix sigma, Vector beta0, Vector alpha0, double surrogate_noise_sd,
               OutcomeNoise outcome_noise = OutcomeNoise::logistic_unit);

    Index p() const noexcept { return beta0_.size(); }
    const Matrix& sigma() const noexcept { return sigma_; }
    const Vector& beta0() const noexcept { return beta0_; }
    const Vector& alpha0() const noexcept { return alpha0_; }
    double surrogate_noise_sd() const noexcept { return noise_sd_; }
    OutcomeNoise outcome_noise() const noexcept { return outcome_noise_; }

private:
    Matrix sigma_;
    Vector beta0_;
    Vector alpha0_;
    double noise_sd_;
    OutcomeNoise outcome_noise_;
};

/// N observations of (S, X) with optional binary labels Y.
class Dataset
{
public:
    Dataset(Matrix x, Vector s, std::optional<Vector> y = std::nullopt);

    Index n_rows() const noexcept { return x_.rows(); }
    Index p() const noexcept { return x_.cols(); }
    const Matrix& x() const noexcept { return x_; }
    const Vector& s() const noexcept { return s_; }
    const std::optional<Vector>& y() const noexcept { return y_; }
    bool labeled() const noexcept { return y_.has_value(); }

private:
    Matrix x_;
    Vector s_;
    std::optional<Vector> y_;
};

/// The 2k most extreme observations of S: the k smallest carry y_star = 0 and
/// the k largest carry y_star = 1. Rows are stored lower tail first.
class ExtremeSubset
{
public:
    ExtremeSubset(double q, Index parent_rows, double delta_lo, double delta_hi,
                  Matrix x_sub, Vector s_sub, Vector y_star,
                  std::optional<Vector> y_true, std::vector<Index> source_indices);

    double q() const noexcept { return q_; }
    Index parent_rows() const noexcept { return parent_rows_; }
    double delta_lo() const noexcept { return delta_lo_; }
    double delta_hi() const noexcept { return delta_hi_; }
    Index n_q() const noexcept { return x_.rows(); }
    const Matrix& x() const noexcept { return x_; }
    const Vector& s() const noexcept { return s_; }
    const Vector& y_star() const noexcept { return y_star_; }
    const std::optional<Vector>& y_true() const noexcept { return y_true_; }
    const std::vector<Index>& source_indices() const noexcept { return source_; }

private:
    double q_;
    Index parent_rows_;
    double delta_lo_;
    double delta_hi_;
    Matrix x_;
    Vector s_;
    Vector y_star_;
    std::optional<Vector> y_true_;
    std::vector<Index> source_;
};

/// A penalized solution and its diagnostics.
struct FitResult
{
    Vector beta_hat;
    double intercept = 0.0;
    double lambda = 0.0;
    std::vector<Index> support;
    double kkt_residual = 0.0;
    double objective = 0.0;
    int n_iterations = 0;
    bool converged = false;
    /// Penalized objective after each sweep (U_LASSO) or outer step (logistic).
    std::vector<double> objective_trace;

    static std::vector<Index> support_of(const Vector& beta);
};

enum class Orientation { true_beta, surrogate_alpha, none };

/// Unit-norm direction, or the explicitly flagged all-zero direction.
class Direction
{
public:
    Direction(Vector v, Orientation orientation);

    static Direction degenerate(Index p);

    const Vector& v() const noexcept { return v_; }
    Orientation orientation() const noexcept { return orientation_; }
    bool is_degenerate() const noexcept { return degenerate_; }
    Index p() const noexcept { return v_.size(); }

private:
    Direction() = default;

    Vector v_;
    Orientation orientation_ = Orientation::none;
    bool degenerate_ = false;
};

} // namespace ulasso
