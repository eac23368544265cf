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
#include "ulasso/solver.hpp"

namespace ulasso {

struct GridParams
{
    int n_points = 100;
    double ratio = 1e-4;
};

/// Log-spaced, strictly descending, from lambda_max(design) down to ratio * lambda_max.
std::vector<double> lambda_grid(const CenteredDesign& design, int n_points, double ratio);

/// Log-spaced descending grid from an explicit top value.
std::vector<double> log_grid(double top, int n_points, double ratio);

/// Squared loss plus (ln n / n) times the support size.
double bic_score(const CenteredDesign& design, const FitResult& fit, Index n);

/// Index of the smallest score; ties go to the earliest (largest lambda) entry.
std::size_t select_min(const std::vector<double>& scores);

struct TuningTrace
{
    std::vector<double> lambdas;
    std::vector<double> bic_values;
    std::size_t selected_index = 0;
    std::vector<FitResult> fits;
};

struct UlassoOptions
{
    GridParams grid;
    SolverOptions solver;
    /// Rescale subset columns to unit variance before fitting and map the
    /// coefficients back to the original scale.
    bool standardize = false;
};

struct UlassoFit
{
    FitResult fit;
    TuningTrace trace;
    ExtremeSubset subset;
};

/// Extreme subset at level q, then the BIC-selected point of a warm-started lasso path.
UlassoFit fit_ulasso(const Dataset& ds, double q, const UlassoOptions& opts = {});

/// Same procedure on an already extracted subset.
UlassoFit fit_ulasso(ExtremeSubset subset, const UlassoOptions& opts = {});

struct LogisticPathOptions
{
    GridParams grid;
    LogisticOptions solver;
};

struct SlassoFit
{
    FitResult fit;
    TuningTrace trace;
};

/// Supervised L1 logistic regression tuned by 2 NLL + (ln n / n) df.
SlassoFit fit_slasso(const Matrix& x, const Vector& y, const LogisticPathOptions& opts = {});

} // namespace ulasso
