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

#include "ulasso/tuning.hpp"

#include <cmath>

#include "ulasso/extremes.hpp"

namespace ulasso {

std::vector<double> log_grid(double top, int n_points, double ratio)
{
    require(n_points >= 2, ErrorKind::domain, "lambda grid: need at least two points");
    require(ratio > 0.0 && ratio < 1.0, ErrorKind::domain, "lambda grid: ratio must lie in (0, 1)");
    require(std::isfinite(top) && top > 0.0, ErrorKind::degenerate_design,
            "lambda grid: response is uncorrelated with every column");
    std::vector<double> out(static_cast<std::size_t>(n_points));
    const double step = std::log(ratio) / (n_points - 1);
    out.front() = top;
    for (int i = 1; i < n_points - 1; ++i) out[static_cast<std::size_t>(i)] = top * std::exp(step * i);
    out.back() = top * ratio;
    return out;
}

std::vector<double> lambda_grid(const CenteredDesign& design, int n_points, double ratio)
{
    return log_grid(lambda_max(design), n_points, ratio);
}

double bic_score(const CenteredDesign& design, const FitResult& fit, Index n)
{
    require(n >= 2, ErrorKind::domain, "bic_score: need n >= 2");
    const double nd = static_cast<double>(n);
    return squared_loss(design, fit.beta_hat) + std::log(nd) / nd * static_cast<double>(fit.support.size());
}

std::size_t select_min(const std::vector<double>& scores)
{
    require(!scores.empty(), ErrorKind::domain, "select_min: no scores");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] < scores[best]) best = i;
    return best;
}

UlassoFit fit_ulasso(const Dataset& ds, double q, const UlassoOptions& opts)
{
    return fit_ulasso(extract_extreme_subset(ds, q), opts);
}

UlassoFit fit_ulasso(ExtremeSubset subset, const UlassoOptions& opts)
{
    Vector scale = Vector::Ones(subset.x().cols());
    CenteredDesign design;
    if (opts.standardize) {
        design = center(subset);
        for (Index j = 0; j < scale.size(); ++j) {
            const double sd = std::sqrt(design.col_sq_norms[j]);
            if (sd > 0.0) scale[j] = sd;
        }
        design = center(subset.x() * scale.cwiseInverse().asDiagonal(), subset.y_star());
    } else {
        design = center(subset);
    }

    TuningTrace trace;
    trace.lambdas = lambda_grid(design, opts.grid.n_points, opts.grid.ratio);
    trace.fits = lasso_path(design, trace.lambdas, opts.solver);
    trace.bic_values.reserve(trace.fits.size());
    for (const FitResult& f : trace.fits) trace.bic_values.push_back(bic_score(design, f, design.n()));
    trace.selected_index = select_min(trace.bic_values);

    FitResult fit = trace.fits[trace.selected_index];
    if (opts.standardize) {
        fit.beta_hat = fit.beta_hat.cwiseQuotient(scale);
        fit.intercept = subset.y_star().mean() - subset.x().colwise().mean().dot(fit.beta_hat);
    }
    return UlassoFit{std::move(fit), std::move(trace), std::move(subset)};
}

SlassoFit fit_slasso(const Matrix& x, const Vector& y, const LogisticPathOptions& opts)
{
    const Index n = x.rows();
    require(n >= 2 && y.size() == n, ErrorKind::domain, "fit_slasso: inconsistent dimensions");
    const double ybar = y.mean();
    require(ybar > 0.0 && ybar < 1.0, ErrorKind::domain, "fit_slasso: labels must contain both classes");
    const double nd = static_cast<double>(n);
    const double top = ((x.transpose() * (y.array() - ybar).matrix()) / nd).cwiseAbs().maxCoeff();

    SlassoFit out;
    out.trace.lambdas = log_grid(top, opts.grid.n_points, opts.grid.ratio);
    for (double lam : out.trace.lambdas) {
        const FitResult* warm = out.trace.fits.empty() ? nullptr : &out.trace.fits.back();
        FitResult f = logistic_lasso_fit(x, y, lam, opts.solver, warm);
        const double nll = logistic_nll(x, y, f.intercept, f.beta_hat);
        out.trace.bic_values.push_back(2.0 * nll + std::log(nd) / nd * static_cast<double>(f.support.size()));
        out.trace.fits.push_back(std::move(f));
    }
    out.trace.selected_index = select_min(out.trace.bic_values);
    out.fit = out.trace.fits[out.trace.selected_index];
    return out;
}

} // namespace ulasso
