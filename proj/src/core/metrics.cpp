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

#include "ulasso/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>

namespace ulasso {

namespace {

void orient_first_nonzero(Vector& u)
{
    for (Index j = 0; j < u.size(); ++j) {
        if (u[j] != 0.0) {
            if (u[j] < 0.0) u = -u;
            return;
        }
    }
}

} // namespace

Direction normalize_direction(const Vector& v, const Matrix& sigma, const std::optional<Vector>& ref,
                              Orientation kind)
{
    require(v.allFinite(), ErrorKind::domain, "normalize_direction: non-finite vector");
    if (v.cwiseAbs().maxCoeff() == 0.0) return Direction::degenerate(v.size());
    Vector u = v / v.stableNorm();
    if (!ref) return Direction(std::move(u), Orientation::none);

    require(ref->size() == v.size() && sigma.rows() == v.size() && sigma.cols() == v.size(), ErrorKind::domain,
            "normalize_direction: dimension mismatch");
    const double c = ref->dot(sigma * u);
    if (c < 0.0)
        u = -u;
    else if (c == 0.0)
        orient_first_nonzero(u);
    return Direction(std::move(u), kind);
}

double mse_direction(const Direction& est, const Direction& truth)
{
    require(est.p() == truth.p(), ErrorKind::domain, "mse_direction: dimension mismatch");
    return std::min(4.0, (est.v() - truth.v()).squaredNorm());
}

double relative_efficiency(double mse_ulasso, double mse_other)
{
    require(mse_ulasso >= 0.0 && mse_other >= 0.0, ErrorKind::domain, "relative_efficiency: negative error");
    if (mse_ulasso == 0.0) return std::numeric_limits<double>::infinity();
    return mse_other / mse_ulasso;
}

double auc(const Vector& scores, const Vector& labels)
{
    const Index n = scores.size();
    require(labels.size() == n, ErrorKind::domain, "auc: length mismatch");
    require(scores.allFinite(), ErrorKind::domain, "auc: non-finite scores");
    std::int64_t n_pos = 0;
    for (Index i = 0; i < n; ++i) {
        require(labels[i] == 0.0 || labels[i] == 1.0, ErrorKind::domain, "auc: labels must be 0 or 1");
        n_pos += labels[i] == 1.0 ? 1 : 0;
    }
    const std::int64_t n_neg = n - n_pos;
    require(n_pos > 0 && n_neg > 0, ErrorKind::domain, "auc: both classes must be present");

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] < scores[b]; });

    // Twice the midrank of a tie group occupying ranks first+1..last is first+1+last.
    std::int64_t doubled_rank_sum = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const auto doubled = static_cast<std::int64_t>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]] == 1.0) doubled_rank_sum += doubled;
        i = j + 1;
    }
    const std::int64_t doubled_u = doubled_rank_sum - n_pos * (n_pos + 1);
    return static_cast<double>(doubled_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

Rates tpr_fpr(const std::vector<Index>& support_est, const std::vector<Index>& support_true, Index p)
{
    const std::set<Index> truth(support_true.begin(), support_true.end());
    const std::set<Index> est(support_est.begin(), support_est.end());
    require(!truth.empty() && static_cast<Index>(truth.size()) < p, ErrorKind::domain,
            "tpr_fpr: true support must be nonempty and not full");
    for (Index j : truth) require(j >= 0 && j < p, ErrorKind::domain, "tpr_fpr: index out of range");
    Index tp = 0, fp = 0;
    for (Index j : est) {
        require(j >= 0 && j < p, ErrorKind::domain, "tpr_fpr: index out of range");
        if (truth.count(j)) ++tp; else ++fp;
    }
    const auto n_true = static_cast<double>(truth.size());
    return {static_cast<double>(tp) / n_true, static_cast<double>(fp) / (static_cast<double>(p) - n_true)};
}

Direction combine_directions(const std::vector<Direction>& dirs)
{
    require(!dirs.empty(), ErrorKind::domain, "combine_directions: empty list");
    const Index p = dirs.front().p();
    Vector mean = Vector::Zero(p);
    for (const Direction& d : dirs) {
        require(d.p() == p, ErrorKind::domain, "combine_directions: dimension mismatch");
        mean += d.v();
    }
    mean /= static_cast<double>(dirs.size());
    if (mean.cwiseAbs().maxCoeff() == 0.0) return Direction::degenerate(p);
    return Direction(mean / mean.stableNorm(), dirs.front().orientation());
}

} // namespace ulasso
