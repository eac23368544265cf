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

#include "ulasso/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ulasso {

namespace {

struct TailIndices
{
    std::vector<Index> lower;  // ascending S, ties by row index
    std::vector<Index> upper;  // descending S, ties by row index
};

TailIndices select_tails(const Vector& s, Index k)
{
    const Index n = s.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});

    TailIndices out;
    out.lower = order;
    std::partial_sort(out.lower.begin(), out.lower.begin() + k, out.lower.end(),
                      [&](Index a, Index b) { return s[a] < s[b] || (s[a] == s[b] && a < b); });
    out.lower.resize(static_cast<std::size_t>(k));

    out.upper = std::move(order);
    std::partial_sort(out.upper.begin(), out.upper.begin() + k, out.upper.end(),
                      [&](Index a, Index b) { return s[a] > s[b] || (s[a] == s[b] && a < b); });
    out.upper.resize(static_cast<std::size_t>(k));
    return out;
}

} // namespace

Index tail_count(Index n_rows, double q)
{
    require(q > 0.0 && q <= 1.0, ErrorKind::domain, "tail_count: q must lie in (0, 1]");
    // The 1e-9 guard keeps e.g. 100000 * 0.02 / 2 from rounding up to 1001.
    const auto k = static_cast<Index>(std::ceil(static_cast<double>(n_rows) * q / 2.0 - 1e-9));
    require(k >= 1, ErrorKind::domain, "tail_count: N q is too small to form a tail");
    return k;
}

TailThresholds tail_thresholds(const Vector& s, double q)
{
    require(q > 0.0 && q <= 1.0, ErrorKind::domain, "tail_thresholds: q must lie in (0, 1]");
    const Index n = s.size();
    require(n >= 2, ErrorKind::domain, "tail_thresholds: need at least two observations");
    require(s.allFinite(), ErrorKind::domain, "tail_thresholds: non-finite surrogate values");
    const Index k = tail_count(n, q);
    require(2 * k <= n, ErrorKind::domain, "tail_thresholds: 2 ceil(N q / 2) exceeds N");

    std::vector<double> v(s.data(), s.data() + n);
    std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
    const double lo = v[static_cast<std::size_t>(k - 1)];
    std::nth_element(v.begin(), v.begin() + (n - k), v.end());
    const double hi = v[static_cast<std::size_t>(n - k)];
    if (!(lo < hi))
        fail(ErrorKind::degenerate_tails, "tail_thresholds: lower and upper thresholds coincide");
    return {lo, hi, k};
}

ExtremeSubset extract_extreme_subset(const Dataset& ds, double q)
{
    const TailThresholds t = tail_thresholds(ds.s(), q);
    TailIndices tails = select_tails(ds.s(), t.k);
    std::sort(tails.lower.begin(), tails.lower.end());
    std::sort(tails.upper.begin(), tails.upper.end());

    const Index n = 2 * t.k;
    const Index p = ds.p();
    Matrix x(n, p);
    Vector s(n), y_star(n);
    std::optional<Vector> y_true;
    if (ds.labeled()) y_true = Vector(n);
    std::vector<Index> src;
    src.reserve(static_cast<std::size_t>(n));

    Index row = 0;
    auto push = [&](Index i, double label) {
        x.row(row) = ds.x().row(i);
        s[row] = ds.s()[i];
        y_star[row] = label;
        if (y_true) (*y_true)[row] = (*ds.y())[i];
        src.push_back(i);
        ++row;
    };
    for (Index i : tails.lower) push(i, 0.0);
    for (Index i : tails.upper) push(i, 1.0);

    return ExtremeSubset(q, ds.n_rows(), t.delta_lo, t.delta_hi, std::move(x), std::move(s),
                         std::move(y_star), std::move(y_true), std::move(src));
}

double estimate_pi_q(const ExtremeSubset& subset)
{
    require(subset.y_true().has_value(), ErrorKind::precondition,
            "estimate_pi_q: subset carries no true labels");
    const Vector& y = *subset.y_true();
    Index wrong = 0;
    for (Index i = 0; i < y.size(); ++i) wrong += (y[i] != subset.y_star()[i]) ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(y.size());
}

} // namespace ulasso
