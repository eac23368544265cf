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

#include "ulasso/model.hpp"

namespace ulasso {

struct TailThresholds
{
    double delta_lo;
    double delta_hi;
    Index k;  ///< observations per tail
};

/// k = ceil(N q / 2); delta_lo is the k-th smallest and delta_hi the k-th largest S.
TailThresholds tail_thresholds(const Vector& s, double q);

/// Per-tail count for N rows at level q.
Index tail_count(Index n_rows, double q);

/// The k lowest rows (label 0) followed by the k highest rows (label 1).
/// Ties at a threshold go to the lower row index.
ExtremeSubset extract_extreme_subset(const Dataset& ds, double q);

/// Fraction of subset rows whose true label differs from the surrogate label.
double estimate_pi_q(const ExtremeSubset& subset);

} // namespace ulasso
