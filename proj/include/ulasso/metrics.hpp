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

#include <optional>
#include <vector>

#include "ulasso/model.hpp"

namespace ulasso {

/// Scales v to unit length. With a reference, the sign makes ref' sigma v >= 0;
/// an exact zero keeps the first nonzero coordinate positive. The zero vector
/// yields the degenerate direction.
Direction normalize_direction(const Vector& v, const Matrix& sigma, const std::optional<Vector>& ref,
                              Orientation kind = Orientation::true_beta);

/// Squared Euclidean distance, in [0, 4]. A degenerate estimate scores |truth|^2.
double mse_direction(const Direction& est, const Direction& truth);

/// mse_other / mse_ulasso; values above 1 favour the U_LASSO estimate.
/// A zero U_LASSO error gives +infinity.
double relative_efficiency(double mse_ulasso, double mse_other);

/// Mann-Whitney estimate of P(score+ > score-) + P(score+ = score-) / 2.
double auc(const Vector& scores, const Vector& labels);

struct Rates
{
    double tpr;
    double fpr;
};

Rates tpr_fpr(const std::vector<Index>& support_est, const std::vector<Index>& support_true, Index p);

/// Renormalized coordinate-wise mean; degenerate when the mean vanishes.
Direction combine_directions(const std::vector<Direction>& dirs);

} // namespace ulasso
