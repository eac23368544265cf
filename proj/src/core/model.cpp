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

#include "ulasso/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ulasso {

namespace {

bool all_finite(const Eigen::Ref<const Matrix>& m)
{
    return m.allFinite();
}

bool is_binary(const Vector& v)
{
    return std::all_of(v.data(), v.data() + v.size(),
                       [](double e) { return e == 0.0 || e == 1.0; });
}

} // namespace

DesignSpec::DesignSpec(Matrix sigma, Vector beta0, Vector alpha0, double surrogate_noise_sd,
                       OutcomeNoise outcome_noise)
    : sigma_(std::move(sigma)),
      beta0_(std::move(beta0)),
      alpha0_(std::move(alpha0)),
      noise_sd_(surrogate_noise_sd),
      outcome_noise_(outcome_noise)
{
    const Index p = beta0_.size();
    require(p >= 1, ErrorKind::domain, "design: p must be positive");
    require(alpha0_.size() == p, ErrorKind::domain, "design: alpha0 length differs from beta0");
    require(sigma_.rows() == p && sigma_.cols() == p, ErrorKind::domain,
            "design: covariance must be p x p");
    require(all_finite(sigma_) && beta0_.allFinite() && alpha0_.allFinite(), ErrorKind::domain,
            "design: non-finite entries");
    require((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() <= 1e-12, ErrorKind::domain,
            "design: covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma_, Eigen::EigenvaluesOnly);
    require(eig.eigenvalues().minCoeff() > 0.0, ErrorKind::domain,
            "design: covariance is not positive definite");
    require(alpha0_.cwiseAbs().maxCoeff() > 0.0, ErrorKind::domain,
            "design: alpha0 must not be the zero vector");
    require(std::isfinite(noise_sd_) && noise_sd_ >= 0.0, ErrorKind::domain,
            "design: surrogate noise sd must be finite and nonnegative");
}

Dataset::Dataset(Matrix x, Vector s, std::optional<Vector> y)
    : x_(std::move(x)), s_(std::move(s)), y_(std::move(y))
{
    require(x_.rows() >= 1, ErrorKind::domain, "dataset: at least one row required");
    require(s_.size() == x_.rows(), ErrorKind::domain, "dataset: S length differs from X rows");
    require(all_finite(x_) && s_.allFinite(), ErrorKind::domain, "dataset: non-finite entries");
    if (y_) {
        require(y_->size() == x_.rows(), ErrorKind::domain, "dataset: Y length differs from X rows");
        require(is_binary(*y_), ErrorKind::domain, "dataset: Y entries must be 0 or 1");
    }
}

ExtremeSubset::ExtremeSubset(double q, Index parent_rows, double delta_lo, double delta_hi,
                             Matrix x_sub, Vector s_sub, Vector y_star,
                             std::optional<Vector> y_true, std::vector<Index> source_indices)
    : q_(q),
      parent_rows_(parent_rows),
      delta_lo_(delta_lo),
      delta_hi_(delta_hi),
      x_(std::move(x_sub)),
      s_(std::move(s_sub)),
      y_star_(std::move(y_star)),
      y_true_(std::move(y_true)),
      source_(std::move(source_indices))
{
    const Index n = x_.rows();
    require(q_ > 0.0 && q_ <= 1.0, ErrorKind::domain, "subset: q must lie in (0, 1]");
    require(n >= 2 && n % 2 == 0, ErrorKind::domain, "subset: n_q must be a positive even integer");
    require(s_.size() == n && y_star_.size() == n && static_cast<Index>(source_.size()) == n,
            ErrorKind::domain, "subset: inconsistent lengths");
    require(delta_lo_ < delta_hi_, ErrorKind::degenerate_tails, "subset: delta_lo must be below delta_hi");
    require(n <= parent_rows_, ErrorKind::domain, "subset: larger than its parent dataset");

    Index ones = 0;
    for (Index i = 0; i < n; ++i) {
        const bool lo = s_[i] <= delta_lo_;
        const bool hi = s_[i] >= delta_hi_;
        require(lo != hi, ErrorKind::domain, "subset: observation outside the extreme tails");
        require(y_star_[i] == (hi ? 1.0 : 0.0), ErrorKind::domain,
                "subset: surrogate label does not match the upper-tail indicator");
        ones += hi ? 1 : 0;
    }
    require(2 * ones == n, ErrorKind::domain, "subset: tails must have equal counts");

    // n_q = 2 * ceil(N q / 2), with a small guard against representation error in N q.
    const auto k = static_cast<Index>(std::ceil(static_cast<double>(parent_rows_) * q_ / 2.0 - 1e-9));
    require(n == 2 * k, ErrorKind::domain, "subset: n_q must equal 2 ceil(N q / 2)");

    std::set<Index> distinct(source_.begin(), source_.end());
    require(static_cast<Index>(distinct.size()) == n, ErrorKind::domain,
            "subset: source indices must be distinct");
    require(*distinct.begin() >= 0 && *distinct.rbegin() < parent_rows_, ErrorKind::domain,
            "subset: source index out of range");
    if (y_true_) {
        require(y_true_->size() == n && is_binary(*y_true_), ErrorKind::domain,
                "subset: invalid true labels");
    }
}

std::vector<Index> FitResult::support_of(const Vector& beta)
{
    std::vector<Index> out;
    for (Index j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) out.push_back(j);
    return out;
}

Direction::Direction(Vector v, Orientation orientation)
    : v_(std::move(v)), orientation_(orientation)
{
    require(v_.size() >= 1 && v_.allFinite(), ErrorKind::domain, "direction: invalid vector");
    if (v_.cwiseAbs().maxCoeff() == 0.0) {
        degenerate_ = true;
        return;
    }
    require(std::abs(v_.norm() - 1.0) <= 1e-12, ErrorKind::domain,
            "direction: vector must have unit length");
}

Direction Direction::degenerate(Index p)
{
    Direction d;
    d.v_ = Vector::Zero(p);
    d.orientation_ = Orientation::none;
    d.degenerate_ = true;
    return d;
}

} // namespace ulasso
