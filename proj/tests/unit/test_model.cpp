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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ulasso/model.hpp"

using namespace ulasso;

namespace {

DesignSpec valid_design()
{
    return DesignSpec(Matrix::Identity(2, 2), Vector::Ones(2), Vector::Ones(2), 1.0);
}

bool throws_kind(ErrorKind kind, auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

/// s = (1, 2, 99, 100) drawn from a 100-row parent at q = 0.04.
ExtremeSubset small_subset(Vector s, Vector y_star, std::vector<Index> src, double lo = 2, double hi = 99)
{
    const Index n = s.size();
    return ExtremeSubset(0.04, 100, lo, hi, Matrix::Zero(n, 1), std::move(s), std::move(y_star),
                         std::nullopt, std::move(src));
}

} // namespace

TEST(DesignSpec, AcceptsValidFields)
{
    const DesignSpec d = valid_design();
    EXPECT_EQ(d.p(), 2);
    EXPECT_EQ(d.surrogate_noise_sd(), 1.0);
}

TEST(DesignSpec, RejectsAsymmetricCovariance)
{
    Matrix s = Matrix::Identity(2, 2);
    s(0, 1) = 0.1;
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] { DesignSpec(s, Vector::Ones(2), Vector::Ones(2), 1.0); }));
}

TEST(DesignSpec, RejectsIndefiniteCovariance)
{
    Matrix s(2, 2);
    s << 1, 2, 2, 1;
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] { DesignSpec(s, Vector::Ones(2), Vector::Ones(2), 1.0); }));
}

TEST(DesignSpec, RejectsWrongLengths)
{
    EXPECT_TRUE(throws_kind(ErrorKind::domain,
                            [&] { DesignSpec(Matrix::Identity(2, 2), Vector::Ones(3), Vector::Ones(3), 1.0); }));
    EXPECT_TRUE(throws_kind(ErrorKind::domain,
                            [&] { DesignSpec(Matrix::Identity(2, 2), Vector::Ones(2), Vector::Ones(3), 1.0); }));
}

TEST(DesignSpec, RejectsNonFiniteCoefficients)
{
    Vector b = Vector::Ones(2);
    b[1] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] { DesignSpec(Matrix::Identity(2, 2), b, Vector::Ones(2), 1.0); }));
}

TEST(DesignSpec, RejectsZeroSurrogateDirection)
{
    EXPECT_TRUE(throws_kind(ErrorKind::domain,
                            [&] { DesignSpec(Matrix::Identity(2, 2), Vector::Ones(2), Vector::Zero(2), 1.0); }));
}

TEST(DesignSpec, RejectsNegativeNoise)
{
    EXPECT_TRUE(throws_kind(ErrorKind::domain,
                            [&] { DesignSpec(Matrix::Identity(2, 2), Vector::Ones(2), Vector::Ones(2), -0.1); }));
}

TEST(Dataset, AcceptsLabeledAndUnlabeled)
{
    const Dataset a(Matrix::Zero(3, 2), Vector::Zero(3));
    EXPECT_FALSE(a.labeled());
    const Dataset b(Matrix::Zero(3, 2), Vector::Zero(3), Vector::Ones(3));
    EXPECT_TRUE(b.labeled());
    EXPECT_EQ(b.n_rows(), 3);
    EXPECT_EQ(b.p(), 2);
}

TEST(Dataset, RejectsNonFiniteEntries)
{
    Matrix x = Matrix::Zero(3, 2);
    x(1, 1) = std::numeric_limits<double>::infinity();
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] { Dataset(x, Vector::Zero(3)); }));
    Vector s = Vector::Zero(3);
    s[0] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] { Dataset(Matrix::Zero(3, 2), s); }));
}

TEST(Dataset, RejectsNonBinaryLabels)
{
    Vector y(3);
    y << 0, 1, 2;
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] { Dataset(Matrix::Zero(3, 2), Vector::Zero(3), y); }));
}

TEST(Dataset, RejectsLengthMismatch)
{
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] { Dataset(Matrix::Zero(3, 2), Vector::Zero(2)); }));
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] { Dataset(Matrix::Zero(3, 2), Vector::Zero(3), Vector::Zero(2)); }));
}

TEST(ExtremeSubset, AcceptsValidSubset)
{
    const ExtremeSubset s = small_subset(Vector{{1, 2, 99, 100}}, Vector{{0, 0, 1, 1}}, {0, 1, 98, 99});
    EXPECT_EQ(s.n_q(), 4);
    EXPECT_DOUBLE_EQ(s.y_star().mean(), 0.5);
}

TEST(ExtremeSubset, RejectsObservationBetweenThresholds)
{
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] {
        small_subset(Vector{{1, 50, 99, 100}}, Vector{{0, 0, 1, 1}}, {0, 49, 98, 99});
    }));
}

TEST(ExtremeSubset, RejectsLabelNotMatchingTail)
{
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] {
        small_subset(Vector{{1, 2, 99, 100}}, Vector{{0, 1, 0, 1}}, {0, 1, 98, 99});
    }));
}

TEST(ExtremeSubset, RejectsUnequalTails)
{
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] {
        small_subset(Vector{{1, 2, 3, 100}}, Vector{{0, 0, 0, 1}}, {0, 1, 2, 99}, 3, 99);
    }));
}

TEST(ExtremeSubset, RejectsWrongSize)
{
    // 100 rows at q = 0.08 need 8 observations, not 4.
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] {
        ExtremeSubset(0.08, 100, 2, 99, Matrix::Zero(4, 1), Vector{{1, 2, 99, 100}}, Vector{{0, 0, 1, 1}},
                      std::nullopt, {0, 1, 98, 99});
    }));
}

TEST(ExtremeSubset, RejectsRepeatedSourceRows)
{
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] {
        small_subset(Vector{{1, 2, 99, 100}}, Vector{{0, 0, 1, 1}}, {0, 0, 98, 99});
    }));
}

TEST(ExtremeSubset, RejectsCoincidingThresholds)
{
    EXPECT_TRUE(throws_kind(ErrorKind::degenerate_tails, [&] {
        small_subset(Vector{{1, 2, 99, 100}}, Vector{{0, 0, 1, 1}}, {0, 1, 98, 99}, 5, 5);
    }));
}

TEST(FitResult, SupportListsExactNonzeros)
{
    const Vector b{{0.0, -1e-300, 0.0, 2.0}};
    EXPECT_EQ(FitResult::support_of(b), (std::vector<Index>{1, 3}));
}

TEST(Direction, AcceptsUnitVector)
{
    const Direction d(Vector{{0.6, 0.8}}, Orientation::true_beta);
    EXPECT_FALSE(d.is_degenerate());
    EXPECT_EQ(d.orientation(), Orientation::true_beta);
}

TEST(Direction, RejectsNonUnitVector)
{
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] { Direction(Vector{{1.0, 1.0}}, Orientation::none); }));
}

TEST(Direction, FlagsZeroVector)
{
    EXPECT_TRUE(Direction(Vector::Zero(3), Orientation::none).is_degenerate());
    EXPECT_TRUE(Direction::degenerate(3).is_degenerate());
    EXPECT_EQ(Direction::degenerate(3).v().norm(), 0.0);
}
