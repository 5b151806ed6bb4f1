// Copyright 2026 The isdim Authors
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

#include <set>

#include <gtest/gtest.h>

#include <isdim/random.hpp>

namespace isdim {
namespace {

TEST(Random, DerivedSeedsAreDistinctAndDeterministic) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream = 0; stream < 1000; ++stream) {
    seen.insert(derive_seed(42, stream));
  }
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
  EXPECT_NE(derive_seed(42, 7), derive_seed(43, 7));
}

TEST(Random, StandardNormalMatrixIsBitReproducible) {
  const Eigen::MatrixXd a = standard_normal_matrix(50, 3, 99);
  const Eigen::MatrixXd b = standard_normal_matrix(50, 3, 99);
  EXPECT_TRUE((a.array() == b.array()).all());
}

TEST(Random, RowPrefixDoesNotDependOnRowCount) {
  const Eigen::MatrixXd small = standard_normal_matrix(10, 2, 5);
  const Eigen::MatrixXd large = standard_normal_matrix(1000, 2, 5);
  EXPECT_TRUE((small.array() == large.topRows(10).array()).all());
}

TEST(Random, MomentsOfStandardNormal) {
  const Eigen::MatrixXd x = standard_normal_matrix(200000, 1, 3);
  EXPECT_NEAR(x.mean(), 0.0, 0.01);
  EXPECT_NEAR(x.array().square().mean(), 1.0, 0.01);
}

}  // namespace
}  // namespace isdim
