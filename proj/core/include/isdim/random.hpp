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

#ifndef ISDIM_RANDOM_HPP
#define ISDIM_RANDOM_HPP

#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Core>

namespace isdim {

/// Engine used for every stream. mt19937_64 output is fully specified by the
/// standard, and the normal transform comes from Boost.Random, so draws are
/// bit-identical across platforms and standard libraries.
using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of stream `stream` under master seed `master`. Distinct streams are
/// decorrelated by two rounds of SplitMix64 finalization.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

Engine make_engine(std::uint64_t master, std::uint64_t stream = 0);

void fill_standard_normal(Engine& engine, std::span<double> out);

/// rows x cols matrix of independent N(0,1) draws, filled row by row so that a
/// prefix of rows does not depend on how many rows are requested.
Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

}  // namespace isdim

#endif
