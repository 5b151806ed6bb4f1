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

#include <isdim/random.hpp>

#include <boost/random/normal_distribution.hpp>

namespace isdim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

Engine make_engine(std::uint64_t master, std::uint64_t stream) {
  return Engine{derive_seed(master, stream)};
}

void fill_standard_normal(Engine& engine, std::span<double> out) {
  boost::random::normal_distribution<double> normal{0.0, 1.0};
  for (double& x : out) {
    x = normal(engine);
  }
}

Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> draws(rows, cols);
  auto engine = make_engine(seed);
  fill_standard_normal(engine, std::span<double>(draws.data(), static_cast<std::size_t>(draws.size())));
  return draws;
}

}  // namespace isdim
