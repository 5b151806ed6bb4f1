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

#include <isdim/parallel.hpp>

namespace isdim {

namespace {

std::atomic<std::size_t>& thread_setting() {
  static std::atomic<std::size_t> setting{std::max(1U, std::thread::hardware_concurrency())};
  return setting;
}

}  // namespace

std::size_t default_threads() { return thread_setting().load(); }

void set_default_threads(std::size_t threads) { thread_setting() = std::max<std::size_t>(1, threads); }

}  // namespace isdim
