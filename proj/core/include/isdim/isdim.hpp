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

#ifndef ISDIM_ISDIM_HPP
#define ISDIM_ISDIM_HPP

#include <isdim/errors.hpp>
#include <isdim/filter.hpp>
#include <isdim/inverse.hpp>
#include <isdim/measures.hpp>
#include <isdim/numerics.hpp>
#include <isdim/parallel.hpp>
#include <isdim/random.hpp>
#include <isdim/sampler.hpp>
#include <isdim/version.hpp>

#endif
