// Copyright 2026 The pbopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PBOPT_PBOPT_HPP
#define PBOPT_PBOPT_HPP

#include "pbopt/benchmarks.hpp"
#include "pbopt/continuation.hpp"
#include "pbopt/core.hpp"
#include "pbopt/csv.hpp"
#include "pbopt/error.hpp"
#include "pbopt/estimators.hpp"
#include "pbopt/harness.hpp"
#include "pbopt/mlp.hpp"
#include "pbopt/optim.hpp"
#include "pbopt/params.hpp"
#include "pbopt/rng.hpp"
#include "pbopt/svg.hpp"
#include "pbopt/varlab.hpp"

#endif  // PBOPT_PBOPT_HPP
