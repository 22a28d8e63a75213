// Copyright 2026 The detsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "detsplit/benchmark.hpp"
#include "detsplit/dataset.hpp"
#include "detsplit/detector.hpp"
#include "detsplit/difficulty.hpp"
#include "detsplit/errors.hpp"
#include "detsplit/eval.hpp"
#include "detsplit/geometry.hpp"
#include "detsplit/report.hpp"
#include "detsplit/rng.hpp"
#include "detsplit/router.hpp"
#include "detsplit/sweep.hpp"
#include "detsplit/synthetic.hpp"
