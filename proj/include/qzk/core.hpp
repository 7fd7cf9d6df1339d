// Copyright 2026 The qzk Authors
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

#include "qzk/core/gates.hpp"
#include "qzk/core/kernel.hpp"
#include "qzk/core/layout.hpp"
#include "qzk/core/linalg.hpp"
#include "qzk/core/metrics.hpp"
#include "qzk/core/random.hpp"
#include "qzk/core/state.hpp"
#include "qzk/core/swap_test.hpp"
#include "qzk/core/types.hpp"
