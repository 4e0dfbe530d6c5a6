// Copyright 2026 The PFP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "pfp/attack.hpp"
#include "pfp/coherence.hpp"
#include "pfp/error.hpp"
#include "pfp/harness/experiment.hpp"
#include "pfp/harness/generate.hpp"
#include "pfp/harness/matrix_io.hpp"
#include "pfp/linalg.hpp"
#include "pfp/matrix.hpp"
#include "pfp/privacy.hpp"
#include "pfp/random.hpp"
#include "pfp/sketch.hpp"
