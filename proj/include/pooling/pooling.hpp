// Copyright 2026 The Pooling Network Authors
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

#include "pooling/error.hpp"
#include "pooling/model.hpp"
#include "pooling/network.hpp"
#include "pooling/network_json.hpp"
#include "pooling/pooling_cuts.hpp"
#include "pooling/pq_formulation.hpp"
#include "pooling/relaxation.hpp"
#include "pooling/restriction.hpp"
#include "pooling/solve/branch_and_cut.hpp"
#include "pooling/solve/gap.hpp"
#include "pooling/solve/lp_simplex.hpp"
#include "pooling/solve/mip.hpp"
#include "pooling/solve/primal_search.hpp"
