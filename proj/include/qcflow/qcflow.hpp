// Copyright 2026 The qcflow Authors
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

#include "qcflow/core/error.hpp"
#include "qcflow/core/linalg.hpp"
#include "qcflow/core/rng.hpp"

#include "qcflow/apps/barren.hpp"
#include "qcflow/apps/classifier.hpp"
#include "qcflow/apps/qaoa.hpp"
#include "qcflow/apps/qcnn.hpp"
#include "qcflow/apps/thermal.hpp"

#include "qcflow/bench/bench.hpp"

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/circuit/gate.hpp"
#include "qcflow/circuit/json_io.hpp"
#include "qcflow/circuit/param.hpp"
#include "qcflow/circuit/pauli.hpp"

#include "qcflow/grad/differentiators.hpp"

#include "qcflow/nn/adam.hpp"
#include "qcflow/nn/dense.hpp"
#include "qcflow/nn/fit.hpp"
#include "qcflow/nn/loss.hpp"
#include "qcflow/nn/model.hpp"
#include "qcflow/nn/quantum.hpp"
#include "qcflow/nn/tensor.hpp"

#include "qcflow/sim/fusion.hpp"
#include "qcflow/sim/kernels.hpp"
#include "qcflow/sim/simulator.hpp"
#include "qcflow/sim/state_vector.hpp"
