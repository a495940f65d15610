#pragma once

#include "vocabflow/box.hpp"
#include "vocabflow/check.hpp"
#include "vocabflow/compile.hpp"
#include "vocabflow/error.hpp"
#include "vocabflow/flows.hpp"
#include "vocabflow/harness.hpp"
#include "vocabflow/kron.hpp"
#include "vocabflow/linalg.hpp"
#include "vocabflow/neural_ode.hpp"
#include "vocabflow/parallel.hpp"
#include "vocabflow/split.hpp"
#include "vocabflow/target_spec.hpp"
#include "vocabflow/vocab.hpp"
