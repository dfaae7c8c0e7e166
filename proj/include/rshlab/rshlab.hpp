#pragma once

#include "rshlab/analysis.hpp"
#include "rshlab/cancel.hpp"
#include "rshlab/chain.hpp"
#include "rshlab/convergence.hpp"
#include "rshlab/drift.hpp"
#include "rshlab/errors.hpp"
#include "rshlab/heuristics.hpp"
#include "rshlab/hitting.hpp"
#include "rshlab/io.hpp"
#include "rshlab/linalg.hpp"
#include "rshlab/random.hpp"
#include "rshlab/rate.hpp"
#include "rshlab/reproduction.hpp"
#include "rshlab/simulation.hpp"
#include "rshlab/spectral.hpp"
