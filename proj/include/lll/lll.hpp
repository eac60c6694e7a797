#pragma once

#include "lll/branching.hpp"
#include "lll/conditions.hpp"
#include "lll/encodings.hpp"
#include "lll/engine.hpp"
#include "lll/graph.hpp"
#include "lll/model.hpp"
#include "lll/rng.hpp"
#include "lll/stats.hpp"
#include "lll/witness.hpp"
