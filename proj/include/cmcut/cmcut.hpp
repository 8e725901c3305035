#pragma once

// Umbrella header.

#include "cmcut/branching.hpp"
#include "cmcut/cuts.hpp"
#include "cmcut/distribution.hpp"
#include "cmcut/errors.hpp"
#include "cmcut/experiments.hpp"
#include "cmcut/generator.hpp"
#include "cmcut/multigraph.hpp"
#include "cmcut/rng.hpp"
#include "cmcut/structure.hpp"
#include "cmcut/theory.hpp"
#include "cmcut/version.hpp"
