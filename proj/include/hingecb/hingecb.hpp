#pragma once

// Convenience umbrella: pulls in the whole library.

#include "errors.hpp"
#include "rng.hpp"
#include "surrogate.hpp"
#include "model.hpp"
#include "records.hpp"
#include "sampler.hpp"
#include "oracles.hpp"
#include "hinge_lmc.hpp"
#include "smooth_ftl.hpp"
#include "environments.hpp"
#include "harness.hpp"
