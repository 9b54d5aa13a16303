#pragma once

// Umbrella header: device-independent entanglement bounds from measured
// behaviors, via exact or certified distances to the local polytope and via
// normalized inequality violations.

#include "bellbound/errors.hpp"
#include "bellbound/scenario.hpp"
#include "bellbound/divergence.hpp"
#include "bellbound/simplex_lp.hpp"
#include "bellbound/frank_wolfe.hpp"
#include "bellbound/distance.hpp"
#include "bellbound/inequality.hpp"
#include "bellbound/bounds.hpp"
#include "bellbound/quantum.hpp"
#include "bellbound/presets.hpp"
#include "bellbound/io.hpp"
#include "bellbound/reproduce.hpp"
