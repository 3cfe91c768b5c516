#pragma once

// Umbrella header for the online monotone optimization library: feasible
// sets, monotone vector fields, path-integral losses, no-regret learners,
// variational-inequality solving, generated network games, and the
// experiment/verification drivers.

#include "omo/config.hpp"
#include "omo/core.hpp"
#include "omo/domain.hpp"
#include "omo/equilibrium.hpp"
#include "omo/experiment.hpp"
#include "omo/integral.hpp"
#include "omo/learners.hpp"
#include "omo/maps.hpp"
#include "omo/networks.hpp"
#include "omo/ome.hpp"
#include "omo/regret.hpp"
#include "omo/rng.hpp"
#include "omo/svg.hpp"
#include "omo/verify.hpp"
