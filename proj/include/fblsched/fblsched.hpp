#pragma once

// Energy-minimal blocklength/power scheduling for deadline-constrained
// packet sequences under the finite-blocklength capacity model.

#include "fblsched/bounds.hpp"
#include "fblsched/capacity.hpp"
#include "fblsched/experiment.hpp"
#include "fblsched/instance.hpp"
#include "fblsched/io.hpp"
#include "fblsched/online.hpp"
#include "fblsched/oracle.hpp"
#include "fblsched/rng.hpp"
#include "fblsched/schedule.hpp"
#include "fblsched/shannon.hpp"
#include "fblsched/solver.hpp"
#include "fblsched/special_functions.hpp"
#include "fblsched/traffic.hpp"
#include "fblsched/types.hpp"
