#pragma once

#include "objnav/common.hpp"
#include "objnav/grid_map.hpp"
#include "objnav/sampling.hpp"
#include "objnav/features.hpp"
#include "objnav/bandit.hpp"
#include "objnav/planner.hpp"
#include "objnav/bench.hpp"
#include "objnav/spawn.hpp"
#include "objnav/metrics.hpp"
#include "objnav/simulator.hpp"
#include "objnav/scenario.hpp"
#include "objnav/report.hpp"
