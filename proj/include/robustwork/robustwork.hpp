#pragma once

#include "analysis.hpp"
#include "capacity.hpp"
#include "domain.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "lp.hpp"
#include "metrics.hpp"
#include "rational.hpp"
#include "rng.hpp"
#include "scanning.hpp"
#include "scenario.hpp"
#include "sched_core.hpp"
#include "sched_dist.hpp"
#include "type_queue.hpp"
#include "workload.hpp"
