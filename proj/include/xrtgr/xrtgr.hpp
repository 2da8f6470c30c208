#pragma once

// Umbrella header.

#include "xrtgr/rng.hpp"
#include "xrtgr/config.hpp"
#include "xrtgr/channel.hpp"
#include "xrtgr/topology.hpp"
#include "xrtgr/phy.hpp"
#include "xrtgr/traffic.hpp"
#include "xrtgr/link_adaptation.hpp"
#include "xrtgr/harq.hpp"
#include "xrtgr/scheduler.hpp"
#include "xrtgr/timing.hpp"
#include "xrtgr/results.hpp"
#include "xrtgr/engine.hpp"
#include "xrtgr/kpi.hpp"
#include "xrtgr/tables.hpp"
#include "xrtgr/sweep.hpp"
#include "xrtgr/report.hpp"
#include "xrtgr/synthetic.hpp"
