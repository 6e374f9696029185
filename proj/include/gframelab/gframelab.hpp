#pragma once

// Umbrella header.

#include "gframelab/errors.hpp"
#include "gframelab/linops.hpp"
#include "gframelab/rng.hpp"
#include "gframelab/measure.hpp"
#include "gframelab/gframe.hpp"
#include "gframelab/controlled.hpp"
#include "gframelab/duals.hpp"
#include "gframelab/scenarios.hpp"
#include "gframelab/report.hpp"
