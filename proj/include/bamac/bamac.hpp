#pragma once

#include "bamac/core.hpp"
#include "bamac/simplex.hpp"
#include "bamac/rate_region.hpp"
#include "bamac/two_state.hpp"
#include "bamac/multi_state.hpp"
#include "bamac/linear.hpp"
#include "bamac/rate_opt.hpp"
#include "bamac/monte_carlo.hpp"
