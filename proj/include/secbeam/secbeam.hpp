#pragma once

#include "array_core.hpp"
#include "channel.hpp"
#include "error.hpp"
#include "exposure.hpp"
#include "optimize.hpp"
#include "parallel.hpp"
#include "pattern_io.hpp"
#include "pattern_table.hpp"
#include "rng.hpp"
#include "special.hpp"
#include "ssop.hpp"
#include "units.hpp"
