#pragma once

// Umbrella header for the whole library.

#include "gapdyn/closed.hpp"
#include "gapdyn/csv.hpp"
#include "gapdyn/ensemble.hpp"
#include "gapdyn/errors.hpp"
#include "gapdyn/lattice.hpp"
#include "gapdyn/linalg.hpp"
#include "gapdyn/open.hpp"
#include "gapdyn/rng.hpp"
#include "gapdyn/scenario.hpp"
#include "gapdyn/swt.hpp"
