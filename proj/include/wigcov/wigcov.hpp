#pragma once

// Umbrella header: the whole library.

#include "config.hpp"
#include "covariance.hpp"
#include "ensembles.hpp"
#include "error.hpp"
#include "families.hpp"
#include "graph.hpp"
#include "monte_carlo.hpp"
#include "nc_annulus.hpp"
#include "numeric.hpp"
#include "oracle.hpp"
#include "runner.hpp"
#include "states.hpp"
#include "words.hpp"
