#pragma once

// Umbrella header for the biphoton decoherence toolkit.

#include "biphoton/analysis.hpp"
#include "biphoton/config.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/density_matrix.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/io.hpp"
#include "biphoton/montecarlo.hpp"
#include "biphoton/random.hpp"
#include "biphoton/shaper.hpp"
#include "biphoton/spectral.hpp"
