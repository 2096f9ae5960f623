#pragma once

// Umbrella header.

#include "spectralab/atom.hpp"
#include "spectralab/constraint_graph.hpp"
#include "spectralab/errors.hpp"
#include "spectralab/experiments.hpp"
#include "spectralab/ihara.hpp"
#include "spectralab/instance.hpp"
#include "spectralab/json_io.hpp"
#include "spectralab/nomadic.hpp"
#include "spectralab/rng.hpp"
#include "spectralab/sdp.hpp"
#include "spectralab/spectra.hpp"
#include "spectralab/waves.hpp"
