#pragma once

/// Umbrella header for the numerical library: problem types, safe regions,
/// screening, the solver, and the experiment drivers. File I/O lives in
/// lassoscreen/io.hpp, which additionally requires OpenSSL and a JSON
/// library, and is therefore not pulled in here.

#include "lassoscreen/core.hpp"
#include "lassoscreen/experiments.hpp"
#include "lassoscreen/flops.hpp"
#include "lassoscreen/generators.hpp"
#include "lassoscreen/parallel.hpp"
#include "lassoscreen/random.hpp"
#include "lassoscreen/regions.hpp"
#include "lassoscreen/screening.hpp"
#include "lassoscreen/solver.hpp"
#include "lassoscreen/version.hpp"
