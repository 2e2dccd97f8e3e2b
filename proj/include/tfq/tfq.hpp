#pragma once

// Umbrella header for the tfq library.

#include "tfq/core.hpp"
#include "tfq/errors.hpp"
#include "tfq/fft.hpp"
#include "tfq/gaussians.hpp"
#include "tfq/harness.hpp"
#include "tfq/io.hpp"
#include "tfq/parallel.hpp"
#include "tfq/quantize.hpp"
#include "tfq/resample.hpp"
#include "tfq/symplectic.hpp"
#include "tfq/tfdist.hpp"
