#pragma once

// Integrals against stationary measures of iterated function systems on
// [0,1] via periodic-orbit traces and determinant coefficients.

#include "applications.hpp"
#include "config.hpp"
#include "estimator.hpp"
#include "ifs.hpp"
#include "numeric.hpp"
#include "observable.hpp"
#include "orbit.hpp"
#include "trace.hpp"
#include "words.hpp"
