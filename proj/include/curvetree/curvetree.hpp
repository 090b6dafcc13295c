#pragma once

// Level curves of a bivariate polynomial near a strict local minimum:
// tracing, polar half-branches, vertical tangencies, the Poincare-Reeb
// plane tree, non-convexity measures, and stabilisation down an
// epsilon-ladder.

#include "curvetree/config.hpp"
#include "curvetree/errors.hpp"
#include "curvetree/geometry.hpp"
#include "curvetree/neighbourhood.hpp"
#include "curvetree/polar.hpp"
#include "curvetree/polynomial.hpp"
#include "curvetree/rational.hpp"
#include "curvetree/reeb.hpp"
#include "curvetree/resultant.hpp"
#include "curvetree/shape.hpp"
#include "curvetree/stabilize.hpp"
#include "curvetree/trace.hpp"
#include "curvetree/version.hpp"
