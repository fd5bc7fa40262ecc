#pragma once

// Umbrella header for the whole library.

#include "calculus.hpp"
#include "errors.hpp"
#include "expression.hpp"
#include "json_io.hpp"
#include "limits.hpp"
#include "ndfunction.hpp"
#include "numeric.hpp"
#include "ode.hpp"
#include "piecewise.hpp"
#include "quadrature.hpp"
#include "specular1d.hpp"
#include "specularnd.hpp"
#include "svg.hpp"
#include "transport.hpp"
