#pragma once

#include "pbl/error.hpp"
#include "pbl/wiener.hpp"
#include "pbl/path_cache.hpp"
#include "pbl/coefficients.hpp"
#include "pbl/quadrature.hpp"
#include "pbl/closed_form.hpp"
#include "pbl/integrator.hpp"
#include "pbl/cocycle.hpp"
#include "pbl/recurrence.hpp"
#include "pbl/bifurcation.hpp"
