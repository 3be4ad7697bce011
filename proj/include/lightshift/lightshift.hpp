#pragma once

#include "lightshift/analytic.hpp"
#include "lightshift/error.hpp"
#include "lightshift/experiments.hpp"
#include "lightshift/extraction.hpp"
#include "lightshift/integrator.hpp"
#include "lightshift/ladder.hpp"
#include "lightshift/params.hpp"
#include "lightshift/pulse.hpp"
