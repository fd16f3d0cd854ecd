#pragma once

#include "recmle/analytic.hpp"
#include "recmle/errors.hpp"
#include "recmle/estimators.hpp"
#include "recmle/family.hpp"
#include "recmle/montecarlo.hpp"
#include "recmle/quadrature.hpp"
#include "recmle/records.hpp"
#include "recmle/report.hpp"
#include "recmle/rng.hpp"
