#pragma once

// Umbrella header for the whole library.

#include "fraccos/errors.hpp"
#include "fraccos/matrix.hpp"
#include "fraccos/special_functions.hpp"
#include "fraccos/quadrature.hpp"
#include "fraccos/operator_families.hpp"
#include "fraccos/resolvent.hpp"
#include "fraccos/perturbation_series.hpp"
#include "fraccos/laplace.hpp"
#include "fraccos/problem_spec.hpp"
#include "fraccos/reporting.hpp"

namespace fraccos {}
