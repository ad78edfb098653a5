#pragma once

// Library umbrella header. The command layer (fpquad/cli.hpp) is separate
// because it pulls in the JSON writer.

#include "fpquad/analysis.hpp"
#include "fpquad/errors.hpp"
#include "fpquad/expr.hpp"
#include "fpquad/integrands.hpp"
#include "fpquad/model.hpp"
#include "fpquad/oracle.hpp"
#include "fpquad/quadrature.hpp"
#include "fpquad/summation.hpp"
