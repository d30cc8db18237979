#pragma once

#include "nlskp/config.hpp"
#include "nlskp/errors.hpp"
#include "nlskp/field_io.hpp"
#include "nlskp/grenier_hydro.hpp"
#include "nlskp/grid.hpp"
#include "nlskp/harness.hpp"
#include "nlskp/invariants.hpp"
#include "nlskp/limit_solvers.hpp"
#include "nlskp/madelung.hpp"
#include "nlskp/nls_solver.hpp"
#include "nlskp/nonlinearity.hpp"
#include "nlskp/spectral.hpp"
#include "nlskp/transport_probe.hpp"
