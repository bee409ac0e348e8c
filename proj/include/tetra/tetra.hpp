#pragma once

// Umbrella header: the full verification toolkit.

#include "tetra/scalar.hpp"
#include "tetra/space.hpp"
#include "tetra/fin_vec.hpp"
#include "tetra/local_op.hpp"
#include "tetra/dense_window.hpp"
#include "tetra/operator_norm.hpp"
#include "tetra/hardy.hpp"
#include "tetra/tetrablock.hpp"
#include "tetra/triples.hpp"
#include "tetra/constructions.hpp"
#include "tetra/report.hpp"
#include "tetra/suites.hpp"
