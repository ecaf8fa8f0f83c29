#pragma once

#include "sparsespace/dataflow.hpp"
#include "sparsespace/dense.hpp"
#include "sparsespace/designs.hpp"
#include "sparsespace/encoded_json.hpp"
#include "sparsespace/error.hpp"
#include "sparsespace/inverse_map.hpp"
#include "sparsespace/matrix_market.hpp"
#include "sparsespace/reduction.hpp"
#include "sparsespace/transform.hpp"
