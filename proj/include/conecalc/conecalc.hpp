#pragma once

#include "conecalc/cones.hpp"
#include "conecalc/error.hpp"
#include "conecalc/inheritance.hpp"
#include "conecalc/lattice.hpp"
#include "conecalc/nnls.hpp"
#include "conecalc/numerics.hpp"
#include "conecalc/parallel.hpp"
#include "conecalc/positivity.hpp"
#include "conecalc/semigroup.hpp"
#include "conecalc/spin.hpp"
#include "conecalc/stability.hpp"
