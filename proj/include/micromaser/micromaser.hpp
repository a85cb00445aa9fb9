#pragma once

#include "micromaser/error.hpp"
#include "micromaser/params.hpp"
#include "micromaser/quadrature.hpp"
#include "micromaser/fock.hpp"
#include "micromaser/band_operator.hpp"
#include "micromaser/model.hpp"
#include "micromaser/steady_state.hpp"
#include "micromaser/lindblad.hpp"
#include "micromaser/linewidth.hpp"
#include "micromaser/regression.hpp"
#include "micromaser/uniform.hpp"
#include "micromaser/dense.hpp"
#include "micromaser/scan.hpp"
