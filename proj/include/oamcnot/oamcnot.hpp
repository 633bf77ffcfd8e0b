#pragma once

#include "oamcnot/array2d.hpp"
#include "oamcnot/circuit.hpp"
#include "oamcnot/hybrid_state.hpp"
#include "oamcnot/interferometer.hpp"
#include "oamcnot/pgm.hpp"
#include "oamcnot/readout.hpp"
#include "oamcnot/simulate.hpp"
#include "oamcnot/wavefield.hpp"
