#pragma once

#include "bridgelab/bridge.hpp"
#include "bridgelab/errors.hpp"
#include "bridgelab/functionals.hpp"
#include "bridgelab/gaussian.hpp"
#include "bridgelab/grid.hpp"
#include "bridgelab/random_states.hpp"
#include "bridgelab/state.hpp"
#include "bridgelab/unitary.hpp"
