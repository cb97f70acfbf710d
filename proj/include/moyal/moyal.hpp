#pragma once

#include "moyal/errors.hpp"
#include "moyal/theta.hpp"
#include "moyal/grid.hpp"
#include "moyal/polynomial.hpp"
#include "moyal/gaussian.hpp"
#include "moyal/symbol.hpp"
#include "moyal/spectral.hpp"
#include "moyal/starproduct.hpp"
#include "moyal/functional.hpp"
#include "moyal/bridge.hpp"
#include "moyal/duality.hpp"
#include "moyal/gsanalysis.hpp"
#include "moyal/serialization.hpp"
#include "moyal/experiments.hpp"
