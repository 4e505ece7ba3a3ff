#pragma once

#include "finnet/baselines.hpp"
#include "finnet/channel.hpp"
#include "finnet/errors.hpp"
#include "finnet/geometry.hpp"
#include "finnet/mgf.hpp"
#include "finnet/montecarlo.hpp"
#include "finnet/quadrature.hpp"
#include "finnet/rlpg.hpp"
#include "finnet/scenario.hpp"
#include "finnet/scenario_io.hpp"
#include "finnet/specfun.hpp"
