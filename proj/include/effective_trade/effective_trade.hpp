#pragma once

#include "effective_trade/error.hpp"
#include "effective_trade/economy.hpp"
#include "effective_trade/utility.hpp"
#include "effective_trade/exchange.hpp"
#include "effective_trade/feasibility.hpp"
#include "effective_trade/price_polytope.hpp"
#include "effective_trade/discrete/record.hpp"
#include "effective_trade/discrete/enumerate.hpp"
#include "effective_trade/discrete/pareto.hpp"
#include "effective_trade/discrete/nash.hpp"
#include "effective_trade/discrete/topology.hpp"
#include "effective_trade/dynamics/state.hpp"
#include "effective_trade/dynamics/supergradient.hpp"
#include "effective_trade/dynamics/projection.hpp"
#include "effective_trade/dynamics/ascent.hpp"
#include "effective_trade/dynamics/nontatonnement.hpp"
#include "effective_trade/dynamics/kkt.hpp"
#include "effective_trade/dynamics/price_regimes.hpp"
#include "effective_trade/dynamics/deviation.hpp"
#include "effective_trade/monetary.hpp"
#include "effective_trade/anticipation.hpp"
