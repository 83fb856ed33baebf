#pragma once

#include "datapricing/config.hpp"
#include "datapricing/discretization.hpp"
#include "datapricing/ftpl.hpp"
#include "datapricing/harness.hpp"
#include "datapricing/market.hpp"
#include "datapricing/offline_opt.hpp"
#include "datapricing/output.hpp"
#include "datapricing/payoff.hpp"
#include "datapricing/price_space.hpp"
#include "datapricing/random.hpp"
#include "datapricing/ucb.hpp"
#include "datapricing/valuations.hpp"
