#pragma once

// Coherent-risk portfolio analytics: spectral risk measures on discrete
// scenario sets, extreme measures and risk contributions, reward/risk
// frontier optimization with SML betas, contact-measure construction, and
// NBC pricing of contingent claims.

#include "capm.hpp"
#include "errors.hpp"
#include "extreme.hpp"
#include "io.hpp"
#include "matrix.hpp"
#include "optimizer.hpp"
#include "pricing.hpp"
#include "rng.hpp"
#include "sample.hpp"
#include "scenario.hpp"
#include "spectral.hpp"
#include "weighting.hpp"
