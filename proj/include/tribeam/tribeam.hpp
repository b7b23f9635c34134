#pragma once

#include "tribeam/config.hpp"
#include "tribeam/correlations.hpp"
#include "tribeam/covariance.hpp"
#include "tribeam/errors.hpp"
#include "tribeam/ghzw.hpp"
#include "tribeam/invariants.hpp"
#include "tribeam/propagation.hpp"
#include "tribeam/photonics/analysis.hpp"
#include "tribeam/photonics/bootstrap.hpp"
#include "tribeam/photonics/em.hpp"
#include "tribeam/photonics/estimate.hpp"
#include "tribeam/photonics/histogram.hpp"
#include "tribeam/photonics/model.hpp"
#include "tribeam/photonics/moments.hpp"
#include "tribeam/photonics/sampling.hpp"
#include "tribeam/photonics/series.hpp"
#include "tribeam/photonics/sweep.hpp"
#include "tribeam/photonics/wick.hpp"
