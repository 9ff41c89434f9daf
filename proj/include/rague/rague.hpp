#pragma once

#include "rague/axioms.hpp"
#include "rague/cache.hpp"
#include "rague/calibration.hpp"
#include "rague/clients.hpp"
#include "rague/cluster.hpp"
#include "rague/core.hpp"
#include "rague/dataset.hpp"
#include "rague/errors.hpp"
#include "rague/metrics.hpp"
#include "rague/nli.hpp"
#include "rague/pipeline.hpp"
#include "rague/relations.hpp"
#include "rague/seqprob.hpp"
#include "rague/spectral.hpp"
#include "rague/stats.hpp"
