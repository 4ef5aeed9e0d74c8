#pragma once

#include "tvpk/errors.hpp"
#include "tvpk/kernels.hpp"
#include "tvpk/rng.hpp"
#include "tvpk/parallel.hpp"
#include "tvpk/stats.hpp"
#include "tvpk/data.hpp"
#include "tvpk/estimator.hpp"
#include "tvpk/selection.hpp"
#include "tvpk/dgp.hpp"
#include "tvpk/mc.hpp"
#include "tvpk/csv.hpp"
#include "tvpk/portfolios.hpp"
#include "tvpk/report.hpp"
