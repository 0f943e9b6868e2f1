#pragma once

#include "stochlog/errors.hpp"
#include "stochlog/matcore.hpp"
#include "stochlog/fit.hpp"
#include "stochlog/lognorm.hpp"
#include "stochlog/montecarlo.hpp"
#include "stochlog/system.hpp"
#include "stochlog/sampler.hpp"
#include "stochlog/estimators.hpp"
#include "stochlog/bounds.hpp"
#include "stochlog/stability.hpp"
#include "stochlog/sdesim.hpp"
#include "stochlog/io.hpp"
