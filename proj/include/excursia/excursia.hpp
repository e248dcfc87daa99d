#pragma once

#include "excursia/covariance.hpp"
#include "excursia/error.hpp"
#include "excursia/estimate.hpp"
#include "excursia/laplace.hpp"
#include "excursia/numerics.hpp"
#include "excursia/parallel.hpp"
#include "excursia/persistency.hpp"
#include "excursia/reference.hpp"
#include "excursia/rng.hpp"
#include "excursia/samplers.hpp"
#include "excursia/slepian.hpp"
#include "excursia/stats.hpp"
#include "excursia/switch_process.hpp"
