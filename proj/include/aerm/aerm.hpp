#pragma once

#include "aerm/confidence.hpp"
#include "aerm/erm.hpp"
#include "aerm/error.hpp"
#include "aerm/experiments.hpp"
#include "aerm/generators.hpp"
#include "aerm/l1.hpp"
#include "aerm/model.hpp"
#include "aerm/parallel.hpp"
#include "aerm/plausibility.hpp"
#include "aerm/rng.hpp"
#include "aerm/sample.hpp"
#include "aerm/ucf.hpp"
