#pragma once

#include "gramcov/applications.hpp"
#include "gramcov/bench.hpp"
#include "gramcov/estimators.hpp"
#include "gramcov/io.hpp"
#include "gramcov/matrix.hpp"
#include "gramcov/rng.hpp"
#include "gramcov/streaming.hpp"
#include "gramcov/weighted.hpp"
