#pragma once

#include "asymptotics.hpp"
#include "errors.hpp"
#include "estimate.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "montecarlo.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "simulate.hpp"
#include "stats.hpp"
