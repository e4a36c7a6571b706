#pragma once

#include "kron/analytic.hpp"
#include "kron/combinatorics.hpp"
#include "kron/edgelist.hpp"
#include "kron/errors.hpp"
#include "kron/experiments.hpp"
#include "kron/model.hpp"
#include "kron/rng.hpp"
#include "kron/sampler.hpp"
