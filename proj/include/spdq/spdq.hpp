#pragma once

#include "config.hpp"
#include "contract.hpp"
#include "dynamics.hpp"
#include "experiment.hpp"
#include "game.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "learning.hpp"
#include "metrics.hpp"
