#pragma once

#include "annealing.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "field.hpp"
#include "lattice.hpp"
#include "memory.hpp"
#include "pattern_io.hpp"
#include "random.hpp"
#include "report.hpp"
#include "store_json.hpp"
