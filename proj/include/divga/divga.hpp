#pragma once

#include "divga/baselines.hpp"
#include "divga/bench.hpp"
#include "divga/distance.hpp"
#include "divga/engine.hpp"
#include "divga/error.hpp"
#include "divga/genome.hpp"
#include "divga/io.hpp"
#include "divga/selection.hpp"
#include "divga/variation.hpp"
