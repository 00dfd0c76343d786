#pragma once

#include "eqlearn/baselines.hpp"
#include "eqlearn/benchmark.hpp"
#include "eqlearn/comprehensive_search.hpp"
#include "eqlearn/dictionary.hpp"
#include "eqlearn/dynsys.hpp"
#include "eqlearn/error.hpp"
#include "eqlearn/evidence.hpp"
#include "eqlearn/experiments.hpp"
#include "eqlearn/io.hpp"
#include "eqlearn/methods.hpp"
#include "eqlearn/parallel.hpp"
#include "eqlearn/problem.hpp"
#include "eqlearn/random.hpp"
#include "eqlearn/regression.hpp"
#include "eqlearn/stepwise.hpp"
#include "eqlearn/subset_ranking.hpp"
#include "eqlearn/types.hpp"
