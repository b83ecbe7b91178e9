#pragma once

#include <aevo/random.hpp>
#include <aevo/genome.hpp>
#include <aevo/operators.hpp>
#include <aevo/engine.hpp>
#include <aevo/islands.hpp>
#include <aevo/problems/arena.hpp>
#include <aevo/problems/benchmarks.hpp>
#include <aevo/experiment.hpp>
