#pragma once

#include "bench.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "greedy.hpp"
#include "kernel.hpp"
#include "landmarks.hpp"
#include "nystrom.hpp"
#include "random.hpp"
#include "samplers.hpp"
#include "spectral.hpp"
