#pragma once

#include "io.hpp"
#include "kernels.hpp"
#include "model.hpp"
#include "pmmh.hpp"
#include "rng.hpp"
#include "simulate.hpp"
#include "smc.hpp"
#include "special_functions.hpp"
