#pragma once

#include "wavegroup/dwt.hpp"
#include "wavegroup/error.hpp"
#include "wavegroup/grouping.hpp"
#include "wavegroup/linop.hpp"
#include "wavegroup/penalty.hpp"
#include "wavegroup/random.hpp"
#include "wavegroup/solver.hpp"
