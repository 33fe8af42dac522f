#pragma once

#include "maxwell1d/errors.hpp"
#include "maxwell1d/lyapunov.hpp"
#include "maxwell1d/metrics.hpp"
#include "maxwell1d/moments.hpp"
#include "maxwell1d/params.hpp"
#include "maxwell1d/physical.hpp"
#include "maxwell1d/solver.hpp"
#include "maxwell1d/spectral.hpp"
#include "maxwell1d/steady.hpp"
