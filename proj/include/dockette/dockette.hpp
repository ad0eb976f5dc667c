#pragma once

// Umbrella header.
#include "bench.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "io.hpp"
#include "model.hpp"
#include "params.hpp"
#include "pose.hpp"
#include "reduce.hpp"
#include "result.hpp"
#include "rng.hpp"
#include "scoring.hpp"
#include "search.hpp"
#include "team.hpp"
#include "vec3.hpp"
