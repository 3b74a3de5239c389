#pragma once

#include "phstring/assembly.hpp"
#include "phstring/boundary.hpp"
#include "phstring/config.hpp"
#include "phstring/diagnostics.hpp"
#include "phstring/integrator.hpp"
#include "phstring/material.hpp"
#include "phstring/mesh.hpp"
#include "phstring/run.hpp"
#include "phstring/scenarios.hpp"
