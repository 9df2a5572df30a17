#pragma once

#include "hydrolim/cf_solver.hpp"
#include "hydrolim/checkpoint.hpp"
#include "hydrolim/cpe_solver.hpp"
#include "hydrolim/diagnostics.hpp"
#include "hydrolim/experiment.hpp"
#include "hydrolim/equations.hpp"
#include "hydrolim/error.hpp"
#include "hydrolim/grid.hpp"
#include "hydrolim/linear_oracle.hpp"
#include "hydrolim/model_state.hpp"
#include "hydrolim/spectral.hpp"
#include "hydrolim/state.hpp"
#include "hydrolim/stepper_config.hpp"
#include "hydrolim/verification.hpp"
