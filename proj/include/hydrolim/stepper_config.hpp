#pragma once

#include "hydrolim/error.hpp"

namespace hydrolim {

enum class Scheme {
  imex_euler,  // backward Euler on the linear part, forward Euler on the rest
  cnab2,       // Crank-Nicolson / Adams-Bashforth 2, started by a predictor-corrector step
};

struct StepperConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::cnab2;
  bool dealias = true;
  /// When false the quadratic terms are dropped and only the linear part is integrated.
  bool nonlinear = true;

  void validate() const {
    if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  }
};

}  // namespace hydrolim
