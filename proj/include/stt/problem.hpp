#pragma once

#include <functional>
#include <string>

namespace stt {

enum class ProblemKind { stationary_diffusion, linear_cdr, semilinear };

// Scalar field over the space-time box. Stationary problems receive t = 0.
using FieldFn = std::function<double(double t, double x, double y, double z)>;

// One convection-diffusion-reaction experiment on (0, length)^3 x (0, final_time].
// Null closures denote absent terms: kappa defaults to the constant 1, all
// others to 0. The name identifies the entry and keys the operator cache.
// Semilinear entries keep convection and the linear reaction slot empty; the
// cubic reaction is handled by the Newton loop, not the assembled operator.
struct ProblemSpec {
  std::string name;
  ProblemKind kind = ProblemKind::linear_cdr;
  double length = 1.0;
  double final_time = 1.0;
  FieldFn kappa;       // diffusion coefficient
  FieldFn b1, b2, b3;  // convection components
  FieldFn c;           // reaction coefficient
  FieldFn forcing;     // volumetric source f
  FieldFn boundary;    // Dirichlet data g on the spatial boundary
  FieldFn initial;     // initial data u0 at t = 0
  FieldFn exact;       // manufactured solution when known
};

}  // namespace stt
