#pragma once

// Closed-loop vector field x' = K^{-1} f(x) of the hybrid ac/dc grid under HAC,
// its error-coordinate form and its analytic Jacobian.

#include "hgl/controller.hpp"
#include "hgl/grid.hpp"

namespace hgl {

/// Evaluate f(x) (not premultiplied by K^{-1}) into `out`. Row blocks follow the
/// state order. Throws std::invalid_argument on dimension mismatch.
void vector_field(const Vec& x, const GridParameters& p, const ControllerKind& ctl, Vec& out);
Vec vector_field(const Vec& x, const GridParameters& p, const ControllerKind& ctl = {});
Vec vector_field(const SystemState& x, const GridParameters& p, const ControllerKind& ctl = {});

/// K^{-1} f(x), the right-hand side handed to the integrators.
void state_derivative(const Vec& x, const GridParameters& p, const ControllerKind& ctl,
                      const Vec& inv_mass, Vec& out);

/// f-hat(xhat) = f(xhat + xstar) for HAC-angle control, evaluated from the
/// error-coordinate rows (modulation error E(delta) = m(delta) - m(delta*))
/// rather than by shifting the state. `xstar` must be an equilibrium.
Vec error_vector_field(const Vec& xhat, const Vec& xstar, const GridParameters& p);

/// Analytic df/dx for HAC-angle control, dense (11n+m) x (11n+m).
Mat jacobian(const Vec& x, const GridParameters& p);

/// Central-difference df/dx; angles are not wrapped inside the stencil.
Mat jacobian_fd(const Vec& x, const GridParameters& p, double step = 1e-6);

}  // namespace hgl
