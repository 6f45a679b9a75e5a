// Differential-geometric operations on conformal metrics.
#pragma once

#include <complex>

#include "calabi/surface.hpp"

namespace calabi {

// lap0 f, the background Laplacian (half Laplace-Beltrami of g0).
ScalarField laplace0(const ScalarField& f);

// lap_g f = exp(-2u) lap0 f.
ScalarField laplace_g(const ConformalMetric& g, const ScalarField& f);

// Gauss curvature K = (K0 - 2 lap0 u) exp(-2u).
ScalarField gauss_curvature(const ConformalMetric& g);

// Pointwise |grad f|^2_g and (grad f, grad h)_g.
ScalarField grad_norm_sq(const ConformalMetric& g, const ScalarField& f);
ScalarField grad_inner(const ConformalMetric& g, const ScalarField& f,
                       const ScalarField& h);

// int f dg and int f dg0.
double integrate(const ConformalMetric& g, const ScalarField& f);
double integrate0(const ScalarField& f);

// f_,zz = d^2f/dz^2 - (df/dz)(d log F/dz) in the global torus frame,
// F = exp(2u). Sphere input is rejected.
TensorField2 lichnerowicz(const ConformalMetric& g, const ScalarField& f);

// Pointwise |L(f)|^2_g = 4 |f_,zz|^2 exp(-4u); frame independent.
ScalarField tensor_norm_sq(const ConformalMetric& g, const TensorField2& t);

// Moebius transformation w -> (a w + b) / (c w + d) of the extended plane,
// acting on the sphere through stereographic projection from the north pole.
struct MobiusMap {
    std::complex<double> a{1.0, 0.0};
    std::complex<double> b{0.0, 0.0};
    std::complex<double> c{0.0, 0.0};
    std::complex<double> d{1.0, 0.0};

    static MobiusMap dilation(double lambda) {
        return {{lambda, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    }
};

// Pullback pi* g of a sphere metric: new conformal factor on the same mesh,
// resampled by barycentric interpolation after mapping vertices.
ConformalMetric mobius_pullback(const ConformalMetric& g, const MobiusMap& map);

// Stereographic image of a mesh vertex direction (projection from (0,0,1)).
std::complex<double> stereographic(const Eigen::Vector3d& dir);

// Conformal stretch of `map` relative to the round metric, evaluated at w:
// sigma = |m'(w)|^2 (1+|w|^2)^2 / (1+|m(w)|^2)^2.
double mobius_conformal_stretch(const MobiusMap& map, std::complex<double> w);

} // namespace calabi
