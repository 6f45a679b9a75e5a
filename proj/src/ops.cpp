#include "calabi/ops.hpp"

#include <cmath>

namespace calabi {

ScalarField laplace0(const ScalarField& f) {
    return {f.surface, f.surface->laplace0(f.values)};
}

ScalarField laplace_g(const ConformalMetric& g, const ScalarField& f) {
    require_same_surface(g.surface(), f.surface, "laplace_g");
    return {f.surface, g.surface()->laplace0(f.values) / g.density()};
}

ScalarField gauss_curvature(const ConformalMetric& g) {
    const Surface& s = *g.surface();
    ArrayXd k = (s.background_curvature() - 2.0 * s.laplace0(g.u())) / g.density();
    return {g.surface(), std::move(k)};
}

ScalarField grad_norm_sq(const ConformalMetric& g, const ScalarField& f) {
    require_same_surface(g.surface(), f.surface, "grad_norm_sq");
    return {f.surface, g.surface()->grad_inner0(f.values, f.values) / g.density()};
}

ScalarField grad_inner(const ConformalMetric& g, const ScalarField& f,
                       const ScalarField& h) {
    require_same_surface(g.surface(), f.surface, "grad_inner");
    require_same_surface(f.surface, h.surface, "grad_inner");
    return {f.surface, g.surface()->grad_inner0(f.values, h.values) / g.density()};
}

double integrate(const ConformalMetric& g, const ScalarField& f) {
    require_same_surface(g.surface(), f.surface, "integrate");
    return g.surface()->integrate0(f.values * g.density());
}

double integrate0(const ScalarField& f) {
    return f.surface->integrate0(f.values);
}

TensorField2 lichnerowicz(const ConformalMetric& g, const ScalarField& f) {
    require_same_surface(g.surface(), f.surface, "lichnerowicz");
    const auto* torus = dynamic_cast<const TorusSurface*>(g.surface().get());
    if (!torus)
        throw UnsupportedOperation("lichnerowicz is implemented on the torus only");

    // z = x + iy; d/dz = (d/dx - i d/dy)/2. With F = exp(2u):
    //   f_,zz = f_zz - 2 u_z f_z.
    const ArrayXd fx = torus->deriv_x(f.values);
    const ArrayXd fy = torus->deriv_y(f.values);
    const ArrayXd ux = torus->deriv_x(g.u());
    const ArrayXd uy = torus->deriv_y(g.u());
    const ArrayXd fxx = torus->deriv_xx(f.values);
    const ArrayXd fyy = torus->deriv_yy(f.values);
    const ArrayXd fxy = torus->deriv_xy(f.values);

    ArrayXcd out(f.values.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const std::complex<double> fz(0.5 * fx[i], -0.5 * fy[i]);
        const std::complex<double> uz(0.5 * ux[i], -0.5 * uy[i]);
        const std::complex<double> fzz(0.25 * (fxx[i] - fyy[i]), -0.5 * fxy[i]);
        out[i] = fzz - 2.0 * uz * fz;
    }
    return {f.surface, std::move(out)};
}

ScalarField tensor_norm_sq(const ConformalMetric& g, const TensorField2& t) {
    require_same_surface(g.surface(), t.surface, "tensor_norm_sq");
    ArrayXd n = 4.0 * t.values.abs2() / (g.density() * g.density());
    return {t.surface, std::move(n)};
}

std::complex<double> stereographic(const Eigen::Vector3d& dir) {
    const double denom = std::max(1.0 - dir.z(), 1e-14);
    return {dir.x() / denom, dir.y() / denom};
}

namespace {
// Homogeneous stereographic coordinates (w1 : w0), w = w1/w0, smooth at
// both poles: pick the representation whose denominator stays away from 0.
struct HomCoord {
    std::complex<double> w1, w0;
};

HomCoord hom_stereographic(const Eigen::Vector3d& p) {
    const std::complex<double> xy(p.x(), p.y());
    if (p.z() <= 0.0) return {xy, {1.0 - p.z(), 0.0}};
    return {{1.0 + p.z(), 0.0}, std::conj(xy)};
}

Eigen::Vector3d hom_inverse_stereographic(const HomCoord& h) {
    const double n1 = std::norm(h.w1), n0 = std::norm(h.w0);
    const double s = n1 + n0;
    const std::complex<double> cross = h.w1 * std::conj(h.w0);
    return {2.0 * cross.real() / s, 2.0 * cross.imag() / s, (n1 - n0) / s};
}
} // namespace

double mobius_conformal_stretch(const MobiusMap& m, std::complex<double> w) {
    const std::complex<double> det = m.a * m.d - m.b * m.c;
    const HomCoord h{w, {1.0, 0.0}};
    const HomCoord hm{m.a * h.w1 + m.b * h.w0, m.c * h.w1 + m.d * h.w0};
    const double ratio = std::abs(det) * (std::norm(h.w1) + std::norm(h.w0)) /
                         (std::norm(hm.w1) + std::norm(hm.w0));
    return ratio * ratio;
}

ConformalMetric mobius_pullback(const ConformalMetric& g, const MobiusMap& m) {
    const auto* sphere = dynamic_cast<const SphereSurface*>(g.surface().get());
    if (!sphere)
        throw UnsupportedOperation("mobius_pullback is defined on the sphere only");
    const std::complex<double> det = m.a * m.d - m.b * m.c;
    const double scale = std::abs(m.a) * std::abs(m.d) + std::abs(m.b) * std::abs(m.c);
    if (std::abs(det) <= 1e-12 * std::max(scale, 1e-300))
        throw InvalidArgument("mobius_pullback: degenerate map (ad - bc ~ 0)");

    const auto& verts = sphere->vertices();
    ArrayXd unew(verts.cols());
    for (Eigen::Index i = 0; i < verts.cols(); ++i) {
        const HomCoord h = hom_stereographic(verts.col(i));
        const HomCoord hm{m.a * h.w1 + m.b * h.w0, m.c * h.w1 + m.d * h.w0};
        const Eigen::Vector3d target = hom_inverse_stereographic(hm);
        const double u_at = sphere->interpolate(target, g.u());
        const double ratio = std::abs(det) *
                             (std::norm(h.w1) + std::norm(h.w0)) /
                             (std::norm(hm.w1) + std::norm(hm.w0));
        unew[i] = u_at + std::log(ratio);
    }
    return ConformalMetric(g.surface(), std::move(unew));
}

} // namespace calabi
