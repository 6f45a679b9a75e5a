#include <cstdio>
#include <cmath>
#include "calabi/ops.hpp"

using namespace calabi;
static constexpr double PI = 3.141592653589793238462643383279;

int main(int argc, char** argv) {
    int level = argc > 1 ? atoi(argv[1]) : 5;
    double lam = argc > 2 ? atof(argv[2]) : 1.3;

    auto sph = make_sphere(level);
    const auto* S = dynamic_cast<const SphereSurface*>(sph.get());
    int m = sph->node_count();
    printf("L%d: %d verts\n", level, m);

    // Rayleigh quotient of exact l=1, l=2 harmonics
    ArrayXd z(m), xy(m);
    for (int i = 0; i < m; ++i) {
        z[i] = S->vertices()(2, i);
        xy[i] = S->vertices()(0, i) * S->vertices()(1, i);
    }
    auto rayleigh = [&](const ArrayXd& f) {
        ArrayXd sf = sph->half_stiffness_apply(f);
        double num = (f * sf).sum();
        double den = sph->integrate0(f * f);
        return num / den;
    };
    printf("Rayleigh l=1 (expect 1): %.6f  l=2 (expect 3): %.6f\n",
           rayleigh(z), rayleigh(xy));

    // Mobius pullback with modest dilation
    ConformalMetric gs(sph);
    auto gd = mobius_pullback(gs, MobiusMap::dilation(lam));
    auto Kd = gauss_curvature(gd);
    double kbar = gd.kbar();
    ScalarField dk{sph, Kd.values - kbar};
    double ca = integrate(gd, {sph, dk.values * dk.values});
    printf("mobius lam=%.2f: Kdev max=%.3e  Ca=%.3e  area rel err=%.2e\n", lam,
           (Kd.values - 1.0).abs().maxCoeff(), ca,
           std::abs(gd.area() - gs.area()) / gs.area());

    // Bubble profile lam=50 quadrature quality
    double lb = 50.0;
    ArrayXd ub(m);
    for (int i = 0; i < m; ++i) {
        std::complex<double> w = stereographic(S->vertices().col(i));
        ub[i] = std::log(mobius_conformal_stretch(MobiusMap::dilation(lb), w)) / 2.0;
    }
    ConformalMetric gb(sph, ub);
    printf("bubble lam=50 total area: %.6f (4pi = %.6f, rel %.2e)\n", gb.area(),
           4 * PI, std::abs(gb.area() - 4 * PI) / (4 * PI));
    // local area + energy around south pole within eps=0.6
    int south = 0;
    double bz = 1e9;
    for (int i = 0; i < m; ++i)
        if (S->vertices()(2, i) < bz) { bz = S->vertices()(2, i); south = i; }
    ArrayXd dist = sph->geodesic_distance_from(south);
    auto Kb = gauss_curvature(gb);
    double eps = 0.6, A = 0, E = 0;
    for (int i = 0; i < m; ++i) {
        double r = dist[i];
        double eta = r <= eps / 2 ? 1.0 : (r >= eps ? 0.0 : 0.0);
        if (r > eps / 2 && r < eps) {
            double t = (r - eps / 2) / (eps / 2);
            eta = 1.0 - t * t * (3 - 2 * t);
        }
        A += eta * gb.density()[i] * sph->node_weights()[i];
        if (r < eps)
            E += Kb.values[i] * Kb.values[i] * gb.density()[i] * sph->node_weights()[i];
    }
    printf("bubble: A_eps=%.6f E_eps=%.6f  E*A=%.6f  16pi^2=%.6f  rel=%.3f%%\n",
           A, E, E * A, 16 * PI * PI, 100 * (E * A - 16 * PI * PI) / (16 * PI * PI));
    return 0;
}
