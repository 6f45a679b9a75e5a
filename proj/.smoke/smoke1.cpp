#include <cstdio>
#include <cmath>
#include "calabi/ops.hpp"

using namespace calabi;
static constexpr double PI = 3.141592653589793238462643383279;

int main() {
    // --- torus ---
    auto torus = make_torus(1.0, 1.0, 64, 64);
    const auto* T = dynamic_cast<const TorusSurface*>(torus.get());
    int n = torus->node_count();
    ArrayXd f(n), u(n);
    for (int i = 0; i < n; ++i) {
        f[i] = std::sin(2 * PI * T->node_x(i));
        u[i] = 0.01 * std::cos(2 * PI * T->node_x(i));
    }
    ScalarField F{torus, f};
    auto lf = laplace0(F);
    double expected = -0.5 * (2 * PI) * (2 * PI);
    double err = 0;
    for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(lf.values[i] - expected * f[i]));
    printf("torus laplace0 closed-form err: %.3e\n", err);

    ConformalMetric g(torus, u);
    printf("torus area(u=0.01cos): %.10f (expect ~1.0001)\n", g.area());
    auto K = gauss_curvature(g);
    printf("torus max|K|: %.6f (expect ~0.3948 + O(a^2) -> 0.4028)\n",
           K.values.abs().maxCoeff());
    double gb = integrate(g, K);
    printf("torus Gauss-Bonnet: %.3e (expect 0)\n", gb);

    // conformal invariance
    ScalarField one{torus, ArrayXd::Ones(n)};
    auto gg = grad_norm_sq(g, F);
    double ig = integrate(g, gg);
    double i0 = torus->integrate0(torus->grad_inner0(f, f));
    printf("conformal invariance: %.3e  (int=%.6f expect %.6f)\n",
           std::abs(ig - i0), ig, 0.5 * (2 * PI) * (2 * PI));

    // poisson roundtrip
    ArrayXd rho = torus->laplace0(u);
    ArrayXd back = torus->poisson0(rho);
    printf("torus poisson roundtrip err: %.3e\n",
           (back - (u - torus->mean0(u))).abs().maxCoeff());

    // lichnerowicz identity on random-ish smooth u
    ArrayXd u2(n);
    for (int i = 0; i < n; ++i) {
        double x = T->node_x(i), y = T->node_y(i);
        u2[i] = 0.05 * std::cos(2 * PI * x) * std::sin(2 * PI * y) +
                0.03 * std::sin(2 * PI * (x + 2 * y));
    }
    ConformalMetric g2(torus, u2);
    auto K2 = gauss_curvature(g2);
    auto L = lichnerowicz(g2, K2);
    auto Ln = tensor_norm_sq(g2, L);
    double lhs = integrate(g2, Ln);
    auto dgk = laplace_g(g2, K2);
    ScalarField dgk2{torus, dgk.values * dgk.values};
    auto gK = grad_norm_sq(g2, K2);
    ScalarField kgk{torus, K2.values * gK.values};
    double rhs = integrate(g2, dgk2) - 0.5 * integrate(g2, kgk);
    printf("lichnerowicz identity: lhs=%.8e rhs=%.8e rel=%.3e\n", lhs, rhs,
           std::abs(lhs - rhs) / std::abs(lhs));

    // --- sphere ---
    auto sph = make_sphere(4);
    const auto* S = dynamic_cast<const SphereSurface*>(sph.get());
    int m = sph->node_count();
    printf("sphere L4: %d verts, area0=%.8f (4pi=%.8f, rel def %.2e)\n", m,
           sph->background_area(), 4 * PI,
           (4 * PI - sph->background_area()) / (4 * PI));
    ArrayXd z(m);
    for (int i = 0; i < m; ++i) z[i] = S->vertices()(2, i);
    ArrayXd lz = sph->laplace0(z);
    double rel = std::sqrt(sph->integrate0((lz + z).square()) /
                           sph->integrate0(z.square()));
    printf("sphere laplace0(z) ~ -z rel L2 err: %.3e\n", rel);

    ConformalMetric gs(sph);
    auto Ks = gauss_curvature(gs);
    printf("sphere round K max dev from 1: %.3e\n",
           (Ks.values - 1.0).abs().maxCoeff());
    printf("sphere GB: %.8f expect %.8f\n", integrate(gs, Ks), 4 * PI);

    // Mobius identity + dilation
    auto gid = mobius_pullback(gs, MobiusMap{});
    printf("mobius identity max|du|: %.3e\n", (gid.u() - gs.u()).abs().maxCoeff());
    auto gd = mobius_pullback(gs, MobiusMap::dilation(4.0));
    printf("mobius dil4 area: %.6f expect ~%.6f (4pi)\n", gd.area(), 4 * PI);
    // disk area |w|<1 <-> z<0
    double disk = 0;
    for (int i = 0; i < m; ++i)
        if (S->vertices()(2, i) < 0)
            disk += gd.density()[i] * sph->node_weights()[i];
    printf("mobius dil4 disk area: %.6f expect %.6f\n", disk,
           4 * PI * 16.0 / 17.0);
    auto Kd = gauss_curvature(gd);
    printf("mobius dil4 K dev: maxabs=%.3e\n", (Kd.values - 1.0).abs().maxCoeff());
    double ca = 0;
    for (int i = 0; i < m; ++i) {
        double dk = Kd.values[i] - 2 * PI * 2 * 2 / gd.area();
        ca += dk * dk * gd.density()[i] * sph->node_weights()[i];
    }
    printf("mobius dil4 Ca: %.3e\n", ca);

    // sphere poisson
    ArrayXd rr = sph->laplace0(z * z);
    ArrayXd bb = sph->poisson0(rr);
    ArrayXd zz = z * z;
    printf("sphere poisson roundtrip err: %.3e\n",
           (bb - (zz - sph->mean0(zz))).abs().maxCoeff());

    // sphere biharmonic solve sanity: (I + gamma lap^2)x = x0 with x0 = z
    ArrayXd sol = sph->biharmonic_solve(0.1, z);
    // eigenvalue of lap0 on l=1: -1 -> lap^2 = 1 -> x ~ z / (1+0.1)
    printf("sphere biharm l=1 err: %.3e\n",
           (sol - z / 1.1).abs().maxCoeff());
    return 0;
}
