// Pseudospectral operators on the flat periodic torus.

#include "calabi/surface.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace calabi {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

// FFTW's planner is not thread-safe; executes on distinct buffers are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

// Plans are created once with FFTW_UNALIGNED so they can run on plain
// std::vector buffers allocated per invocation; that keeps every public
// operation re-entrant without shared scratch state.
struct TorusSurface::Fft {
    int nx = 0, ny = 0;
    fftw_plan fwd = nullptr; // r2c
    fftw_plan bwd = nullptr; // c2r

    Fft(int nx_, int ny_) : nx(nx_), ny(ny_) {
        std::vector<double> real(static_cast<size_t>(nx) * ny);
        std::vector<std::complex<double>> spec(static_cast<size_t>(ny) * (nx / 2 + 1));
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd = fftw_plan_dft_r2c_2d(ny, nx, real.data(),
                                   reinterpret_cast<fftw_complex*>(spec.data()),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd = fftw_plan_dft_c2r_2d(ny, nx,
                                   reinterpret_cast<fftw_complex*>(spec.data()),
                                   real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    ~Fft() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }

    std::vector<std::complex<double>> forward(const ArrayXd& f) const {
        std::vector<double> real(f.data(), f.data() + f.size());
        std::vector<std::complex<double>> spec(static_cast<size_t>(ny) * (nx / 2 + 1));
        fftw_execute_dft_r2c(fwd, real.data(),
                             reinterpret_cast<fftw_complex*>(spec.data()));
        return spec;
    }

    ArrayXd backward(std::vector<std::complex<double>>& spec) const {
        ArrayXd out(static_cast<Eigen::Index>(nx) * ny);
        fftw_execute_dft_c2r(bwd, reinterpret_cast<fftw_complex*>(spec.data()),
                             out.data());
        out /= static_cast<double>(nx) * ny;
        return out;
    }
};

TorusSurface::TorusSurface(double lx, double ly, int nx, int ny, bool dealias) {
    if (!(lx > 0.0) || !(ly > 0.0))
        throw InvalidArgument("torus side lengths must be positive");
    if (nx < 16 || ny < 16 || nx % 2 != 0 || ny % 2 != 0)
        throw InvalidArgument("torus grid must have even Nx, Ny >= 16");
    spec_.topology = Topology::Torus;
    spec_.lx = lx;
    spec_.ly = ly;
    spec_.nx = nx;
    spec_.ny = ny;
    spec_.dealias = dealias;
    k0_ = 0.0;
    area0_ = lx * ly;
    weights_ = ArrayXd::Constant(static_cast<Eigen::Index>(nx) * ny,
                                 (lx / nx) * (ly / ny));
    fft_ = std::make_unique<Fft>(nx, ny);
}

TorusSurface::~TorusSurface() = default;

ArrayXd TorusSurface::apply_multiplier(
    const ArrayXd& f, const std::function<double(double, double)>& m,
    bool zero_kx_nyq, bool zero_ky_nyq) const {
    const int nx = spec_.nx, ny = spec_.ny;
    const int nxh = nx / 2 + 1;
    auto spec = fft_->forward(f);
    for (int iy = 0; iy < ny; ++iy) {
        const int jy = iy <= ny / 2 ? iy : iy - ny;
        const double ky = 2.0 * kPi * jy / spec_.ly;
        for (int ix = 0; ix < nxh; ++ix) {
            const double kx = 2.0 * kPi * ix / spec_.lx;
            double mult = m(kx, ky);
            if (zero_kx_nyq && ix == nx / 2) mult = 0.0;
            if (zero_ky_nyq && iy == ny / 2) mult = 0.0;
            spec[static_cast<size_t>(iy) * nxh + ix] *= mult;
        }
    }
    return fft_->backward(spec);
}

ArrayXd TorusSurface::laplace0(const ArrayXd& f) const {
    return apply_multiplier(
        f, [](double kx, double ky) { return -0.5 * (kx * kx + ky * ky); },
        false, false);
}

// First derivatives need a complex multiplier; done directly.
ArrayXd TorusSurface::first_derivative(const ArrayXd& f, bool along_x) const {
    const int nx = spec_.nx, ny = spec_.ny;
    const int nxh = nx / 2 + 1;
    auto spec = fft_->forward(f);
    for (int iy = 0; iy < ny; ++iy) {
        const int jy = iy <= ny / 2 ? iy : iy - ny;
        const double ky = 2.0 * kPi * jy / spec_.ly;
        for (int ix = 0; ix < nxh; ++ix) {
            const double kx = 2.0 * kPi * ix / spec_.lx;
            double k = along_x ? kx : ky;
            if (along_x && ix == nx / 2) k = 0.0;
            if (!along_x && iy == ny / 2) k = 0.0;
            spec[static_cast<size_t>(iy) * nxh + ix] *= std::complex<double>(0.0, k);
        }
    }
    return fft_->backward(spec);
}

ArrayXd TorusSurface::deriv_x(const ArrayXd& f) const {
    return first_derivative(f, true);
}

ArrayXd TorusSurface::deriv_y(const ArrayXd& f) const {
    return first_derivative(f, false);
}

ArrayXd TorusSurface::deriv_xx(const ArrayXd& f) const {
    return apply_multiplier(f, [](double kx, double) { return -kx * kx; },
                            false, false);
}

ArrayXd TorusSurface::deriv_yy(const ArrayXd& f) const {
    return apply_multiplier(f, [](double, double ky) { return -ky * ky; },
                            false, false);
}

ArrayXd TorusSurface::deriv_xy(const ArrayXd& f) const {
    // Odd in each index: drop both Nyquist lines.
    return apply_multiplier(f, [](double kx, double ky) { return -kx * ky; },
                            true, true);
}

ArrayXd TorusSurface::dealias_23(const ArrayXd& f) const {
    const int cx = spec_.nx / 3, cy = spec_.ny / 3;
    const int nxh = spec_.nx / 2 + 1;
    auto spec = fft_->forward(f);
    for (int iy = 0; iy < spec_.ny; ++iy) {
        const int jy = iy <= spec_.ny / 2 ? iy : iy - spec_.ny;
        for (int ix = 0; ix < nxh; ++ix) {
            if (ix > cx || std::abs(jy) > cy)
                spec[static_cast<size_t>(iy) * nxh + ix] = 0.0;
        }
    }
    return fft_->backward(spec);
}

ArrayXd TorusSurface::grad_inner0(const ArrayXd& f, const ArrayXd& h) const {
    if (f.size() != h.size() || f.size() != weights_.size())
        throw ContractViolation("grad_inner0: size mismatch");
    if (&f == &h) {
        const ArrayXd fx = deriv_x(f), fy = deriv_y(f);
        return fx * fx + fy * fy;
    }
    return deriv_x(f) * deriv_x(h) + deriv_y(f) * deriv_y(h);
}

ArrayXd TorusSurface::poisson0(const ArrayXd& rho) const {
    const int nx = spec_.nx, ny = spec_.ny;
    const int nxh = nx / 2 + 1;
    auto spec = fft_->forward(rho);
    for (int iy = 0; iy < ny; ++iy) {
        const int jy = iy <= ny / 2 ? iy : iy - ny;
        const double ky = 2.0 * kPi * jy / spec_.ly;
        for (int ix = 0; ix < nxh; ++ix) {
            const double kx = 2.0 * kPi * ix / spec_.lx;
            const double lam = -0.5 * (kx * kx + ky * ky);
            auto& c = spec[static_cast<size_t>(iy) * nxh + ix];
            c = (lam == 0.0) ? 0.0 : c / lam;
        }
    }
    return fft_->backward(spec);
}

ArrayXd TorusSurface::biharmonic_solve(double gamma, const ArrayXd& rhs) const {
    const int nx = spec_.nx, ny = spec_.ny;
    const int nxh = nx / 2 + 1;
    auto spec = fft_->forward(rhs);
    for (int iy = 0; iy < ny; ++iy) {
        const int jy = iy <= ny / 2 ? iy : iy - ny;
        const double ky = 2.0 * kPi * jy / spec_.ly;
        for (int ix = 0; ix < nxh; ++ix) {
            const double kx = 2.0 * kPi * ix / spec_.lx;
            const double lam = 0.5 * (kx * kx + ky * ky); // -lap0 multiplier
            spec[static_cast<size_t>(iy) * nxh + ix] /= 1.0 + gamma * lam * lam;
        }
    }
    return fft_->backward(spec);
}

ArrayXd TorusSurface::half_stiffness_apply(const ArrayXd& f) const {
    return weights_ * (-laplace0(f));
}

std::function<ArrayXd(const ArrayXd&)>
TorusSurface::make_shifted_solver(const ArrayXd& mass, double shift) const {
    // ((1/2) S + shift M) x = b, with (1/2) S x = w .* (-lap0 x) and M
    // diagonal. Preconditioned CG; the preconditioner inverts the constant
    // mean-mass operator exactly in the transform basis.
    if (mass.size() != weights_.size())
        throw ContractViolation("make_shifted_solver: mass size mismatch");
    const ArrayXd w = weights_;
    const double mbar = mass.sum() / w.sum(); // area-weighted mean of mass ./ w
    auto self = std::static_pointer_cast<const TorusSurface>(shared_from_this());
    auto apply = [self, w, mass, shift](const ArrayXd& x) -> ArrayXd {
        return w * (-self->laplace0(x)) + shift * mass * x;
    };
    auto precond = [self, w, mbar, shift](const ArrayXd& r) -> ArrayXd {
        // Solve (-lap0 + shift*mbar) y = r ./ w spectrally.
        const int nx = self->spec().nx, ny = self->spec().ny;
        const int nxh = nx / 2 + 1;
        ArrayXd rw = r / w;
        auto spec = self->fft_->forward(rw);
        for (int iy = 0; iy < ny; ++iy) {
            const int jy = iy <= ny / 2 ? iy : iy - ny;
            const double ky = 2.0 * kPi * jy / self->spec().ly;
            for (int ix = 0; ix < nxh; ++ix) {
                const double kx = 2.0 * kPi * ix / self->spec().lx;
                const double lam = 0.5 * (kx * kx + ky * ky);
                spec[static_cast<size_t>(iy) * nxh + ix] /= lam + shift * mbar;
            }
        }
        return self->fft_->backward(spec);
    };
    return [apply, precond](const ArrayXd& b) -> ArrayXd {
        ArrayXd x = ArrayXd::Zero(b.size());
        ArrayXd r = b;
        ArrayXd z = precond(r);
        ArrayXd p = z;
        double rz = (r * z).sum();
        const double bnorm = std::sqrt((b * b).sum());
        if (bnorm == 0.0) return x;
        for (int it = 0; it < 2000; ++it) {
            const ArrayXd ap = apply(p);
            const double alpha = rz / (p * ap).sum();
            x += alpha * p;
            r -= alpha * ap;
            if (std::sqrt((r * r).sum()) <= 1e-13 * bnorm) break;
            z = precond(r);
            const double rz_new = (r * z).sum();
            p = z + (rz_new / rz) * p;
            rz = rz_new;
        }
        return x;
    };
}

ArrayXd TorusSurface::geodesic_distance_from(int center) const {
    const int nx = spec_.nx, ny = spec_.ny;
    const double cx = node_x(center), cy = node_y(center);
    ArrayXd d(weights_.size());
    for (int iy = 0; iy < ny; ++iy) {
        const double y = iy * spec_.ly / ny;
        double dy = std::abs(y - cy);
        dy = std::min(dy, spec_.ly - dy);
        for (int ix = 0; ix < nx; ++ix) {
            const double x = ix * spec_.lx / nx;
            double dx = std::abs(x - cx);
            dx = std::min(dx, spec_.lx - dx);
            d[static_cast<Eigen::Index>(iy) * nx + ix] = std::hypot(dx, dy);
        }
    }
    return d;
}

double TorusSurface::injectivity_scale() const {
    return 0.5 * std::min(spec_.lx, spec_.ly);
}

std::vector<TorusSurface::FourierMode> TorusSurface::flat_modes(int count) const {
    // Real eigenbasis of -lap0: products of cos/sin harmonics, eigenvalue
    // (1/2)((2 pi kx / Lx)^2 + (2 pi ky / Ly)^2).
    std::vector<FourierMode> modes;
    const int kmax = std::max(spec_.nx, spec_.ny) / 2 - 1;
    for (int kx = 0; kx <= kmax; ++kx) {
        for (int ky = 0; ky <= kmax; ++ky) {
            if (kx == 0 && ky == 0) continue;
            const double ax = 2.0 * kPi * kx / spec_.lx;
            const double ay = 2.0 * kPi * ky / spec_.ly;
            const double lambda = 0.5 * (ax * ax + ay * ay);
            // cos*cos, sin*cos, cos*sin, sin*sin as applicable
            modes.push_back({lambda, kx, ky, 0});
            if (kx > 0) modes.push_back({lambda, kx, ky, 1});
            if (ky > 0) modes.push_back({lambda, kx, ky, 2});
            if (kx > 0 && ky > 0) modes.push_back({lambda, kx, ky, 3});
        }
    }
    std::stable_sort(modes.begin(), modes.end(),
                     [](const FourierMode& a, const FourierMode& b) {
                         return a.lambda < b.lambda;
                     });
    if (static_cast<int>(modes.size()) > count) modes.resize(count);
    return modes;
}

ArrayXd TorusSurface::mode_field(const FourierMode& m) const {
    ArrayXd f(weights_.size());
    for (int i = 0; i < f.size(); ++i) {
        const double ax = 2.0 * kPi * m.kx * node_x(i) / spec_.lx;
        const double ay = 2.0 * kPi * m.ky * node_y(i) / spec_.ly;
        const double px = (m.phase == 1 || m.phase == 3) ? std::sin(ax) : std::cos(ax);
        const double py = (m.phase == 2 || m.phase == 3) ? std::sin(ay) : std::cos(ay);
        f[i] = px * py;
    }
    return f;
}

SurfacePtr make_torus(double lx, double ly, int nx, int ny, bool dealias) {
    return std::make_shared<TorusSurface>(lx, ly, nx, ny, dealias);
}

SurfacePtr make_sphere(int subdivision) {
    return std::make_shared<SphereSurface>(subdivision);
}

SurfacePtr make_surface(const SurfaceSpec& spec) {
    if (spec.topology == Topology::Torus)
        return make_torus(spec.lx, spec.ly, spec.nx, spec.ny, spec.dealias);
    return make_sphere(spec.subdivision);
}

ScalarField::ScalarField(SurfacePtr s, ArrayXd v)
    : surface(std::move(s)), values(std::move(v)) {
    if (!surface) throw ContractViolation("ScalarField: null surface");
    if (values.size() != surface->node_count())
        throw ContractViolation("ScalarField: value count != node count");
    if (!values.isFinite().all())
        throw ContractViolation("ScalarField: non-finite values");
}

ConformalMetric::ConformalMetric(SurfacePtr surface, ArrayXd u)
    : surface_(std::move(surface)), u_(std::move(u)) {
    if (!surface_) throw ContractViolation("ConformalMetric: null surface");
    if (u_.size() != surface_->node_count())
        throw ContractViolation("ConformalMetric: u size != node count");
    if (!u_.isFinite().all())
        throw ContractViolation("ConformalMetric: non-finite u");
    e2u_ = (2.0 * u_).exp();
    area_ = surface_->integrate0(e2u_);
    if (!std::isfinite(area_) || area_ <= 0.0)
        throw ContractViolation("ConformalMetric: invalid area");
}

double ConformalMetric::kbar() const {
    return 2.0 * kPi * surface_->euler_characteristic() / area_;
}

} // namespace calabi
