// Discretized surfaces (periodic torus grid, icosphere mesh), conformal
// metrics, and the background differential operators everything else is
// built from.
//
// Conventions, fixed once for the whole project:
//   * the Laplacian is half the real Laplace-Beltrami operator,
//     lap0 = (1/2) lap_LB(g0), lap_g = exp(-2u) lap0;
//   * gradients and |grad f|^2 are the ordinary real ones;
//   * Green identity: int f lap_g h dg = -(1/2) int (grad f, grad h)_g dg.
// Under these, the Gauss curvature of g = exp(2u) g0 is
// K = (K0 - 2 lap0 u) exp(-2u), the round unit sphere has eigenvalues
// 1, 3, ... for -lap_g, and Gauss-Bonnet reads int K dg = 2 pi chi(M).
#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "calabi/errors.hpp"

namespace calabi {

using Eigen::ArrayXd;
using Eigen::ArrayXcd;

enum class Topology { Torus, Sphere };

struct SurfaceSpec {
    Topology topology = Topology::Torus;
    // Torus parameters.
    double lx = 1.0;
    double ly = 1.0;
    int nx = 0;
    int ny = 0;
    bool dealias = false; // 2/3-rule filter on nonlinear flow terms (torus)
    // Sphere parameters.
    int subdivision = 0; // icosphere refinement level

    bool operator==(const SurfaceSpec&) const = default;
};

class Surface;
using SurfacePtr = std::shared_ptr<const Surface>;

class Surface : public std::enable_shared_from_this<Surface> {
public:
    virtual ~Surface() = default;

    Topology topology() const { return spec_.topology; }
    const SurfaceSpec& spec() const { return spec_; }
    int node_count() const { return static_cast<int>(weights_.size()); }
    double background_area() const { return area0_; }
    double background_curvature() const { return k0_; }
    int euler_characteristic() const {
        return spec_.topology == Topology::Sphere ? 2 : 0;
    }
    // g0 quadrature weights per node; integrate0(f) = sum(f * weights).
    const ArrayXd& node_weights() const { return weights_; }

    double integrate0(const ArrayXd& f) const { return (f * weights_).sum(); }
    double mean0(const ArrayXd& f) const { return integrate0(f) / area0_; }

    // lap0 f (half Laplace-Beltrami of the background metric).
    virtual ArrayXd laplace0(const ArrayXd& f) const = 0;

    // Pointwise (grad f, grad h) with respect to g0.
    virtual ArrayXd grad_inner0(const ArrayXd& f, const ArrayXd& h) const = 0;

    // Solves lap0 phi = rho - mean0(rho) with mean0(phi) = 0.
    virtual ArrayXd poisson0(const ArrayXd& rho) const = 0;

    // Solves (I + gamma lap0^2) x = rhs; gamma >= 0.
    virtual ArrayXd biharmonic_solve(double gamma, const ArrayXd& rhs) const = 0;

    // (1/2) S f where f^T S h = int (grad f, grad h) dg0.
    virtual ArrayXd half_stiffness_apply(const ArrayXd& f) const = 0;

    // Returns b -> x solving ((1/2) S + shift diag(mass)) x = b. The solver
    // owns any factorization; solves are deterministic.
    virtual std::function<ArrayXd(const ArrayXd&)>
    make_shifted_solver(const ArrayXd& mass, double shift) const = 0;

    // Background geodesic distance from node `center` to every node.
    virtual ArrayXd geodesic_distance_from(int center) const = 0;

    // Largest radius at which background geodesic balls are sensible.
    virtual double injectivity_scale() const = 0;

protected:
    SurfaceSpec spec_;
    ArrayXd weights_;
    double area0_ = 0.0;
    double k0_ = 0.0;
};

// Uniform periodic grid on [0,Lx) x [0,Ly); all derivatives are
// pseudospectral (trigonometric interpolation via FFT). Node order is
// row-major with x fastest: index = iy*nx + ix.
class TorusSurface final : public Surface {
public:
    TorusSurface(double lx, double ly, int nx, int ny, bool dealias = false);
    ~TorusSurface() override;

    ArrayXd laplace0(const ArrayXd& f) const override;
    ArrayXd grad_inner0(const ArrayXd& f, const ArrayXd& h) const override;
    ArrayXd poisson0(const ArrayXd& rho) const override;
    ArrayXd biharmonic_solve(double gamma, const ArrayXd& rhs) const override;
    ArrayXd half_stiffness_apply(const ArrayXd& f) const override;
    std::function<ArrayXd(const ArrayXd&)>
    make_shifted_solver(const ArrayXd& mass, double shift) const override;
    ArrayXd geodesic_distance_from(int center) const override;
    double injectivity_scale() const override;

    int nx() const { return spec_.nx; }
    int ny() const { return spec_.ny; }
    double node_x(int i) const { return (i % spec_.nx) * spec_.lx / spec_.nx; }
    double node_y(int i) const { return (i / spec_.nx) * spec_.ly / spec_.ny; }

    ArrayXd deriv_x(const ArrayXd& f) const;
    ArrayXd deriv_y(const ArrayXd& f) const;
    ArrayXd deriv_xx(const ArrayXd& f) const;
    ArrayXd deriv_yy(const ArrayXd& f) const;
    ArrayXd deriv_xy(const ArrayXd& f) const;
    // Zeroes modes with |k| beyond 2/3 of the Nyquist band.
    ArrayXd dealias_23(const ArrayXd& f) const;
    bool dealias_enabled() const { return spec_.dealias; }

    // Flat-torus eigenpairs of -lap0 in closed form, used when the metric
    // weight is spatially constant.
    struct FourierMode {
        double lambda;
        int kx, ky; // harmonic indices
        int phase;  // 0 = cos, 1 = sin (x-part), 2 = sin (y-part), 3 = sin-sin
    };
    std::vector<FourierMode> flat_modes(int count) const;
    ArrayXd mode_field(const FourierMode& m) const;

private:
    struct Fft;
    std::unique_ptr<Fft> fft_;

    ArrayXd apply_multiplier(const ArrayXd& f,
                             const std::function<double(double, double)>& m,
                             bool zero_kx_nyq, bool zero_ky_nyq) const;
    ArrayXd first_derivative(const ArrayXd& f, bool along_x) const;
};

// Icosphere triangulation of the unit sphere with cotangent stiffness and
// lumped (barycentric) mass; lap0 f = -(1/2) M^-1 S f.
class SphereSurface final : public Surface {
public:
    explicit SphereSurface(int subdivision);

    ArrayXd laplace0(const ArrayXd& f) const override;
    ArrayXd grad_inner0(const ArrayXd& f, const ArrayXd& h) const override;
    ArrayXd poisson0(const ArrayXd& rho) const override;
    ArrayXd biharmonic_solve(double gamma, const ArrayXd& rhs) const override;
    ArrayXd half_stiffness_apply(const ArrayXd& f) const override;
    std::function<ArrayXd(const ArrayXd&)>
    make_shifted_solver(const ArrayXd& mass, double shift) const override;
    ArrayXd geodesic_distance_from(int center) const override;
    double injectivity_scale() const override;

    const Eigen::Matrix3Xd& vertices() const { return verts_; }
    const Eigen::Matrix3Xi& faces() const { return faces_; }
    const Eigen::SparseMatrix<double>& stiffness() const { return stiffness_; }

    // Barycentric interpolation of a vertex field at an arbitrary direction
    // (unit vector); used by the Moebius pullback.
    double interpolate(const Eigen::Vector3d& dir, const ArrayXd& f) const;

private:
    Eigen::Matrix3Xd verts_;
    Eigen::Matrix3Xi faces_;
    ArrayXd face_areas_;
    Eigen::Matrix3Xd face_grad_[3]; // gradient of hat function of corner c on each face
    Eigen::SparseMatrix<double> stiffness_;
    ArrayXd stiff_diag_;  // diag(S)
    ArrayXd biharm_diag_; // diag(S M^-1 S), Jacobi preconditioner data

    // Face lookup buckets over (z, atan2) for point location.
    std::vector<std::vector<int>> buckets_;
    int bucket_nz_ = 0, bucket_na_ = 0;
    int bucket_of(const Eigen::Vector3d& dir) const;
    int locate(const Eigen::Vector3d& dir, Eigen::Vector3d& bary) const;

    void build_mesh(int subdivision);
    void build_operators();
    void build_buckets();
};

SurfacePtr make_torus(double lx, double ly, int nx, int ny, bool dealias = false);
SurfacePtr make_sphere(int subdivision);
SurfacePtr make_surface(const SurfaceSpec& spec);

// A real-valued function sampled on the nodes of a surface.
struct ScalarField {
    SurfacePtr surface;
    ArrayXd values;

    ScalarField() = default;
    ScalarField(SurfacePtr s, ArrayXd v);
};

// g = exp(2u) g0. Immutable after construction; area is validated eagerly.
class ConformalMetric {
public:
    ConformalMetric(SurfacePtr surface, ArrayXd u);
    ConformalMetric(SurfacePtr surface)
        : ConformalMetric(surface, ArrayXd::Zero(surface->node_count())) {}

    const SurfacePtr& surface() const { return surface_; }
    const ArrayXd& u() const { return u_; }
    const ArrayXd& density() const { return e2u_; } // exp(2u)
    double area() const { return area_; }
    // Average curvature 2 pi chi / A, from topology and area, never from a
    // sample mean of K.
    double kbar() const;

private:
    SurfacePtr surface_;
    ArrayXd u_;
    ArrayXd e2u_;
    double area_ = 0.0;
};

// Pure-type second covariant derivative f_,zz per node in a fixed frame
// (torus: global z = x + iy). The pointwise norm |L(f)|^2_g is
// frame-independent.
struct TensorField2 {
    SurfacePtr surface;
    ArrayXcd values;
};

inline void require_same_surface(const SurfacePtr& a, const SurfacePtr& b,
                                 const char* what) {
    if (a.get() != b.get())
        throw ContractViolation(std::string(what) + ": fields live on different surfaces");
}

} // namespace calabi
