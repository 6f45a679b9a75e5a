// Icosphere mesh and cotangent-weight operators for the unit sphere.

#include "calabi/surface.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace calabi {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
} // namespace

void SphereSurface::build_mesh(int subdivision) {
    const double p = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> vs = {
        {-1, p, 0}, {1, p, 0},   {-1, -p, 0}, {1, -p, 0},
        {0, -1, p}, {0, 1, p},   {0, -1, -p}, {0, 1, -p},
        {p, 0, -1}, {p, 0, 1},   {-p, 0, -1}, {-p, 0, 1},
    };
    for (auto& v : vs) v.normalize();
    std::vector<std::array<int, 3>> fs = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };

    for (int level = 0; level < subdivision; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Eigen::Vector3d m = (vs[a] + vs[b]).normalized();
            vs.push_back(m);
            const int idx = static_cast<int>(vs.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(fs.size() * 4);
        for (const auto& f : fs) {
            const int a = mid(f[0], f[1]);
            const int b = mid(f[1], f[2]);
            const int c = mid(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        fs = std::move(next);
    }

    verts_.resize(3, static_cast<Eigen::Index>(vs.size()));
    for (size_t i = 0; i < vs.size(); ++i) verts_.col(i) = vs[i];
    faces_.resize(3, static_cast<Eigen::Index>(fs.size()));
    for (size_t i = 0; i < fs.size(); ++i)
        faces_.col(i) << fs[i][0], fs[i][1], fs[i][2];

    // Closed orientable triangulation check: V - E + F = 2.
    const long v = verts_.cols(), f = faces_.cols();
    const long e = 3 * f / 2;
    if (v - e + f != 2)
        throw ContractViolation("icosphere mesh is not a closed genus-0 triangulation");
}

void SphereSurface::build_operators() {
    const int nv = static_cast<int>(verts_.cols());
    const int nf = static_cast<int>(faces_.cols());
    face_areas_.resize(nf);
    for (int c = 0; c < 3; ++c) face_grad_[c].resize(3, nf);

    ArrayXd mass = ArrayXd::Zero(nv);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(nf) * 9);
    for (int t = 0; t < nf; ++t) {
        const Eigen::Vector3d p0 = verts_.col(faces_(0, t));
        const Eigen::Vector3d p1 = verts_.col(faces_(1, t));
        const Eigen::Vector3d p2 = verts_.col(faces_(2, t));
        const Eigen::Vector3d n = (p1 - p0).cross(p2 - p0);
        const double a2 = n.norm();
        const double area = 0.5 * a2;
        face_areas_[t] = area;
        const Eigen::Vector3d nh = n / a2;
        const Eigen::Vector3d g0 = nh.cross(p2 - p1) / a2;
        const Eigen::Vector3d g1 = nh.cross(p0 - p2) / a2;
        const Eigen::Vector3d g2 = nh.cross(p1 - p0) / a2;
        face_grad_[0].col(t) = g0;
        face_grad_[1].col(t) = g1;
        face_grad_[2].col(t) = g2;
        const Eigen::Vector3d g[3] = {g0, g1, g2};
        for (int i = 0; i < 3; ++i) {
            mass[faces_(i, t)] += area / 3.0;
            for (int j = 0; j < 3; ++j)
                trips.emplace_back(faces_(i, t), faces_(j, t),
                                   area * g[i].dot(g[j]));
        }
    }
    stiffness_.resize(nv, nv);
    stiffness_.setFromTriplets(trips.begin(), trips.end());
    stiffness_.makeCompressed();

    weights_ = mass;
    area0_ = mass.sum();
    k0_ = 1.0;

    stiff_diag_ = stiffness_.diagonal().array();
    biharm_diag_ = ArrayXd::Zero(nv);
    for (int col = 0; col < stiffness_.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(stiffness_, col); it; ++it)
            biharm_diag_[it.row()] += it.value() * it.value() / mass[col];
}

void SphereSurface::build_buckets() {
    const int nf = static_cast<int>(faces_.cols());
    bucket_nz_ = std::max(4, static_cast<int>(std::sqrt(nf / 4.0)));
    bucket_na_ = 2 * bucket_nz_;
    buckets_.assign(static_cast<size_t>(bucket_nz_) * bucket_na_, {});
    for (int t = 0; t < nf; ++t) {
        double zmin = 1.0, zmax = -1.0;
        for (int c = 0; c < 3; ++c) {
            const double z = verts_(2, faces_(c, t));
            zmin = std::min(zmin, z);
            zmax = std::max(zmax, z);
        }
        // One-bucket margin absorbs curvature of the spherical triangle.
        int iz0 = static_cast<int>((zmin + 1.0) / 2.0 * bucket_nz_) - 1;
        int iz1 = static_cast<int>((zmax + 1.0) / 2.0 * bucket_nz_) + 1;
        iz0 = std::clamp(iz0, 0, bucket_nz_ - 1);
        iz1 = std::clamp(iz1, 0, bucket_nz_ - 1);

        double amin = kPi, amax = -kPi;
        bool near_pole = zmax > 0.99 || zmin < -0.99;
        for (int c = 0; c < 3; ++c) {
            const Eigen::Vector3d p = verts_.col(faces_(c, t));
            const double a = std::atan2(p.y(), p.x());
            amin = std::min(amin, a);
            amax = std::max(amax, a);
        }
        const bool wraps = (amax - amin) > kPi;
        for (int iz = iz0; iz <= iz1; ++iz) {
            if (near_pole || wraps) {
                for (int ia = 0; ia < bucket_na_; ++ia)
                    buckets_[static_cast<size_t>(iz) * bucket_na_ + ia].push_back(t);
                continue;
            }
            int ia0 = static_cast<int>((amin + kPi) / (2.0 * kPi) * bucket_na_) - 1;
            int ia1 = static_cast<int>((amax + kPi) / (2.0 * kPi) * bucket_na_) + 1;
            for (int ia = ia0; ia <= ia1; ++ia) {
                const int w = (ia % bucket_na_ + bucket_na_) % bucket_na_;
                buckets_[static_cast<size_t>(iz) * bucket_na_ + w].push_back(t);
            }
        }
    }
}

SphereSurface::SphereSurface(int subdivision) {
    if (subdivision < 0 || subdivision > 9)
        throw InvalidArgument("icosphere subdivision level must be in [0, 9]");
    spec_.topology = Topology::Sphere;
    spec_.subdivision = subdivision;
    build_mesh(subdivision);
    build_operators();
    build_buckets();
}

ArrayXd SphereSurface::laplace0(const ArrayXd& f) const {
    if (f.size() != weights_.size())
        throw ContractViolation("laplace0: size mismatch");
    Eigen::VectorXd sf = stiffness_ * f.matrix();
    return -0.5 * sf.array() / weights_;
}

ArrayXd SphereSurface::grad_inner0(const ArrayXd& f, const ArrayXd& h) const {
    if (f.size() != h.size() || f.size() != weights_.size())
        throw ContractViolation("grad_inner0: size mismatch");
    const int nf = static_cast<int>(faces_.cols());
    ArrayXd acc = ArrayXd::Zero(weights_.size());
    for (int t = 0; t < nf; ++t) {
        const int i0 = faces_(0, t), i1 = faces_(1, t), i2 = faces_(2, t);
        const Eigen::Vector3d gf = f[i0] * face_grad_[0].col(t) +
                                   f[i1] * face_grad_[1].col(t) +
                                   f[i2] * face_grad_[2].col(t);
        const Eigen::Vector3d gh = h[i0] * face_grad_[0].col(t) +
                                   h[i1] * face_grad_[1].col(t) +
                                   h[i2] * face_grad_[2].col(t);
        const double val = gf.dot(gh) * face_areas_[t] / 3.0;
        acc[i0] += val;
        acc[i1] += val;
        acc[i2] += val;
    }
    return acc / weights_;
}

ArrayXd SphereSurface::poisson0(const ArrayXd& rho) const {
    if (rho.size() != weights_.size())
        throw ContractViolation("poisson0: size mismatch");
    // lap0 phi = rho - mean  <=>  S phi = -2 M (rho - mean). Jacobi-PCG on
    // the singular consistent system, iterates kept mean-free.
    const ArrayXd rt = rho - mean0(rho);
    ArrayXd b = -2.0 * weights_ * rt;
    b -= b.mean(); // consistency against roundoff
    const double bnorm = std::sqrt((b * b).sum());
    ArrayXd x = ArrayXd::Zero(b.size());
    if (bnorm == 0.0) return x;

    const ArrayXd& diag = stiff_diag_;

    ArrayXd r = b;
    ArrayXd z = r / diag;
    z -= z.mean();
    ArrayXd p = z;
    double rz = (r * z).sum();
    const int maxit = 200 + 40 * static_cast<int>(std::sqrt(double(b.size())));
    for (int it = 0; it < maxit; ++it) {
        const ArrayXd ap = (stiffness_ * p.matrix()).array();
        const double alpha = rz / (p * ap).sum();
        x += alpha * p;
        r -= alpha * ap;
        if (std::sqrt((r * r).sum()) <= 1e-12 * bnorm) break;
        z = r / diag;
        z -= z.mean();
        const double rz_new = (r * z).sum();
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    return x - mean0(x);
}

ArrayXd SphereSurface::biharmonic_solve(double gamma, const ArrayXd& rhs) const {
    if (rhs.size() != weights_.size())
        throw ContractViolation("biharmonic_solve: size mismatch");
    if (gamma == 0.0) return rhs;
    // (M + (gamma/4) S M^-1 S) x = M rhs, Jacobi-PCG at 1e-10 relative.
    const double q = 0.25 * gamma;
    const ArrayXd b = weights_ * rhs;
    const ArrayXd diag = weights_ + q * biharm_diag_;
    auto apply = [&](const ArrayXd& x) -> ArrayXd {
        Eigen::VectorXd sx = stiffness_ * x.matrix();
        Eigen::VectorXd msx = (sx.array() / weights_).matrix();
        return weights_ * x + q * (stiffness_ * msx).array();
    };
    ArrayXd x = rhs; // warm start: solution is a smoothed rhs
    ArrayXd r = b - apply(x);
    const double bnorm = std::sqrt((b * b).sum());
    if (bnorm == 0.0) return ArrayXd::Zero(b.size());
    ArrayXd z = r / diag;
    ArrayXd p = z;
    double rz = (r * z).sum();
    const int maxit = 500 + 40 * static_cast<int>(std::sqrt(double(b.size())));
    for (int it = 0; it < maxit; ++it) {
        if (std::sqrt((r * r).sum()) <= 1e-10 * bnorm) break;
        const ArrayXd ap = apply(p);
        const double alpha = rz / (p * ap).sum();
        x += alpha * p;
        r -= alpha * ap;
        z = r / diag;
        const double rz_new = (r * z).sum();
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    if (!x.isFinite().all())
        throw StepFailure("biharmonic_solve: non-finite iterate");
    return x;
}

ArrayXd SphereSurface::half_stiffness_apply(const ArrayXd& f) const {
    return 0.5 * (stiffness_ * f.matrix()).array();
}

std::function<ArrayXd(const ArrayXd&)>
SphereSurface::make_shifted_solver(const ArrayXd& mass, double shift) const {
    if (mass.size() != weights_.size())
        throw ContractViolation("make_shifted_solver: mass size mismatch");
    Eigen::SparseMatrix<double> a = 0.5 * stiffness_;
    for (int i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += shift * mass[i];
    a.makeCompressed();
    auto ldlt = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    ldlt->compute(a);
    if (ldlt->info() != Eigen::Success)
        throw NumericalFailure("shifted stiffness factorization failed");
    return [ldlt](const ArrayXd& b) -> ArrayXd {
        return ldlt->solve(b.matrix()).array();
    };
}

ArrayXd SphereSurface::geodesic_distance_from(int center) const {
    const Eigen::Vector3d c = verts_.col(center);
    ArrayXd d(weights_.size());
    for (int i = 0; i < d.size(); ++i) {
        const double dot = std::clamp(c.dot(verts_.col(i)), -1.0, 1.0);
        d[i] = std::acos(dot);
    }
    return d;
}

double SphereSurface::injectivity_scale() const { return kPi; }

int SphereSurface::bucket_of(const Eigen::Vector3d& dir) const {
    int iz = static_cast<int>((dir.z() + 1.0) / 2.0 * bucket_nz_);
    iz = std::clamp(iz, 0, bucket_nz_ - 1);
    const double a = std::atan2(dir.y(), dir.x());
    int ia = static_cast<int>((a + kPi) / (2.0 * kPi) * bucket_na_);
    ia = std::clamp(ia, 0, bucket_na_ - 1);
    return iz * bucket_na_ + ia;
}

// Central-projection point location: find the face whose spherical triangle
// contains `dir`, return barycentric weights.
int SphereSurface::locate(const Eigen::Vector3d& dir, Eigen::Vector3d& bary) const {
    auto try_faces = [&](const std::vector<int>& cand, int& best,
                         Eigen::Vector3d& bw) {
        double best_min = -1e30;
        for (int t : cand) {
            Eigen::Matrix3d v;
            v.col(0) = verts_.col(faces_(0, t));
            v.col(1) = verts_.col(faces_(1, t));
            v.col(2) = verts_.col(faces_(2, t));
            const Eigen::Vector3d w = v.partialPivLu().solve(dir);
            const double s = w.sum();
            if (s <= 0.0) continue;
            const Eigen::Vector3d wn = w / s;
            const double m = wn.minCoeff();
            if (m > best_min) {
                best_min = m;
                best = t;
                bw = wn;
            }
        }
        return best_min;
    };

    int best = -1;
    Eigen::Vector3d bw = Eigen::Vector3d::Zero();
    const double q = try_faces(buckets_[bucket_of(dir)], best, bw);
    if (q < -1e-9) {
        // Rare fallback: exhaustive scan.
        std::vector<int> all(faces_.cols());
        for (int t = 0; t < static_cast<int>(all.size()); ++t) all[t] = t;
        try_faces(all, best, bw);
    }
    bary = bw;
    return best;
}

double SphereSurface::interpolate(const Eigen::Vector3d& dir, const ArrayXd& f) const {
    Eigen::Vector3d bary;
    const int t = locate(dir.normalized(), bary);
    if (t < 0) throw NumericalFailure("interpolate: point location failed");
    return bary[0] * f[faces_(0, t)] + bary[1] * f[faces_(1, t)] +
           bary[2] * f[faces_(2, t)];
}

} // namespace calabi
