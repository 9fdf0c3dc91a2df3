// Reduced S^1-symmetric fiber geometry: background densities, Ricci density,
// scalar curvature and quadrature for the two model fibers (flat/curved torus
// and the logistic sphere chart).
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace klab {

/// Nodal samples of a real function on the fiber grid.
using Field1D = Eigen::ArrayXd;

enum class FiberKind { Torus, Sphere };

/// Immutable fiber geometry. All derived quantities (Ricci density, mean
/// scalar curvature, quadrature weights) are fixed at construction, so a
/// model can be shared freely across threads.
///
/// Torus: x in [0,1) periodic, n_x nodes, background density w = 1 + psi0''.
/// Sphere: s in [-L,L], n_x+1 nodes, Dirichlet ends, w(s) = e^s/(1+e^s)^2.
class FiberModel {
public:
    FiberKind kind() const { return kind_; }
    bool periodic() const { return kind_ == FiberKind::Torus; }

    /// Number of grid intervals (the descriptor N_x).
    int intervals() const { return n_x_; }
    /// Number of stored nodes: N_x on the torus, N_x+1 on the sphere.
    int node_count() const { return static_cast<int>(x_.size()); }
    double spacing() const { return h_; }
    /// Sphere truncation half-width L; zero on the torus.
    double half_width() const { return half_width_; }

    const Field1D& nodes() const { return x_; }
    const Field1D& density() const { return w_; }         // w
    const Field1D& ricci() const { return r_; }           // r = -(log w)''
    const Field1D& quadrature() const { return quad_; }   // integration weights

    /// Mean scalar curvature rbar = (int r) / (int w).
    double mean_curvature() const { return rbar_; }
    /// Total background volume V = int w.
    double volume() const { return volume_; }

    /// Background potential the torus was built from (empty when flat or on
    /// the sphere); kept for serialization.
    const std::optional<Field1D>& background_potential() const { return psi0_; }

    /// Second difference of nodal samples: periodic wrap on the torus,
    /// second-order one-sided stencils at the sphere ends.
    Field1D dxx(const Field1D& g) const;
    /// First difference, same boundary treatment.
    Field1D dx(const Field1D& g) const;

    friend FiberModel build_torus_model(int n_x, const std::optional<Field1D>& psi0);
    friend FiberModel build_sphere_model(int n_x, double half_width);

private:
    FiberModel() = default;

    FiberKind kind_ = FiberKind::Torus;
    int n_x_ = 0;
    double h_ = 0.0;
    double half_width_ = 0.0;
    Field1D x_, w_, r_, quad_;
    double rbar_ = 0.0, volume_ = 0.0;
    std::optional<Field1D> psi0_;
};

/// Flat (psi0 absent) or curved torus. Requires n_x >= 16 and, when psi0 is
/// given, 1 + psi0'' > 0 at every node; a violation reports the first
/// offending node.
FiberModel build_torus_model(int n_x, const std::optional<Field1D>& psi0 = {});

/// Truncated sphere chart. Requires n_x >= 32 and half_width >= 5.
FiberModel build_sphere_model(int n_x, double half_width);

/// m = w + phi''. No positivity enforcement; callers check the cone.
Field1D metric_density(const FiberModel& model, const Field1D& phi);

/// Fiberwise volume ratio m/w.
Field1D volume_ratio(const FiberModel& model, const Field1D& phi);

/// log(m/w); throws naming the first node where the ratio is <= 0.
Field1D log_volume_ratio(const FiberModel& model, const Field1D& phi);

/// R_phi = -(log m)''/m; requires m > 0 at every node.
Field1D scalar_curvature(const FiberModel& model, const Field1D& phi);

} // namespace klab
