// Discrete calculus on the space-time strip [0,1] x fiber: centered
// second-order stencils, quadrature and norms.
#pragma once

#include "klab/geometry.hpp"

#include <memory>

namespace klab {

/// Uniform grid on [0,1] x fiber. The fiber grid is inherited from a shared
/// FiberModel; time has n_t intervals (nodes t_0 = 0, ..., t_{n_t} = 1).
struct PathGrid {
    std::shared_ptr<const FiberModel> model;
    int n_t = 0;

    int rows() const { return n_t + 1; }
    int cols() const { return model->node_count(); }
    double dt() const { return 1.0 / n_t; }
    double time(int i) const { return static_cast<double>(i) / n_t; }
    bool same_shape(const PathGrid& other) const
    {
        return n_t == other.n_t && model->kind() == other.model->kind() &&
               model->node_count() == other.model->node_count();
    }
};

PathGrid make_grid(std::shared_ptr<const FiberModel> model, int n_t);

/// Real field Phi(t_i, x_j) on a PathGrid; row i is the time slice t_i.
struct PathField {
    PathGrid grid;
    Eigen::MatrixXd values; // rows() x cols()

    Field1D slice(int i) const { return values.row(i).transpose().array(); }
    void set_slice(int i, const Field1D& g) { values.row(i) = g.matrix().transpose(); }
};

PathField make_field(const PathGrid& grid, double fill = 0.0);

/// Centered second differences in t; boundary rows are zero by convention.
PathField d_tt(const PathField& f);
/// Centered second differences in x (periodic wrap on the torus, one-sided
/// second-order at the sphere ends).
PathField d_xx(const PathField& f);
/// Mixed derivative, 4-corner centered stencil; zero on boundary rows, and on
/// boundary columns of a sphere grid.
PathField d_tx(const PathField& f);

/// int g w dx — integration against the background measure.
double integrate_fiber(const FiberModel& model, const Field1D& g);
/// int g dx — plain quadrature for integrands that already carry a density.
double integrate_lebesgue(const FiberModel& model, const Field1D& g);
/// sqrt( int g^2 w dx )
double l2_fiber(const FiberModel& model, const Field1D& g);
/// Trapezoid in t of the fiber integrals of G (against w dx).
double integrate_path(const PathGrid& grid, const PathField& G);

} // namespace klab
