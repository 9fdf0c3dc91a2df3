#include "klab/calculus.hpp"

#include <cmath>
#include <stdexcept>

namespace klab {

PathGrid make_grid(std::shared_ptr<const FiberModel> model, int n_t)
{
    if (!model)
        throw std::invalid_argument("make_grid: null model");
    if (n_t < 8)
        throw std::invalid_argument("make_grid: N_t must be at least 8");
    return PathGrid{std::move(model), n_t};
}

PathField make_field(const PathGrid& grid, double fill)
{
    PathField f;
    f.grid = grid;
    f.values = Eigen::MatrixXd::Constant(grid.rows(), grid.cols(), fill);
    return f;
}

PathField d_tt(const PathField& f)
{
    PathField out = make_field(f.grid);
    const double dt2 = f.grid.dt() * f.grid.dt();
    const int rows = f.grid.rows(), cols = f.grid.cols();
    for (int i = 1; i + 1 < rows; ++i)
        for (int j = 0; j < cols; ++j)
            out.values(i, j) = (f.values(i + 1, j) - 2.0 * f.values(i, j) + f.values(i - 1, j)) / dt2;
    return out;
}

PathField d_xx(const PathField& f)
{
    PathField out = make_field(f.grid);
    const auto& model = *f.grid.model;
    for (int i = 0; i < f.grid.rows(); ++i)
        out.set_slice(i, model.dxx(f.slice(i)));
    return out;
}

PathField d_tx(const PathField& f)
{
    PathField out = make_field(f.grid);
    const int rows = f.grid.rows(), cols = f.grid.cols();
    const double denom = 4.0 * f.grid.dt() * f.grid.model->spacing();
    const bool wrap = f.grid.model->periodic();
    for (int i = 1; i + 1 < rows; ++i) {
        const int j0 = wrap ? 0 : 1;
        const int j1 = wrap ? cols : cols - 1;
        for (int j = j0; j < j1; ++j) {
            const int jp = wrap ? (j + 1) % cols : j + 1;
            const int jm = wrap ? (j + cols - 1) % cols : j - 1;
            out.values(i, j) = (f.values(i + 1, jp) - f.values(i + 1, jm) -
                                f.values(i - 1, jp) + f.values(i - 1, jm)) / denom;
        }
    }
    return out;
}

double integrate_fiber(const FiberModel& model, const Field1D& g)
{
    if (g.size() != model.node_count())
        throw std::invalid_argument("integrate_fiber: field length does not match the model grid");
    return (model.quadrature() * model.density() * g).sum();
}

double integrate_lebesgue(const FiberModel& model, const Field1D& g)
{
    if (g.size() != model.node_count())
        throw std::invalid_argument("integrate_lebesgue: field length does not match the model grid");
    return (model.quadrature() * g).sum();
}

double l2_fiber(const FiberModel& model, const Field1D& g)
{
    if (g.size() != model.node_count())
        throw std::invalid_argument("l2_fiber: field length does not match the model grid");
    return std::sqrt((model.quadrature() * model.density() * g * g).sum());
}

double integrate_path(const PathGrid& grid, const PathField& G)
{
    if (!grid.same_shape(G.grid))
        throw std::invalid_argument("integrate_path: grid mismatch");
    double total = 0.0;
    for (int i = 0; i < grid.rows(); ++i) {
        const double wt = (i == 0 || i == grid.n_t) ? 0.5 * grid.dt() : grid.dt();
        total += wt * integrate_fiber(*grid.model, G.slice(i));
    }
    return total;
}

} // namespace klab
