#include "klab/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace klab {

namespace {

std::string node_label(const FiberModel& model, int j)
{
    return "node " + std::to_string(j) + " (x = " + std::to_string(model.nodes()[j]) + ")";
}

} // namespace

Field1D FiberModel::dxx(const Field1D& g) const
{
    if (g.size() != x_.size())
        throw std::invalid_argument("dxx: field length does not match the model grid");
    const int n = node_count();
    Field1D out(n);
    const double h2 = h_ * h_;
    if (periodic()) {
        for (int j = 0; j < n; ++j) {
            const int jm = (j + n - 1) % n;
            const int jp = (j + 1) % n;
            out[j] = (g[jp] - 2.0 * g[j] + g[jm]) / h2;
        }
    } else {
        for (int j = 1; j + 1 < n; ++j)
            out[j] = (g[j + 1] - 2.0 * g[j] + g[j - 1]) / h2;
        // one-sided 4-point stencils, second order
        out[0] = (2.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3]) / h2;
        out[n - 1] = (2.0 * g[n - 1] - 5.0 * g[n - 2] + 4.0 * g[n - 3] - g[n - 4]) / h2;
    }
    return out;
}

Field1D FiberModel::dx(const Field1D& g) const
{
    if (g.size() != x_.size())
        throw std::invalid_argument("dx: field length does not match the model grid");
    const int n = node_count();
    Field1D out(n);
    if (periodic()) {
        for (int j = 0; j < n; ++j) {
            const int jm = (j + n - 1) % n;
            const int jp = (j + 1) % n;
            out[j] = (g[jp] - g[jm]) / (2.0 * h_);
        }
    } else {
        for (int j = 1; j + 1 < n; ++j)
            out[j] = (g[j + 1] - g[j - 1]) / (2.0 * h_);
        out[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h_);
        out[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * h_);
    }
    return out;
}

FiberModel build_torus_model(int n_x, const std::optional<Field1D>& psi0)
{
    if (n_x < 16)
        throw std::invalid_argument("build_torus_model: N_x must be at least 16");
    if (psi0 && psi0->size() != n_x)
        throw std::invalid_argument("build_torus_model: psi0 length must equal N_x");

    FiberModel m;
    m.kind_ = FiberKind::Torus;
    m.n_x_ = n_x;
    m.h_ = 1.0 / n_x;
    m.x_ = Field1D::LinSpaced(n_x, 0.0, 1.0 - 1.0 / n_x);
    m.quad_ = Field1D::Constant(n_x, m.h_);

    if (psi0) {
        m.psi0_ = *psi0;
        m.w_ = 1.0 + m.dxx(*psi0);
        for (int j = 0; j < n_x; ++j)
            if (!(m.w_[j] > 0.0))
                throw std::invalid_argument("build_torus_model: 1 + psi0'' = " +
                                            std::to_string(m.w_[j]) + " <= 0 at " + node_label(m, j));
    } else {
        m.w_ = Field1D::Ones(n_x);
    }

    Field1D logw = m.w_.log();
    m.r_ = -m.dxx(logw);
    m.volume_ = (m.quad_ * m.w_).sum();
    m.rbar_ = (m.quad_ * m.r_).sum() / m.volume_;
    return m;
}

FiberModel build_sphere_model(int n_x, double half_width)
{
    if (n_x < 32)
        throw std::invalid_argument("build_sphere_model: N_x must be at least 32");
    if (half_width < 5.0)
        throw std::invalid_argument("build_sphere_model: half-width L must be at least 5");

    FiberModel m;
    m.kind_ = FiberKind::Sphere;
    m.n_x_ = n_x;
    m.half_width_ = half_width;
    m.h_ = 2.0 * half_width / n_x;
    m.x_ = Field1D::LinSpaced(n_x + 1, -half_width, half_width);

    m.quad_ = Field1D::Constant(n_x + 1, m.h_);
    m.quad_[0] = 0.5 * m.h_;
    m.quad_[n_x] = 0.5 * m.h_;

    // w(s) = e^s / (1+e^s)^2, written to stay finite for large |s|
    m.w_ = Field1D(n_x + 1);
    for (int j = 0; j <= n_x; ++j) {
        const double e = std::exp(-std::abs(m.x_[j]));
        m.w_[j] = e / ((1.0 + e) * (1.0 + e));
    }

    Field1D logw = m.w_.log();
    m.r_ = -m.dxx(logw);
    m.volume_ = (m.quad_ * m.w_).sum();
    m.rbar_ = (m.quad_ * m.r_).sum() / m.volume_;
    return m;
}

Field1D metric_density(const FiberModel& model, const Field1D& phi)
{
    return model.density() + model.dxx(phi);
}

Field1D volume_ratio(const FiberModel& model, const Field1D& phi)
{
    return metric_density(model, phi) / model.density();
}

Field1D log_volume_ratio(const FiberModel& model, const Field1D& phi)
{
    Field1D ratio = volume_ratio(model, phi);
    for (int j = 0; j < ratio.size(); ++j)
        if (!(ratio[j] > 0.0))
            throw std::invalid_argument("log_volume_ratio: volume ratio " + std::to_string(ratio[j]) +
                                        " <= 0 at " + node_label(model, j));
    return ratio.log();
}

Field1D scalar_curvature(const FiberModel& model, const Field1D& phi)
{
    Field1D m = metric_density(model, phi);
    for (int j = 0; j < m.size(); ++j)
        if (!(m[j] > 0.0))
            throw std::invalid_argument("scalar_curvature: metric density " + std::to_string(m[j]) +
                                        " <= 0 at " + node_label(model, j));
    Field1D logm = m.log();
    return -model.dxx(logm) / m;
}

} // namespace klab
