#include "klab/geometry.hpp"
#include "klab/calculus.hpp"

#include <doctest.h>

#include <cmath>

using namespace klab;

namespace {

const double kTwoPi = 2.0 * M_PI;

Field1D sample_torus(int n, double (*f)(double))
{
    Field1D g(n);
    for (int j = 0; j < n; ++j)
        g[j] = f(static_cast<double>(j) / n);
    return g;
}

double cos_wave(double x) { return std::cos(kTwoPi * x); }

} // namespace

TEST_CASE("flat torus model")
{
    FiberModel m = build_torus_model(64);
    CHECK(m.node_count() == 64);
    CHECK(m.density().minCoeff() == 1.0);
    CHECK(m.density().maxCoeff() == 1.0);
    CHECK(m.ricci().abs().maxCoeff() == 0.0);
    CHECK(m.mean_curvature() == 0.0);
    CHECK(m.volume() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("curved torus matches the analytic density")
{
    const int n = 64;
    const double amp = 0.005;
    Field1D psi0 = amp * sample_torus(n, cos_wave);
    FiberModel m = build_torus_model(n, psi0);

    // w = 1 + psi0'' = 1 - amp (2pi)^2 cos(2pi x), node-wise up to O(h^2)
    for (int j = 0; j < n; ++j) {
        const double exact = 1.0 - amp * kTwoPi * kTwoPi * cos_wave(m.nodes()[j]);
        CHECK(m.density()[j] == doctest::Approx(exact).epsilon(5e-4));
    }
    CHECK(m.density().minCoeff() == doctest::Approx(1.0 - amp * kTwoPi * kTwoPi).epsilon(5e-4));

    // periodic integral of a second derivative vanishes
    CHECK(std::abs((m.quadrature() * m.ricci()).sum()) < 1e-12);
    CHECK(std::abs(m.mean_curvature()) < 1e-12);
}

TEST_CASE("torus rejects a non-Kaehler background")
{
    const int n = 64;
    Field1D psi0 = 0.03 * sample_torus(n, cos_wave); // 1 - 0.03 (2pi)^2 < 0
    CHECK_THROWS_AS(build_torus_model(n, psi0), std::invalid_argument);
    CHECK_THROWS_AS(build_torus_model(8), std::invalid_argument);
}

TEST_CASE("sphere model volume, curvature and preconditions")
{
    FiberModel m = build_sphere_model(128, 8.0);
    CHECK(m.node_count() == 129);

    const double v_exact = 1.0 - 2.0 * std::exp(-8.0) / (1.0 + std::exp(-8.0));
    CHECK(m.volume() == doctest::Approx(v_exact).epsilon(1e-5));
    CHECK(m.mean_curvature() == doctest::Approx(2.0).epsilon(5e-4));

    // r = -(log w)'' = 2w identically for this density; the discrete defect
    // is O(h^2) with a constant that does not grow with L
    const double defect8 = (m.ricci() - 2.0 * m.density()).abs().maxCoeff();
    FiberModel m2 = build_sphere_model(256, 8.0);
    const double defect8_fine = (m2.ricci() - 2.0 * m2.density()).abs().maxCoeff();
    const double ratio = defect8 / defect8_fine;
    CHECK(ratio > 2.5);
    CHECK(ratio < 6.0);

    FiberModel wide = build_sphere_model(160, 10.0); // same spacing as L = 8, N = 128
    const double defect10 = (wide.ricci() - 2.0 * wide.density()).abs().maxCoeff();
    CHECK(defect10 < 4.0 * defect8 + 1e-12);

    CHECK_THROWS_AS(build_sphere_model(32, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(build_sphere_model(16, 8.0), std::invalid_argument);
}

TEST_CASE("metric density and volume ratio")
{
    FiberModel flat = build_torus_model(64);
    Field1D zero = Field1D::Zero(64);
    CHECK((metric_density(flat, zero) - 1.0).abs().maxCoeff() == 0.0);
    CHECK((volume_ratio(flat, zero) - 1.0).abs().maxCoeff() == 0.0);
    CHECK(log_volume_ratio(flat, zero).abs().maxCoeff() == 0.0);

    const double amp = 0.005;
    Field1D phi = amp * sample_torus(64, cos_wave);
    Field1D m = metric_density(flat, phi);
    for (int j = 0; j < 64; ++j) {
        const double exact = 1.0 - amp * kTwoPi * kTwoPi * cos_wave(flat.nodes()[j]);
        CHECK(m[j] == doctest::Approx(exact).epsilon(5e-4));
    }
    CHECK(volume_ratio(flat, phi).minCoeff() == doctest::Approx(0.80261).epsilon(1e-3));

    // second difference of a constant vanishes exactly, also at one-sided ends
    FiberModel sph = build_sphere_model(64, 8.0);
    Field1D c = Field1D::Constant(65, 3.25);
    CHECK((metric_density(sph, c) - sph.density()).abs().maxCoeff() == 0.0);

    // degenerate ratio: the log request must name the failure
    Field1D bad = 0.06 * sample_torus(64, cos_wave); // safely past the cone

    CHECK_THROWS_AS(log_volume_ratio(flat, bad), std::invalid_argument);
}

TEST_CASE("scalar curvature and Gauss-Bonnet mass")
{
    FiberModel sph = build_sphere_model(128, 8.0);
    Field1D zero_s = Field1D::Zero(129);
    Field1D curv = scalar_curvature(sph, zero_s);
    CHECK((curv - 2.0).abs().maxCoeff() < 0.05);

    FiberModel flat = build_torus_model(64);
    Field1D zero = Field1D::Zero(64);
    CHECK(scalar_curvature(flat, zero).abs().maxCoeff() == 0.0);

    Field1D phi = 0.005 * sample_torus(64, cos_wave);
    Field1D r_phi = scalar_curvature(flat, phi);
    Field1D m = metric_density(flat, phi);
    CHECK(std::abs(integrate_lebesgue(flat, r_phi * m)) < 1e-12); // periodic total curvature

    // phi-independence of the curvature mass within O(h^2), curved background
    Field1D psi0 = 0.004 * sample_torus(64, cos_wave);
    FiberModel curved = build_torus_model(64, psi0);
    Field1D zero_mass = scalar_curvature(curved, Field1D::Zero(64)) * metric_density(curved, Field1D::Zero(64));
    Field1D phi_mass = scalar_curvature(curved, phi) * metric_density(curved, phi);
    CHECK(integrate_lebesgue(curved, zero_mass) ==
          doctest::Approx(integrate_lebesgue(curved, phi_mass)).epsilon(1e-10));

    CHECK_THROWS_AS(scalar_curvature(flat, 0.06 * sample_torus(64, cos_wave)), std::invalid_argument);
}

TEST_CASE("mass conservation and linearity")
{
    FiberModel flat = build_torus_model(64);
    Field1D phi = 0.01 * sample_torus(64, cos_wave);
    CHECK(integrate_lebesgue(flat, metric_density(flat, phi)) ==
          doctest::Approx(flat.volume()).epsilon(1e-14));

    // sphere mass moves only through the boundary flux, O(h^2) + O(e^-L) here
    FiberModel sph = build_sphere_model(128, 8.0);
    Field1D rot(129);
    for (int j = 0; j < 129; ++j) {
        const double s = sph.nodes()[j];
        rot[j] = std::log1p(std::exp(s + 2.0)) - std::log1p(std::exp(s));
    }
    CHECK(integrate_lebesgue(sph, metric_density(sph, rot)) ==
          doctest::Approx(sph.volume()).epsilon(1e-2));

    // metric_density is affine in phi with the background as offset
    Field1D a = 0.003 * sample_torus(64, cos_wave);
    Field1D b(64);
    for (int j = 0; j < 64; ++j)
        b[j] = 0.002 * std::sin(2.0 * kTwoPi * flat.nodes()[j]);
    Field1D lhs = metric_density(flat, a + b);
    Field1D rhs = metric_density(flat, a) + metric_density(flat, b) - flat.density();
    CHECK((lhs - rhs).abs().maxCoeff() < 1e-12);
}
