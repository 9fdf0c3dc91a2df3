// Damped Newton solver with epsilon-continuation for the reduced geodesic
// equation  Phi_tt (w + Phi_xx) - Phi_tx^2 = eps w  with Dirichlet data
// Phi(0,.) = phi0, Phi(1,.) = phi1.
#pragma once

#include "klab/calculus.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace klab {

struct SolverConfig {
    double newton_tol = 1e-10;     // residual sup-norm
    int max_newton_iters = 50;
    double backtrack_factor = 0.5;
    double min_step = 1.0 / (1 << 20);
    std::vector<double> eps_ladder; // empty -> default_ladder()
    double cone_margin = 1e-3;      // allowed fraction of the initial min(m), min(rho)

    void validate() const;
};

/// Geometric ladder 1e-1, 5e-2, ... halving until it passes below 1e-4.
std::vector<double> default_ladder();

struct ConeReport {
    double min_m = 0.0;   // over all grid nodes
    double min_rho = 0.0; // over interior nodes, rho = (Phi_tt m - Phi_tx^2)/m
};

struct SolveResult {
    PathField phi;
    double eps = 0.0;
    int iterations = 0;
    std::vector<double> residual_history; // sup-norms, including the initial one
    ConeReport cone;
    std::string endpoints_hash;
    // C^{1,1bar} proxies: sup of |Phi_tt|, |Phi_tx|, |Phi_xx| over interior nodes
    double sup_tt = 0.0, sup_tx = 0.0, sup_xx = 0.0;
};

class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& msg, ConeReport cone_report, int rung_index = -1)
        : std::runtime_error(msg), cone(cone_report), rung(rung_index) {}
    ConeReport cone;
    int rung;
};

/// Interior-node residual Phi_tt (w + Phi_xx) - Phi_tx^2 - eps w; boundary
/// rows (and sphere boundary columns) are zero by convention. Defined for any
/// field, inside the cone or not.
PathField residual(const PathField& phi, double eps);

struct InitialGuess {
    PathField phi;
    double c = 0.0; // coefficient of the t(1-t) bump
};

/// Phi0 = (1-t) phi0 + t phi1 + c t(1-t) with c < 0 found by doubling search
/// so that the initial residual is nonnegative node-wise (a discrete
/// subsolution, q >= eps w at every interior node).
InitialGuess initial_guess(const PathGrid& grid, const Field1D& phi0, const Field1D& phi1, double eps);

/// Damped Newton from `init`. The t-boundary rows are reset to phi0/phi1; on
/// a sphere grid the x-boundary columns of `init` act as Dirichlet data.
SolveResult newton_solve(const Field1D& phi0, const Field1D& phi1, double eps,
                         const SolverConfig& config, const PathField& init);

/// Solves along the ladder, warm-starting each rung from the previous
/// solution. On bounded fibers the first rung is re-solved once with the
/// t(1-t) bump removed from the x-boundary data, so every reported result
/// carries the t-linear Dirichlet trace of the endpoints.
std::vector<SolveResult> continuation(const PathGrid& grid, const Field1D& phi0, const Field1D& phi1,
                                      const SolverConfig& config);

} // namespace klab
