#include "klab/epsilon_geodesic.hpp"

#include "klab/io.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>

namespace klab {

namespace {

struct InteriorLayout {
    int i_lo, i_hi;          // unknown time rows [i_lo, i_hi]
    int j_lo, j_hi;          // unknown fiber columns [j_lo, j_hi]
    bool wrap;
    int nxu() const { return j_hi - j_lo + 1; }
    int ntu() const { return i_hi - i_lo + 1; }
    int size() const { return nxu() * ntu(); }
    int index(int i, int j) const { return (i - i_lo) * nxu() + (j - j_lo); }
};

InteriorLayout layout_for(const PathGrid& grid)
{
    InteriorLayout L;
    L.i_lo = 1;
    L.i_hi = grid.n_t - 1;
    L.wrap = grid.model->periodic();
    L.j_lo = L.wrap ? 0 : 1;
    L.j_hi = L.wrap ? grid.cols() - 1 : grid.cols() - 2;
    return L;
}

// Stencil evaluations packaged so that the Newton loop, the residual and the
// Jacobian agree bit-for-bit on what "the discrete operator" means.
struct Stencil {
    const PathGrid& grid;
    const Eigen::MatrixXd& v;
    double dt2, dx2, dtdx4;
    int n;
    bool wrap;

    Stencil(const PathGrid& g, const Eigen::MatrixXd& values)
        : grid(g), v(values), n(g.cols()), wrap(g.model->periodic())
    {
        dt2 = g.dt() * g.dt();
        const double dx = g.model->spacing();
        dx2 = dx * dx;
        dtdx4 = 4.0 * g.dt() * dx;
    }
    int jp(int j) const { return wrap ? (j + 1) % n : j + 1; }
    int jm(int j) const { return wrap ? (j + n - 1) % n : j - 1; }
    double tt(int i, int j) const { return (v(i + 1, j) - 2.0 * v(i, j) + v(i - 1, j)) / dt2; }
    double xx(int i, int j) const { return (v(i, jp(j)) - 2.0 * v(i, j) + v(i, jm(j))) / dx2; }
    double tx(int i, int j) const
    {
        return (v(i + 1, jp(j)) - v(i + 1, jm(j)) - v(i - 1, jp(j)) + v(i - 1, jm(j))) / dtdx4;
    }
};

struct IterateState {
    Eigen::MatrixXd m;       // metric density at every node
    Eigen::MatrixXd q;       // ellipticity quantity on interior nodes
    Eigen::MatrixXd res;     // residual on interior nodes
    double merit = 0.0;      // sup |res|
    double min_m = 0.0;
    double min_q_over_m = 0.0; // min rho over interior
    bool in_cone = false;
};

IterateState evaluate(const PathGrid& grid, const Eigen::MatrixXd& values, double eps)
{
    const auto L = layout_for(grid);
    const auto& model = *grid.model;
    IterateState s;
    s.m.setZero(grid.rows(), grid.cols());
    s.q.setZero(grid.rows(), grid.cols());
    s.res.setZero(grid.rows(), grid.cols());

    for (int i = 0; i < grid.rows(); ++i) {
        Field1D slice = values.row(i).transpose().array();
        s.m.row(i) = metric_density(model, slice).matrix().transpose();
    }

    Stencil st(grid, values);
    const auto& w = model.density();
    double merit = 0.0;
    double min_rho = std::numeric_limits<double>::infinity();
    for (int i = L.i_lo; i <= L.i_hi; ++i)
        for (int j = L.j_lo; j <= L.j_hi; ++j) {
            const double tt = st.tt(i, j);
            const double tx = st.tx(i, j);
            const double q = tt * s.m(i, j) - tx * tx;
            s.q(i, j) = q;
            s.res(i, j) = q - eps * w[j];
            merit = std::max(merit, std::abs(s.res(i, j)));
            if (s.m(i, j) > 0.0)
                min_rho = std::min(min_rho, q / s.m(i, j));
            else
                min_rho = std::min(min_rho, q); // sign is what matters here
        }
    s.merit = merit;
    s.min_m = s.m.minCoeff();
    s.min_q_over_m = min_rho;
    s.in_cone = s.min_m > 0.0 && min_rho > 0.0;
    return s;
}

std::string endpoints_digest(const PathGrid& grid, const Field1D& phi0, const Field1D& phi1)
{
    std::string bytes(reinterpret_cast<const char*>(phi0.data()), sizeof(double) * phi0.size());
    bytes.append(reinterpret_cast<const char*>(phi1.data()), sizeof(double) * phi1.size());
    bytes += model_hash(*grid.model);
    return hash_hex(fnv1a64(bytes));
}

} // namespace

void SolverConfig::validate() const
{
    if (!(newton_tol > 0.0))
        throw std::invalid_argument("SolverConfig: newton_tol must be positive");
    if (max_newton_iters < 1)
        throw std::invalid_argument("SolverConfig: max_newton_iters must be positive");
    if (!(cone_margin > 0.0) || cone_margin >= 1.0)
        throw std::invalid_argument("SolverConfig: cone_margin must lie in (0,1)");
    const auto& ladder = eps_ladder;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        if (!(ladder[k] > 0.0))
            throw std::invalid_argument("SolverConfig: ladder entries must be positive");
        if (k > 0 && !(ladder[k] < ladder[k - 1]))
            throw std::invalid_argument("SolverConfig: ladder must be strictly decreasing");
    }
}

std::vector<double> default_ladder()
{
    std::vector<double> ladder;
    double eps = 1e-1;
    while (true) {
        ladder.push_back(eps);
        if (eps <= 1e-4)
            break;
        eps *= 0.5;
    }
    return ladder;
}

PathField residual(const PathField& phi, double eps)
{
    IterateState s = evaluate(phi.grid, phi.values, eps);
    PathField out = make_field(phi.grid);
    out.values = s.res;
    return out;
}

InitialGuess initial_guess(const PathGrid& grid, const Field1D& phi0, const Field1D& phi1, double eps)
{
    const auto& model = *grid.model;
    if (phi0.size() != grid.cols() || phi1.size() != grid.cols())
        throw std::invalid_argument("initial_guess: endpoint length does not match the grid");
    Field1D m0 = metric_density(model, phi0);
    Field1D m1 = metric_density(model, phi1);
    for (int j = 0; j < grid.cols(); ++j) {
        if (!(m0[j] > 0.0))
            throw std::invalid_argument("initial_guess: phi0 leaves the Kaehler cone at node " + std::to_string(j));
        if (!(m1[j] > 0.0))
            throw std::invalid_argument("initial_guess: phi1 leaves the Kaehler cone at node " + std::to_string(j));
    }

    const double slack = 1e-13 * (eps * model.density().maxCoeff() + 1.0);
    double c = -0.5 * eps;
    for (int attempt = 0; attempt < 60; ++attempt) {
        PathField cand = make_field(grid);
        for (int i = 0; i < grid.rows(); ++i) {
            const double t = grid.time(i);
            const double bump = c * t * (1.0 - t);
            for (int j = 0; j < grid.cols(); ++j)
                cand.values(i, j) = (1.0 - t) * phi0[j] + t * phi1[j] + bump;
        }
        IterateState s = evaluate(grid, cand.values, eps);
        // admissible once the residual is nonnegative node-wise
        double min_res = std::numeric_limits<double>::infinity();
        const auto L = layout_for(grid);
        for (int i = L.i_lo; i <= L.i_hi; ++i)
            for (int j = L.j_lo; j <= L.j_hi; ++j)
                min_res = std::min(min_res, s.res(i, j));
        if (s.min_m > 0.0 && min_res >= -slack)
            return InitialGuess{std::move(cand), c};
        c *= 2.0;
    }
    throw SolveError("initial_guess: no admissible t(1-t) coefficient below the cap; "
                     "refine the grid or move the endpoints", ConeReport{});
}

SolveResult newton_solve(const Field1D& phi0, const Field1D& phi1, double eps,
                         const SolverConfig& config, const PathField& init)
{
    config.validate();
    const PathGrid& grid = init.grid;
    const auto L = layout_for(grid);
    const auto& model = *grid.model;
    if (phi0.size() != grid.cols() || phi1.size() != grid.cols())
        throw std::invalid_argument("newton_solve: endpoint length does not match the grid");

    Eigen::MatrixXd values = init.values;
    values.row(0) = phi0.matrix().transpose();
    values.row(grid.n_t) = phi1.matrix().transpose();

    IterateState state = evaluate(grid, values, eps);
    if (!state.in_cone)
        throw SolveError("newton_solve: initial iterate is outside the discrete cone (min m = " +
                             std::to_string(state.min_m) + ", min rho = " + std::to_string(state.min_q_over_m) + ")",
                         ConeReport{state.min_m, state.min_q_over_m});

    const double m_floor = config.cone_margin * state.min_m;
    const double rho_floor = config.cone_margin * state.min_q_over_m;

    std::vector<double> history{state.merit};
    const int n_unknowns = L.size();
    Eigen::SparseMatrix<double> jac(n_unknowns, n_unknowns);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_unknowns) * 9);
    Eigen::VectorXd rhs(n_unknowns), delta(n_unknowns);

    int iters = 0;
    while (state.merit > config.newton_tol) {
        if (iters >= config.max_newton_iters)
            throw SolveError("newton_solve: no convergence in " + std::to_string(config.max_newton_iters) +
                                 " iterations (residual " + std::to_string(state.merit) + ")",
                             ConeReport{state.min_m, state.min_q_over_m});

        // linearization: dF = dPhi_tt m + Phi_tt dPhi_xx - 2 Phi_tx dPhi_tx
        trip.clear();
        Stencil st(grid, values);
        const double dt2 = grid.dt() * grid.dt();
        const double dx2 = model.spacing() * model.spacing();
        const double cross = 2.0 * grid.dt() * model.spacing();
        for (int i = L.i_lo; i <= L.i_hi; ++i)
            for (int j = L.j_lo; j <= L.j_hi; ++j) {
                const int row = L.index(i, j);
                const double A = st.tt(i, j);
                const double B = state.m(i, j);
                const double C = st.tx(i, j);
                auto add = [&](int ii, int jj, double v) {
                    if (ii < L.i_lo || ii > L.i_hi)
                        return;
                    if (!L.wrap && (jj < L.j_lo || jj > L.j_hi))
                        return;
                    trip.emplace_back(row, L.index(ii, jj), v);
                };
                const int jp = st.jp(j), jm = st.jm(j);
                add(i, j, -2.0 * B / dt2 - 2.0 * A / dx2);
                add(i + 1, j, B / dt2);
                add(i - 1, j, B / dt2);
                add(i, jp, A / dx2);
                add(i, jm, A / dx2);
                add(i + 1, jp, -C / cross);
                add(i + 1, jm, C / cross);
                add(i - 1, jp, C / cross);
                add(i - 1, jm, -C / cross);
                rhs[row] = -state.res(i, j);
            }
        jac.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(jac);
        if (lu.info() != Eigen::Success)
            throw SolveError("newton_solve: sparse factorization failed",
                             ConeReport{state.min_m, state.min_q_over_m});
        delta = lu.solve(rhs);

        double step = 1.0;
        bool accepted = false;
        Eigen::MatrixXd cand = values;
        while (step >= config.min_step) {
            cand = values;
            for (int i = L.i_lo; i <= L.i_hi; ++i)
                for (int j = L.j_lo; j <= L.j_hi; ++j)
                    cand(i, j) += step * delta[L.index(i, j)];
            IterateState cs = evaluate(grid, cand, eps);
            if (cs.merit < state.merit && cs.min_m >= m_floor && cs.min_q_over_m >= rho_floor) {
                values.swap(cand);
                state = std::move(cs);
                accepted = true;
                break;
            }
            step *= config.backtrack_factor;
        }
        if (!accepted)
            throw SolveError("newton_solve: line search stalled at residual " + std::to_string(state.merit),
                             ConeReport{state.min_m, state.min_q_over_m});
        ++iters;
        history.push_back(state.merit);
    }

    SolveResult result;
    result.phi.grid = grid;
    result.phi.values = std::move(values);
    result.eps = eps;
    result.iterations = iters;
    result.residual_history = std::move(history);
    result.endpoints_hash = endpoints_digest(grid, phi0, phi1);

    // independent certificate: re-evaluate the residual from the stored field
    IterateState final_state = evaluate(grid, result.phi.values, eps);
    if (!(final_state.merit <= config.newton_tol))
        throw SolveError("newton_solve: residual certificate failed on re-evaluation",
                         ConeReport{final_state.min_m, final_state.min_q_over_m});
    result.cone = ConeReport{final_state.min_m, final_state.min_q_over_m};

    Stencil st(grid, result.phi.values);
    for (int i = L.i_lo; i <= L.i_hi; ++i)
        for (int j = L.j_lo; j <= L.j_hi; ++j) {
            result.sup_tt = std::max(result.sup_tt, std::abs(st.tt(i, j)));
            result.sup_tx = std::max(result.sup_tx, std::abs(st.tx(i, j)));
            result.sup_xx = std::max(result.sup_xx, std::abs(st.xx(i, j)));
        }
    return result;
}

std::vector<SolveResult> continuation(const PathGrid& grid, const Field1D& phi0, const Field1D& phi1,
                                      const SolverConfig& config_in)
{
    SolverConfig config = config_in;
    if (config.eps_ladder.empty())
        config.eps_ladder = default_ladder();
    config.validate();

    std::vector<SolveResult> results;
    std::size_t first = 0;
    InitialGuess guess;
    std::string guess_err;
    for (; first < config.eps_ladder.size(); ++first) {
        try {
            guess = initial_guess(grid, phi0, phi1, config.eps_ladder[first]);
            break;
        } catch (const std::exception& e) {
            guess_err = e.what();
        }
    }
    if (first == config.eps_ladder.size())
        throw SolveError("continuation: initial guess failed at every rung (" + guess_err + ")", ConeReport{}, 0);

    for (std::size_t k = first; k < config.eps_ladder.size(); ++k) {
        const double eps = config.eps_ladder[k];
        try {
            if (results.empty()) {
                SolveResult r = newton_solve(phi0, phi1, eps, config, guess.phi);
                if (!grid.model->periodic() && guess.c != 0.0) {
                    // drop the bump from the x-boundary trace and re-solve, so
                    // the Dirichlet data is the t-linear span of the endpoints
                    PathField relaxed = r.phi;
                    for (int i = 1; i < grid.n_t; ++i) {
                        const double t = grid.time(i);
                        for (int j = 0; j < grid.cols(); ++j)
                            relaxed.values(i, j) -= guess.c * t * (1.0 - t);
                        relaxed.values(i, 0) = (1.0 - t) * phi0[0] + t * phi1[0];
                        relaxed.values(i, grid.cols() - 1) =
                            (1.0 - t) * phi0[grid.cols() - 1] + t * phi1[grid.cols() - 1];
                    }
                    r = newton_solve(phi0, phi1, eps, config, relaxed);
                }
                results.push_back(std::move(r));
            } else {
                results.push_back(newton_solve(phi0, phi1, eps, config, results.back().phi));
            }
        } catch (const SolveError& e) {
            throw SolveError("rung " + std::to_string(k) + " (eps = " + std::to_string(eps) + "): " + e.what(),
                             e.cone, static_cast<int>(k));
        }
    }
    return results;
}

} // namespace klab
