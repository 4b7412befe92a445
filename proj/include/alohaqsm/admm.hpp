#ifndef ALOHAQSM_ADMM_HPP
#define ALOHAQSM_ADMM_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <alohaqsm/hankel.hpp>

///
/// \file admm.hpp
///
/// Per-plane solver for
///
///     min_x 1/2 |phi_w - D . x|^2 + lambda/2 (|U|_F^2 + |V|_F^2)   s.t.  H(x) = U V^H
///
/// by ADMM on the augmented Lagrangian with penalty mu and scaled multiplier
/// Lambda. The x-update uses the normalized pseudo-inverse of the lift
/// (H^+ = H^* / pq in wrap mode), which makes the closed form
///
///     x = (D . phi_w + mu H^+(U V^H - Lambda)) / (|D|^2 + mu)
///
/// an exact minimizer. The U and V updates are the usual regularized
/// least-squares steps.
///
namespace alohaqsm
{

struct AdmmParams
{
    double lambda     = 3e-2;
    double mu         = 3e-2;
    Index rank_r      = 16;
    int max_iters     = 50;
    double tol        = 1e-4;
    double eps_weight = 0.01;

    void validate() const
    {
        detail::require(lambda > 0 && std::isfinite(lambda), "AdmmParams: lambda must be positive");
        detail::require(mu > 0 && std::isfinite(mu), "AdmmParams: mu must be positive");
        detail::require(rank_r >= 1, "AdmmParams: rank_r must be >= 1");
        detail::require(max_iters >= 1, "AdmmParams: max_iters must be >= 1");
        detail::require(tol > 0, "AdmmParams: tol must be positive");
        detail::require(eps_weight > 0 && eps_weight < 1, "AdmmParams: eps_weight must lie in (0, 1)");
    }
};

struct AdmmState
{
    Plane chi_w;
    Eigen::MatrixXcd U;
    Eigen::MatrixXcd V;
    Eigen::MatrixXcd Lambda;
};

struct SolverReport
{
    double fidelity        = 0.0; ///< 1/2 |phi_w - D . x|^2
    double penalty         = 0.0; ///< lambda/2 (|U|^2 + |V|^2)
    double augmented       = 0.0; ///< mu/2 |H(x) - U V^H + Lambda|^2
    double primal_residual = 0.0; ///< |H(x) - U V^H|_F after the last iteration
    double first_residual  = 0.0; ///< same, after iteration 1
    double init_fidelity   = 0.0; ///< fidelity of the initial plane
    int iterations         = 0;
    bool converged         = false; ///< stopped on the residual tolerance
};

struct PlaneSolution
{
    Plane chi_w;
    SolverReport report;
};

namespace detail
{

inline double fidelity(const Plane& phi_w, const RealPlane& d_hat, const Plane& x)
{
    return 0.5 * (phi_w - d_hat.cast<Complex>().cwiseProduct(x)).squaredNorm();
}

/// U V^H = P_r(H): U = Us S^{1/2}, V = Vs S^{1/2} from the Gram matrix.
inline void truncated_factors(const Eigen::MatrixXcd& h, Index r, Eigen::MatrixXcd& U, Eigen::MatrixXcd& V)
{
    const Eigen::MatrixXcd gram = h.adjoint() * h;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
    const Index k = gram.cols();
    Eigen::MatrixXcd vs(k, r);
    Eigen::VectorXd s(r);
    for (Index c = 0; c < r; ++c) {
        // eigenvalues come in ascending order
        vs.col(c) = eig.eigenvectors().col(k - 1 - c);
        s(c)      = std::sqrt(std::max(0.0, eig.eigenvalues()(k - 1 - c)));
    }
    Eigen::VectorXd inv_sqrt(r), sqrt_s(r);
    const double cut = s.size() ? s(0) * 1e-12 : 0.0;
    for (Index c = 0; c < r; ++c) {
        sqrt_s(c)   = std::sqrt(s(c));
        inv_sqrt(c) = s(c) > cut && s(c) > 0.0 ? 1.0 / sqrt_s(c) : 0.0;
        if (inv_sqrt(c) == 0.0)
            sqrt_s(c) = 0.0;
    }
    U = (h * vs) * inv_sqrt.asDiagonal();
    V = vs * sqrt_s.asDiagonal();
}

/// X (lambda I + mu F^H F)^{-1}, with X = mu . Y F.
inline Eigen::MatrixXcd regularized_solve(const Eigen::MatrixXcd& yf, const Eigen::MatrixXcd& f, double lambda,
                                          double mu)
{
    const Index r        = f.cols();
    Eigen::MatrixXcd sys = mu * (f.adjoint() * f);
    sys.diagonal().array() += lambda;
    // sys is Hermitian, so (X sys^{-1})^H = sys^{-1} X^H
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(sys);
    Eigen::MatrixXcd rhs = (mu * yf).adjoint();
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        // fall back to a least-squares solve of the regularized system
        Eigen::MatrixXcd reg = sys;
        reg.diagonal().array() += 1e-12 * std::max(1.0, sys.norm() / static_cast<double>(std::max<Index>(r, 1)));
        return reg.completeOrthogonalDecomposition().solve(rhs).adjoint();
    }
    return ldlt.solve(rhs).adjoint();
}

} // namespace detail

///
/// Runs ADMM on one weighted plane, starting from `init`.
///
/// Stops after `max_iters` or once |H(x) - U V^H|_F < tol |H(init)|_F.
/// Throws NumericalError if an iterate becomes non-finite.
///
inline PlaneSolution solve_plane(const Plane& phi_w, const RealPlane& d_hat, const HankelConfig& cfg,
                                 const AdmmParams& params, const Plane& init, AdmmState* state_out = nullptr)
{
    params.validate();
    const Index m = phi_w.rows(), n = phi_w.cols();
    detail::require(d_hat.rows() == m && d_hat.cols() == n && init.rows() == m && init.cols() == n,
                    "solve_plane: planes must share one shape");
    detail::require(init.allFinite(), "solve_plane: init must be finite");
    cfg.validate(m, n);

    const Index rows = cfg.lifted_rows(m, n);
    const Index cols = cfg.lifted_cols();
    const Index r    = std::min({params.rank_r, rows, cols});
    const double lam = params.lambda, mu = params.mu;

    SolverReport rep;
    rep.init_fidelity = detail::fidelity(phi_w, d_hat, init);

    const Plane d_phi   = d_hat.cast<Complex>().cwiseProduct(phi_w);
    const RealPlane den = (d_hat.array().square() + mu).matrix();

    Plane x = init;
    Eigen::MatrixXcd hx;
    lift2_into(x, cfg, hx);
    const double stop = params.tol * hx.norm();

    Eigen::MatrixXcd U, V;
    detail::truncated_factors(hx, r, U, V);
    Eigen::MatrixXcd lambda_mat = Eigen::MatrixXcd::Zero(rows, cols);
    Eigen::MatrixXcd uv         = U * V.adjoint();
    Eigen::MatrixXcd work(rows, cols);

    for (int it = 1; it <= params.max_iters; ++it) {
        work.noalias() = uv - lambda_mat;
        const Plane back = pseudo_inverse2(work, m, n, cfg);
        x                = (d_phi + mu * back).cwiseQuotient(den.cast<Complex>());

        lift2_into(x, cfg, hx);
        work.noalias() = hx + lambda_mat; // Y = H(x) + Lambda

        Eigen::MatrixXcd yv = work * V;
        U                   = detail::regularized_solve(yv, V, lam, mu);
        Eigen::MatrixXcd yu = work.adjoint() * U;
        V                   = detail::regularized_solve(yu, U, lam, mu);
        uv.noalias()        = U * V.adjoint();

        lambda_mat = work - uv;
        const double res = (hx - uv).norm();

        if (!std::isfinite(res) || !x.allFinite())
            throw NumericalError("solve_plane: non-finite iterate at iteration " + std::to_string(it));

        rep.iterations      = it;
        rep.primal_residual = res;
        if (it == 1)
            rep.first_residual = res;
        if (res < stop || res == 0.0) {
            rep.converged = true;
            break;
        }
    }

    rep.fidelity  = detail::fidelity(phi_w, d_hat, x);
    rep.penalty   = 0.5 * lam * (U.squaredNorm() + V.squaredNorm());
    rep.augmented = 0.5 * mu * (hx - uv + lambda_mat).squaredNorm();

    if (state_out)
        *state_out = AdmmState{x, U, V, lambda_mat};
    return PlaneSolution{std::move(x), rep};
}

} // namespace alohaqsm

#endif // ALOHAQSM_ADMM_HPP
