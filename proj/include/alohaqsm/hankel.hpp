#ifndef ALOHAQSM_HANKEL_HPP
#define ALOHAQSM_HANKEL_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Core>
#include <Eigen/SVD>

#include <alohaqsm/error.hpp>
#include <alohaqsm/volume.hpp>

///
/// \file hankel.hpp
///
/// Two-level Hankel lifting of a 2-D k-space plane.
///
/// For an M x N plane x and a p x q filter window the lifted matrix has one
/// row per plane position (i, j) and one column per filter offset (a, b):
///
///     H(x)[(i, j), (a, b)] = x[(i + a) mod M, (j + b) mod N]
///
/// Rows are ordered row-major over positions (r = j + N i) and columns
/// row-major over offsets (c = b + q a). With wrap-around every sample
/// appears exactly p q times, so H^H H = p q I. The classical (non-wrap)
/// variant keeps only positions with i <= M - p and j <= N - q.
///
namespace alohaqsm
{

using Plane     = Eigen::MatrixXcd;
using RealPlane = Eigen::MatrixXd;
using Index     = Eigen::Index;

struct HankelConfig
{
    Index p   = 8; ///< filter rows
    Index q   = 8; ///< filter columns
    bool wrap = true;

    void validate(Index rows, Index cols) const
    {
        if (p < 1 || q < 1 || p > rows || q > cols)
            throw ContractError("HankelConfig: filter " + std::to_string(p) + "x" + std::to_string(q) +
                                " does not fit plane " + std::to_string(rows) + "x" + std::to_string(cols));
    }

    Index lifted_rows(Index rows, Index cols) const
    {
        return wrap ? rows * cols : (rows - p + 1) * (cols - q + 1);
    }
    Index lifted_cols() const { return p * q; }
};

/// 8 per axis for planes of at least 64 samples, ceil(n/8) below that.
inline Index default_filter_extent(Index n) { return n >= 64 ? 8 : std::max<Index>(1, (n + 7) / 8); }

inline HankelConfig default_hankel_config(Index rows, Index cols)
{
    return HankelConfig{default_filter_extent(rows), default_filter_extent(cols), true};
}

struct LiftedMatrix
{
    Eigen::MatrixXcd entries;
    Index plane_rows = 0;
    Index plane_cols = 0;
    HankelConfig cfg;
};

namespace detail
{
/// Visits every (row, col, plane_i, plane_j) of the lift.
template <typename F>
void for_each_lifted(Index rows, Index cols, const HankelConfig& cfg, F&& f)
{
    const Index ri = cfg.wrap ? rows : rows - cfg.p + 1;
    const Index rj = cfg.wrap ? cols : cols - cfg.q + 1;
    for (Index a = 0; a < cfg.p; ++a)
        for (Index b = 0; b < cfg.q; ++b) {
            const Index c = b + cfg.q * a;
            Index r       = 0;
            for (Index i = 0; i < ri; ++i) {
                Index si = i + a;
                if (si >= rows)
                    si -= rows;
                for (Index j = 0; j < rj; ++j, ++r) {
                    Index sj = j + b;
                    if (sj >= cols)
                        sj -= cols;
                    f(r, c, si, sj);
                }
            }
        }
}
} // namespace detail

/// Writes H(plane) into `out`, resizing it if needed.
inline void lift2_into(const Plane& plane, const HankelConfig& cfg, Eigen::MatrixXcd& out)
{
    cfg.validate(plane.rows(), plane.cols());
    out.resize(cfg.lifted_rows(plane.rows(), plane.cols()), cfg.lifted_cols());
    detail::for_each_lifted(plane.rows(), plane.cols(), cfg,
                            [&](Index r, Index c, Index i, Index j) { out(r, c) = plane(i, j); });
}

inline LiftedMatrix lift2(const Plane& plane, const HankelConfig& cfg)
{
    LiftedMatrix m;
    lift2_into(plane, cfg, m.entries);
    m.plane_rows = plane.rows();
    m.plane_cols = plane.cols();
    m.cfg        = cfg;
    return m;
}

/// H^*(mat): each plane sample collects the sum of the entries it feeds.
inline Plane adjoint2(const Eigen::MatrixXcd& mat, Index rows, Index cols, const HankelConfig& cfg)
{
    cfg.validate(rows, cols);
    if (mat.rows() != cfg.lifted_rows(rows, cols) || mat.cols() != cfg.lifted_cols())
        throw ContractError("adjoint2: matrix shape inconsistent with plane " + std::to_string(rows) + "x" +
                            std::to_string(cols));
    Plane out = Plane::Zero(rows, cols);
    detail::for_each_lifted(rows, cols, cfg, [&](Index r, Index c, Index i, Index j) { out(i, j) += mat(r, c); });
    return out;
}

inline Plane adjoint2(const LiftedMatrix& mat)
{
    return adjoint2(mat.entries, mat.plane_rows, mat.plane_cols, mat.cfg);
}

/// Number of lifted entries sourced from each plane sample (p q everywhere
/// in wrap mode).
inline RealPlane multiplicity(Index rows, Index cols, const HankelConfig& cfg)
{
    cfg.validate(rows, cols);
    if (cfg.wrap)
        return RealPlane::Constant(rows, cols, static_cast<double>(cfg.p * cfg.q));
    RealPlane m = RealPlane::Zero(rows, cols);
    detail::for_each_lifted(rows, cols, cfg, [&](Index, Index, Index i, Index j) { m(i, j) += 1.0; });
    return m;
}

/// Left inverse of lift2: adjoint divided by multiplicity.
inline Plane pseudo_inverse2(const Eigen::MatrixXcd& mat, Index rows, Index cols, const HankelConfig& cfg)
{
    Plane out = adjoint2(mat, rows, cols, cfg);
    if (cfg.wrap)
        return out / static_cast<double>(cfg.p * cfg.q);
    return out.cwiseQuotient(multiplicity(rows, cols, cfg).cast<Complex>());
}

inline Plane pseudo_inverse2(const LiftedMatrix& mat)
{
    return pseudo_inverse2(mat.entries, mat.plane_rows, mat.plane_cols, mat.cfg);
}

/// Count of singular values above tol * sigma_max (0 for a zero matrix).
inline Index numeric_rank(const Eigen::MatrixXcd& mat, double tol)
{
    detail::require(tol >= 0.0, "numeric_rank: tol must be non-negative");
    if (mat.size() == 0)
        return 0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(mat);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0)
        return 0;
    const double cut = tol * s(0);
    Index r          = 0;
    for (Index k = 0; k < s.size(); ++k)
        r += s(k) > cut;
    return r;
}

inline Index numeric_rank(const LiftedMatrix& mat, double tol) { return numeric_rank(mat.entries, tol); }

} // namespace alohaqsm

#endif // ALOHAQSM_HANKEL_HPP
