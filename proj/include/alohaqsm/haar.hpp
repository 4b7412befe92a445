#ifndef ALOHAQSM_HAAR_HPP
#define ALOHAQSM_HAAR_HPP

#include <cmath>
#include <numbers>

#include <alohaqsm/fft.hpp>
#include <alohaqsm/hankel.hpp>

namespace alohaqsm
{

/// Spectrum of the Haar detail filter, (1 - exp(-2 pi i k / n)) / sqrt(2),
/// sampled on the centered frequency grid of an axis of length n.
inline Eigen::VectorXcd haar_axis_response(Index n)
{
    Eigen::VectorXcd w(n);
    for (Index i = 0; i < n; ++i) {
        const double k = static_cast<double>(frequency_index(static_cast<std::size_t>(i), static_cast<std::size_t>(n)));
        w(i)           = (1.0 - std::polar(1.0, -2.0 * std::numbers::pi * k / static_cast<double>(n))) / std::sqrt(2.0);
    }
    return w;
}

/// W(k1, k2) = w(k1) w(k2) for an M x N plane.
inline Plane haar_weights(Index rows, Index cols)
{
    return haar_axis_response(rows) * haar_axis_response(cols).transpose();
}

inline Plane haar_weight(const Plane& plane)
{
    return plane.cwiseProduct(haar_weights(plane.rows(), plane.cols()));
}

///
/// Undoes haar_weight where |W| >= eps_weight * max|W|; below that floor the
/// sample is taken from `init_plane` instead (W vanishes on the k1 = 0 and
/// k2 = 0 lines, so those samples cannot be recovered by division).
///
inline Plane haar_unweight(const Plane& plane, const Plane& init_plane, double eps_weight)
{
    detail::require(plane.rows() == init_plane.rows() && plane.cols() == init_plane.cols(),
                    "haar_unweight: plane shape mismatch");
    detail::require(eps_weight > 0.0 && eps_weight < 1.0, "haar_unweight: eps_weight must lie in (0, 1)");
    const Plane w      = haar_weights(plane.rows(), plane.cols());
    const double floor = eps_weight * w.cwiseAbs().maxCoeff();
    Plane out(plane.rows(), plane.cols());
    for (Index j = 0; j < plane.cols(); ++j)
        for (Index i = 0; i < plane.rows(); ++i)
            out(i, j) = std::abs(w(i, j)) >= floor ? plane(i, j) / w(i, j) : init_plane(i, j);
    return out;
}

/// Samples that survive unweighting (|W| at or above the floor).
inline Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> haar_passband(Index rows, Index cols, double eps_weight)
{
    const Plane w      = haar_weights(rows, cols);
    const double floor = eps_weight * w.cwiseAbs().maxCoeff();
    return w.cwiseAbs().array() >= floor;
}

} // namespace alohaqsm

#endif // ALOHAQSM_HAAR_HPP
