#ifndef DUALPATH_LOSS_HPP
#define DUALPATH_LOSS_HPP

#include <cmath>
#include <cstddef>
#include <string>

#include "error.hpp"
#include "matrix.hpp"
#include "transpose.hpp"

namespace dualpath
{

namespace detail
{
inline std::string shape(std::size_t r, std::size_t c)
{
    return std::to_string(r) + "x" + std::to_string(c);
}

inline void require_same_shape(const Matrix<double>& a, const Matrix<double>& b, const char* what)
{
    if (!a.same_shape(b))
        throw DimensionError(std::string(what) + ": shape " + shape(a.rows(), a.cols()) + " does not match " +
                             shape(b.rows(), b.cols()));
}
} // namespace detail

/// Frobenius distance between two equally shaped matrices.
inline double frobenius_distance(const Matrix<double>& a, const Matrix<double>& b)
{
    detail::require_same_shape(a, b, "frobenius_distance");
    double sum = 0.0;
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t k = 0; k < av.size(); ++k) {
        const double diff = av[k] - bv[k];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

/// Duality regularizer: L2 distance between one direction's writing
/// probabilities and the transposed path of the other direction.
inline double omega(const WritingProbabilityMatrix& alpha, const GammaMatrix& gamma)
{
    return frobenius_distance(alpha.scores(), gamma.dense());
}

/// d omega / d alpha, holding gamma fixed. Undefined where alpha == gamma.
inline Matrix<double> omega_gradient(const Matrix<double>& alpha, const Matrix<double>& gamma)
{
    const double norm = frobenius_distance(alpha, gamma);
    if (norm == 0.0)
        throw NotDifferentiable("omega_gradient: alpha equals gamma, the L2 norm has no gradient there");
    Matrix<double> grad(alpha.rows(), alpha.cols());
    const auto av = alpha.values();
    const auto gv = gamma.values();
    auto out = grad.values();
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = (av[k] - gv[k]) / norm;
    return grad;
}

inline Matrix<double> omega_gradient(const WritingProbabilityMatrix& alpha, const GammaMatrix& gamma)
{
    return omega_gradient(alpha.scores(), gamma.dense());
}

struct DualLossReport
{
    double omega_f = 0.0;
    double omega_b = 0.0;
    double lambda_dual = 1.0;
    double total_reg = 0.0;
    bool monotonized_f = false;
    bool monotonized_b = false;
};

inline constexpr double default_lambda_dual = 1.0;

/// lambda_dual * (||alpha_f - gamma_b|| + ||alpha_b - gamma_f||), where each
/// gamma is the other direction's transposed path. alpha_f is I x J and
/// alpha_b is J x I.
inline DualLossReport dual_regularizer(const WritingProbabilityMatrix& alpha_f, const WritingProbabilityMatrix& alpha_b,
                                       double lambda_dual = default_lambda_dual,
                                       Monotonicity mode = Monotonicity::repair)
{
    if (!(lambda_dual >= 0.0) || !std::isfinite(lambda_dual))
        throw InvalidInput("dual_regularizer: lambda_dual must be finite and nonnegative");
    if (alpha_f.target_len() != alpha_b.source_len() || alpha_f.source_len() != alpha_b.target_len())
        throw DimensionError("dual_regularizer: forward matrix is " +
                             detail::shape(alpha_f.scores().rows(), alpha_f.scores().cols()) +
                             " but backward matrix is " +
                             detail::shape(alpha_b.scores().rows(), alpha_b.scores().cols()));

    const TransposeResult from_f = transpose_path(alpha_f, mode);
    const TransposeResult from_b = transpose_path(alpha_b, mode);

    DualLossReport r;
    r.omega_f = omega(alpha_f, from_b.gamma);
    r.omega_b = omega(alpha_b, from_f.gamma);
    r.lambda_dual = lambda_dual;
    r.total_reg = lambda_dual * (r.omega_f + r.omega_b);
    r.monotonized_f = from_f.monotonized;
    r.monotonized_b = from_b.monotonized;
    return r;
}

} // namespace dualpath

#endif // DUALPATH_LOSS_HPP
