#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace salm {

/// Economy-size SVD a = u · diag(sigma) · vᵀ with r = min(m, n) columns.
struct SvdFactors {
    Eigen::MatrixXd u;
    Eigen::VectorXd sigma;  // nonincreasing, nonnegative
    Eigen::MatrixXd v;
};

/// Nonnegative vector shrinkage: out_i = max(x_i - tau, 0).
/// Throws ParameterError for tau <= 0 and DomainError for negative entries.
Eigen::VectorXd vector_shrink(const Eigen::Ref<const Eigen::VectorXd>& x, double tau);

/// Full economy SVD (divide and conquer). Throws NumericalError on
/// non-finite input or when the decomposition does not converge.
SvdFactors svd_full(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// Result of singular value thresholding with the by-products the solver reports.
struct ShrinkResult {
    Eigen::MatrixXd matrix;
    double nuclear_norm = 0.0;  // sum of the shrunk singular values
    std::size_t rank = 0;       // shrunk values above 1e-13 · sigma_max of the input
};

/// Singular value thresholding D_tau(a) = U diag(s_tau(sigma)) Vᵀ.
Eigen::MatrixXd matrix_shrink(const Eigen::Ref<const Eigen::MatrixXd>& a, double tau);

ShrinkResult matrix_shrink_detailed(const Eigen::Ref<const Eigen::MatrixXd>& a, double tau);

/// Sum of singular values.
double nuclear_norm(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// Relative cutoff below which singular values count as zero for rank reporting.
inline constexpr double kRankCutoff = 1e-13;

}  // namespace salm
