#include "salm/prox.hpp"

#include <string>

#include <Eigen/SVD>

#include "salm/errors.hpp"

namespace salm {

Eigen::VectorXd vector_shrink(const Eigen::Ref<const Eigen::VectorXd>& x, double tau) {
    if (!(tau > 0.0)) throw ParameterError("vector_shrink: tau must be positive, got " + std::to_string(tau));
    if ((x.array() < 0.0).any()) throw DomainError("vector_shrink: input has a negative entry");
    return (x.array() - tau).max(0.0).matrix();
}

SvdFactors svd_full(const Eigen::Ref<const Eigen::MatrixXd>& a) {
    if (!a.allFinite()) throw NumericalError("svd_full: input has non-finite entries");

    // BDCSVD works on the tall orientation; factor the transpose of wide inputs.
    const bool wide = a.cols() > a.rows();
    Eigen::BDCSVD<Eigen::MatrixXd> svd;
    if (wide) {
        svd.compute(a.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    } else {
        svd.compute(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    }
    if (svd.info() != Eigen::Success) throw NumericalError("svd_full: decomposition did not converge");

    SvdFactors out;
    out.sigma = svd.singularValues();
    if (wide) {
        out.u = svd.matrixV();
        out.v = svd.matrixU();
    } else {
        out.u = svd.matrixU();
        out.v = svd.matrixV();
    }
    if (!out.sigma.allFinite()) throw NumericalError("svd_full: decomposition produced non-finite values");
    return out;
}

ShrinkResult matrix_shrink_detailed(const Eigen::Ref<const Eigen::MatrixXd>& a, double tau) {
    if (!(tau > 0.0)) throw ParameterError("matrix_shrink: tau must be positive, got " + std::to_string(tau));

    ShrinkResult out;
    if (a.size() == 0) {
        out.matrix = a;
        return out;
    }
    const SvdFactors f = svd_full(a);
    const Eigen::VectorXd s = vector_shrink(f.sigma, tau);

    // s is nonincreasing, so the nonzero part is a leading block.
    Eigen::Index kept = 0;
    while (kept < s.size() && s[kept] > 0.0) ++kept;

    out.matrix.noalias() = f.u.leftCols(kept) * s.head(kept).asDiagonal() * f.v.leftCols(kept).transpose();
    out.nuclear_norm = s.head(kept).sum();
    const double cutoff = kRankCutoff * (f.sigma.size() ? f.sigma[0] : 0.0);
    for (Eigen::Index i = 0; i < kept; ++i) {
        if (s[i] > cutoff) ++out.rank;
    }
    return out;
}

Eigen::MatrixXd matrix_shrink(const Eigen::Ref<const Eigen::MatrixXd>& a, double tau) {
    return matrix_shrink_detailed(a, tau).matrix;
}

double nuclear_norm(const Eigen::Ref<const Eigen::MatrixXd>& a) {
    if (a.size() == 0) return 0.0;
    return svd_full(a).sigma.sum();
}

}  // namespace salm
