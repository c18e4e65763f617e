#include "tenfact/mlsvd.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace tenfact {

namespace {

/// Flip column c of u (and, when given, row c of v_t) so the largest-magnitude
/// entry of the column is positive; ties broken by lowest row index.
void fix_sign(Matrix& u, Index c, Matrix* v_t) {
    Index pivot = 0;
    double best = -1.0;
    for (Index r = 0; r < u.rows(); ++r) {
        const double mag = std::abs(u(r, c));
        if (mag > best) {
            best = mag;
            pivot = r;
        }
    }
    if (u(pivot, c) < 0.0) {
        u.col(c) = -u.col(c);
        if (v_t != nullptr) v_t->row(c) = -v_t->row(c);
    }
}

}  // namespace

Index numerical_rank(const Matrix& m, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("numerical_rank: tolerance must be positive");
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sigma = svd.singularValues();
    if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
    Index rank = 0;
    for (Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > tol * sigma(0)) ++rank;
    }
    return rank;
}

Index mode_n_rank(const DenseTensor& t, Index mode, double tol) {
    return numerical_rank(unfold(t, mode), tol);
}

std::optional<Mode1Factorization> mode1_factorize(const DenseTensor& t, Index rank_budget, double tol) {
    if (rank_budget < 1) throw std::invalid_argument("mode1_factorize: rank budget must be >= 1");
    if (t.order() < 1) throw ShapeError("mode1_factorize: tensor must have order >= 1");
    const Matrix m = unfold(t, 1);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    if (sigma.size() == 0 || sigma(0) == 0.0) return std::nullopt;

    Index numerical = 0;
    for (Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > tol * sigma(0)) ++numerical;
    }
    const Index rank = std::min(numerical, rank_budget);

    Matrix u = svd.matrixU().leftCols(rank);
    Matrix scaled_vt = sigma.head(rank).asDiagonal() * Matrix(svd.matrixV().leftCols(rank).transpose());
    for (Index c = 0; c < rank; ++c) fix_sign(u, c, &scaled_vt);

    std::vector<Index> right_dims = t.shape().dims();
    right_dims[0] = rank;
    Mode1Factorization out;
    out.left = std::move(u);
    out.right = fold(scaled_vt, Shape(right_dims), 1);
    out.rank = rank;
    out.numerical_rank = numerical;
    return out;
}

MlsvdResult mlsvd(const DenseTensor& t, double tol) {
    if (t.order() < 1) throw ShapeError("mlsvd: tensor must have order >= 1");
    (void)tol;  // ranks are not truncated here; the cutoff only orders decisions elsewhere

    MlsvdResult out;
    out.factors.reserve(static_cast<std::size_t>(t.order()));
    DenseTensor core = t;
    for (Index n = 1; n <= t.order(); ++n) {
        Eigen::JacobiSVD<Matrix> svd(unfold(t, n), Eigen::ComputeFullU);
        Matrix u = svd.matrixU();
        for (Index c = 0; c < u.cols(); ++c) fix_sign(u, c, nullptr);
        core = mode_n_product(core, u.transpose(), n);
        out.factors.push_back(std::move(u));
    }
    out.core = std::move(core);

    // n-mode singular values are the Frobenius norms of the core's subtensors
    // with the n-th index fixed.
    out.mode_singular_values.resize(static_cast<std::size_t>(t.order()));
    for (Index n = 1; n <= t.order(); ++n) {
        const Matrix m = unfold(out.core, n);
        auto& sv = out.mode_singular_values[static_cast<std::size_t>(n - 1)];
        sv.resize(static_cast<std::size_t>(m.rows()));
        for (Index i = 0; i < m.rows(); ++i) sv[static_cast<std::size_t>(i)] = m.row(i).norm();
    }
    return out;
}

}  // namespace tenfact
