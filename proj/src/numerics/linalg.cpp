#include "combipen/numerics/linalg.hpp"

namespace combipen::numerics {

Vector cholesky_solve(const Matrix& q, const Vector& b) {
    require(q.rows() == q.cols() && q.rows() == b.size(), "cholesky_solve: dimension mismatch");
    const Eigen::LLT<Matrix> llt(q);
    if (llt.info() != Eigen::Success) throw InvalidArgument("cholesky_solve: matrix is not positive definite");
    return llt.solve(b);
}

double lambda_max_gram(const Matrix& x) {
    if (x.cols() == 0 || x.rows() == 0) return 0.0;
    Vector v = Vector::Ones(x.cols()) / std::sqrt(static_cast<double>(x.cols()));
    double lambda = 0.0;
    for (int it = 0; it < 20; ++it) {
        const Vector w = x.transpose() * (x * v);
        const double next = w.norm();
        if (next == 0.0) return 0.0;
        v = w / next;
        const bool done = std::abs(next - lambda) <= 1e-6 * next;
        lambda = next;
        if (done) break;
    }
    return lambda;
}

double min_eigenvalue(const Matrix& q) {
    require(q.rows() == q.cols(), "min_eigenvalue: matrix must be square");
    if (q.rows() == 0) return 0.0;
    const Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace combipen::numerics
