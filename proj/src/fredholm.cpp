#include "spiked/fredholm.hpp"

#include <cmath>

#include "spiked/errors.hpp"

namespace spiked {

Eigen::MatrixXd weight_kernel_matrix(const Eigen::MatrixXd& raw, const QuadratureRule& rows,
                                     const QuadratureRule& cols) {
    if (raw.rows() != rows.size() || raw.cols() != cols.size())
        throw DomainError("weight_kernel_matrix: shape mismatch");
    const Eigen::VectorXd sr = rows.weights.cwiseSqrt(), sc = cols.weights.cwiseSqrt();
    return sr.asDiagonal() * raw * sc.asDiagonal();
}

DiscretizedOperator discretize(const Kernel& kernel, const QuadratureRule& rows, const QuadratureRule& cols,
                               std::string tag) {
    Eigen::MatrixXd raw(rows.size(), cols.size());
    for (int i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < cols.size(); ++j) {
            double v;
            try {
                v = kernel(rows.nodes(i), cols.nodes(j));
            } catch (const std::exception& e) {
                throw KernelEvaluationError(e.what(), i, j);
            }
            if (!std::isfinite(v)) throw KernelEvaluationError("non-finite kernel value", i, j);
            raw(i, j) = v;
        }
    }
    return {weight_kernel_matrix(raw, rows, cols), rows, cols, std::move(tag)};
}

DiscretizedOperator discretize(const Kernel& kernel, const QuadratureRule& rule, std::string tag) {
    return discretize(kernel, rule, rule, std::move(tag));
}

DeterminantValue fredholm_det_detailed(const Eigen::MatrixXd& weighted) {
    if (weighted.rows() != weighted.cols()) throw DomainError("fredholm_det: matrix must be square");
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(weighted.rows(), weighted.cols()) - weighted;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::MatrixXd& f = lu.matrixLU();
    double log_abs = 0;
    int sign = lu.permutationP().determinant();
    for (int i = 0; i < f.rows(); ++i) {
        const double d = f(i, i);
        if (d == 0) return {0.0, -INFINITY, 0};
        if (d < 0) sign = -sign;
        log_abs += std::log(std::abs(d));
    }
    if (!std::isfinite(log_abs) || log_abs > 700)
        throw ScaledDeterminantError("fredholm_det: determinant overflows", log_abs);
    return {sign * std::exp(log_abs), log_abs, sign};
}

double fredholm_det(const Eigen::MatrixXd& weighted) { return fredholm_det_detailed(weighted).value; }

double fredholm_det(const DiscretizedOperator& op) { return fredholm_det(op.matrix); }

Eigen::VectorXd resolvent_apply(const DiscretizedOperator& op, const Eigen::VectorXd& f) {
    const int n = static_cast<int>(op.matrix.rows());
    if (op.matrix.cols() != n || f.size() != n) throw DomainError("resolvent_apply: shape mismatch");
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - op.matrix;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rcond = lu.rcond();
    const double cond = rcond > 0 ? 1.0 / rcond : INFINITY;
    if (!(cond <= resolvent_condition_limit))
        throw SingularityError("resolvent_apply: I - K is numerically singular", cond);
    const Eigen::VectorXd sw = op.row_rule.weights.cwiseSqrt();
    const Eigen::VectorXd y = lu.solve(sw.cwiseProduct(f));
    return y.cwiseQuotient(sw);
}

double inner_product(const QuadratureRule& rule, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
    if (f.size() != rule.size() || g.size() != rule.size()) throw DomainError("inner_product: shape mismatch");
    return (rule.weights.array() * f.array() * g.array()).sum();
}

double block_det_2x2(const Eigen::MatrixXd& k11, const Eigen::MatrixXd& k12, const Eigen::MatrixXd& k21,
                     const Eigen::MatrixXd& k22) {
    const auto n1 = k11.rows(), n2 = k22.rows();
    if (k11.cols() != n1 || k22.cols() != n2 || k12.rows() != n1 || k12.cols() != n2 || k21.rows() != n2 ||
        k21.cols() != n1)
        throw DomainError("block_det_2x2: block shapes are inconsistent");
    Eigen::MatrixXd k(n1 + n2, n1 + n2);
    k << k11, k12, k21, k22;
    return fredholm_det(k);
}

}  // namespace spiked
