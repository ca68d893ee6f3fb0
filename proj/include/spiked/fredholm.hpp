#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

#include "spiked/quadrature.hpp"

namespace spiked {

// Weighted Nystrom matrix sqrt(w_i) K(x_i, y_j) sqrt(w_j).
struct DiscretizedOperator {
    Eigen::MatrixXd matrix;
    QuadratureRule row_rule;
    QuadratureRule col_rule;
    std::string tag;
};

using Kernel = std::function<double(double, double)>;

DiscretizedOperator discretize(const Kernel& kernel, const QuadratureRule& rule, std::string tag = {});
DiscretizedOperator discretize(const Kernel& kernel, const QuadratureRule& rows, const QuadratureRule& cols,
                               std::string tag = {});

// Weights a matrix of raw kernel values K(x_i, y_j).
Eigen::MatrixXd weight_kernel_matrix(const Eigen::MatrixXd& raw, const QuadratureRule& rows,
                                     const QuadratureRule& cols);

struct DeterminantValue {
    double value;
    double log_abs;
    int sign;
};

DeterminantValue fredholm_det_detailed(const Eigen::MatrixXd& weighted);
double fredholm_det(const DiscretizedOperator& op);
double fredholm_det(const Eigen::MatrixXd& weighted);

inline constexpr double resolvent_condition_limit = 1e12;

// Values at the nodes of (I - K)^{-1} f, given f at the nodes.
Eigen::VectorXd resolvent_apply(const DiscretizedOperator& op, const Eigen::VectorXd& f);

// sum_i w_i f_i g(x_i)
double inner_product(const QuadratureRule& rule, const Eigen::VectorXd& f, const Eigen::VectorXd& g);

// det(I - [[K11, K12], [K21, K22]]) for already weighted blocks.
double block_det_2x2(const Eigen::MatrixXd& k11, const Eigen::MatrixXd& k12, const Eigen::MatrixXd& k21,
                     const Eigen::MatrixXd& k22);

}  // namespace spiked
