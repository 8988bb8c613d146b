#include "smpr/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace smpr {

double GaussRule::integrate(const std::vector<double>& values) const {
    double sum = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * values[i];
    return sum;
}

GaussRule gauss_rule(const OrthoBasis& basis, int n) {
    if (n < 1) throw validation_error("quadrature needs at least one node");
    if (n > basis.degree() + 1)
        throw validation_error("basis degree too low for " + std::to_string(n) + "-node rule");

    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        jacobi(i, i) = basis.jacobi_a(i);
        if (i > 0) {
            const double off = std::sqrt(basis.jacobi_b(i));
            jacobi(i, i - 1) = off;
            jacobi(i - 1, i) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    if (solver.info() != Eigen::Success)
        throw numeric_error("Golub-Welsch eigen decomposition failed");

    GaussRule rule;
    rule.nodes.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        rule.nodes[static_cast<size_t>(i)] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[static_cast<size_t>(i)] = v0 * v0;  // total mass is 1
    }
    return rule;
}

GaussRule gauss_rule(const MarginalSpec& spec, int n) {
    return gauss_rule(basis_from_recurrence(spec, n), n);
}

}  // namespace smpr
