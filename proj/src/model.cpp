#include "paddle/model.hpp"

#include <cmath>

#include "paddle/error.hpp"

namespace paddle {

double entropy(const Vector& p)
{
    double h = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        h -= xlogx(p[k]);
    }
    return h;
}

Matrix squared_distances(const Matrix& z, const Matrix& w)
{
    Matrix d(z.rows(), w.rows());
    for (Eigen::Index n = 0; n < z.rows(); ++n) {
        for (Eigen::Index k = 0; k < w.rows(); ++k) {
            d(n, k) = (z.row(n) - w.row(k)).squaredNorm();
        }
    }
    return d;
}

Vector class_proportions(const AssignmentMatrix& u)
{
    return u.query_rows().colwise().sum().transpose() / static_cast<double>(u.n_query);
}

double data_term(const AssignmentMatrix& u, const PrototypeSet& w, const Matrix& z)
{
    return 0.5 * u.rows.cwiseProduct(squared_distances(z, w.w)).sum();
}

double objective(const AssignmentMatrix& u, const PrototypeSet& w, const Matrix& z,
                 double lambda)
{
    const double fit = data_term(u, w, z);
    if (lambda == 0.0) {
        return fit;
    }
    return fit + lambda * entropy(class_proportions(u));
}

int label_cost(const Vector& proportions, double threshold)
{
    int count = 0;
    for (Eigen::Index k = 0; k < proportions.size(); ++k) {
        if (proportions[k] > threshold) {
            ++count;
        }
    }
    return count;
}

int label_cost(const AssignmentMatrix& u, double threshold)
{
    return label_cost(class_proportions(u), threshold);
}

double regularized_objective(const AssignmentMatrix& u, const PrototypeSet& w,
                             const DualVector& v, const Matrix& z, double lambda,
                             double epsilon)
{
    const Vector shifted = class_proportions(u).array() + epsilon;
    double barrier = 0.0;
    for (Eigen::Index n = 0; n < u.rows.rows(); ++n) {
        for (Eigen::Index k = 0; k < u.rows.cols(); ++k) {
            barrier += xlogx(u.rows(n, k));
        }
    }
    const double conjugate = (v.v.array() - 1.0).exp().sum();
    return data_term(u, w, z) + lambda * conjugate - lambda * v.v.dot(shifted) + barrier;
}

std::vector<int> predict_labels(const AssignmentMatrix& u)
{
    std::vector<int> labels(u.n_query);
    for (std::size_t n = 0; n < u.n_query; ++n) {
        const auto row = u.rows.row(static_cast<Eigen::Index>(n));
        int best = 0;
        for (Eigen::Index k = 1; k < row.size(); ++k) {
            if (row[k] > row[best]) {
                best = static_cast<int>(k);
            }
        }
        labels[n] = best;
    }
    return labels;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth)
{
    if (predicted.size() != truth.size() || truth.empty()) {
        throw ConfigError("accuracy needs two non-empty label vectors of equal length");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        hits += predicted[i] == truth[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double binary_entropy(double p)
{
    return -xlogx(p) - xlogx(1.0 - p);
}

std::vector<RelaxationPoint> relaxation_curve(int n_points)
{
    if (n_points < 2) {
        throw ConfigError("relaxation curve needs at least two points");
    }
    std::vector<RelaxationPoint> curve;
    curve.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double p = static_cast<double>(i) / static_cast<double>(n_points - 1);
        Vector prop(2);
        prop << p, 1.0 - p;
        curve.push_back({p, binary_entropy(p), label_cost(prop, 0.0)});
    }
    return curve;
}

} // namespace paddle
