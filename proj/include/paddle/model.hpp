#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "paddle/types.hpp"

namespace paddle {

/// t ln t with the convention 0 ln 0 = 0.
inline double xlogx(double t)
{
    return t > 0.0 ? t * std::log(t) : 0.0;
}

/// Shannon entropy -sum p ln p of a probability vector.
double entropy(const Vector& p);

/// N x K matrix of squared Euclidean distances ||z_n - w_k||^2.
Matrix squared_distances(const Matrix& z, const Matrix& w);

/// Mean query assignment per class (support rows are excluded).
Vector class_proportions(const AssignmentMatrix& u);

/// Data-fitting term over all N rows plus lambda times the entropy of the
/// class proportions.
double objective(const AssignmentMatrix& u, const PrototypeSet& w, const Matrix& z,
                 double lambda);

/// Half the assignment-weighted squared distances, summed over all rows.
double data_term(const AssignmentMatrix& u, const PrototypeSet& w, const Matrix& z);

/// Number of classes whose proportion exceeds `threshold`.
int label_cost(const Vector& proportions, double threshold = 0.0);
int label_cost(const AssignmentMatrix& u, double threshold = 0.0);

/// Primal-dual energy with entropic barrier and epsilon-shifted proportions:
///   data + lambda sum_k exp(v_k - 1) - lambda <V, AU + eps 1> + sum_{n,k} u ln u
double regularized_objective(const AssignmentMatrix& u, const PrototypeSet& w,
                             const DualVector& v, const Matrix& z, double lambda,
                             double epsilon);

/// Per-query-row argmax, ties to the lowest class index.
std::vector<int> predict_labels(const AssignmentMatrix& u);

/// Fraction of positions where the two label vectors agree.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Binary entropy of (p, 1 - p); the continuous relaxation of the K=2 label cost.
double binary_entropy(double p);

struct RelaxationPoint {
    double proportion;
    double relaxed_cost;
    int label_cost;
};

/// Samples the K=2 relaxation curve on `n_points` evenly spaced proportions
/// in [0, 1] (endpoints included).
std::vector<RelaxationPoint> relaxation_curve(int n_points);

} // namespace paddle
