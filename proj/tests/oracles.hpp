#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the solver code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "paddle/types.hpp"

namespace oracle {

using paddle::Matrix;
using paddle::Vector;

/// Uniform draw from the simplex (flat Dirichlet) using std::random.
inline Vector random_simplex(std::mt19937_64& gen, int k)
{
    std::exponential_distribution<double> expo(1.0);
    Vector v(k);
    for (int j = 0; j < k; ++j) {
        v[j] = expo(gen);
    }
    return v / v.sum();
}

inline Matrix random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols,
                            double scale = 1.0)
{
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = normal(gen);
        }
    }
    return m;
}

/// Random task: k classes, 1..3 support points per class, n_query query
/// points, Gaussian blobs around random centers.
inline paddle::TaskInstance random_task(std::mt19937_64& gen, int k, int n_query, int dim,
                                        double spread = 3.0)
{
    std::uniform_int_distribution<int> shots(1, 3);
    std::uniform_int_distribution<int> cls(0, k - 1);
    const Matrix centers = random_matrix(gen, k, dim, spread);
    std::vector<int> support_labels;
    std::vector<Eigen::RowVectorXd> support_rows;
    for (int c = 0; c < k; ++c) {
        const int s = shots(gen);
        for (int i = 0; i < s; ++i) {
            support_rows.push_back(centers.row(c) + random_matrix(gen, 1, dim));
            support_labels.push_back(c);
        }
    }
    Matrix support(static_cast<Eigen::Index>(support_rows.size()), dim);
    for (std::size_t i = 0; i < support_rows.size(); ++i) {
        support.row(static_cast<Eigen::Index>(i)) = support_rows[i];
    }
    Matrix query(n_query, dim);
    std::vector<int> truth;
    for (int n = 0; n < n_query; ++n) {
        const int c = cls(gen);
        query.row(n) = centers.row(c) + random_matrix(gen, 1, dim);
        truth.push_back(c);
    }
    return paddle::TaskInstance::from_blocks(support, support_labels, query, truth, k);
}

/// Plain double loop: 1/2 sum_n sum_k u_nk ||w_k - z_n||^2.
inline double data_term(const Matrix& u, const Matrix& w, const Matrix& z)
{
    double total = 0.0;
    for (Eigen::Index n = 0; n < z.rows(); ++n) {
        for (Eigen::Index k = 0; k < w.rows(); ++k) {
            double d = 0.0;
            for (Eigen::Index j = 0; j < z.cols(); ++j) {
                d += (w(k, j) - z(n, j)) * (w(k, j) - z(n, j));
            }
            total += 0.5 * u(n, k) * d;
        }
    }
    return total;
}

/// Central finite difference of f at x along coordinate i.
inline double central_difference(const std::function<double(const Matrix&)>& f, Matrix x,
                                 Eigen::Index i, Eigen::Index j, double h)
{
    const double x0 = x(i, j);
    x(i, j) = x0 + h;
    const double up = f(x);
    x(i, j) = x0 - h;
    const double down = f(x);
    return (up - down) / (2.0 * h);
}

/// Exhaustive search over a grid of the K=2 or K=3 simplex for the point
/// closest to v.
inline Vector grid_project(const Vector& v, double step)
{
    const int steps = static_cast<int>(std::lround(1.0 / step));
    Vector best;
    double best_dist = std::numeric_limits<double>::infinity();
    if (v.size() == 2) {
        for (int i = 0; i <= steps; ++i) {
            Vector p(2);
            p << i * step, 1.0 - i * step;
            const double d = (p - v).squaredNorm();
            if (d < best_dist) {
                best_dist = d;
                best = p;
            }
        }
    } else {
        for (int i = 0; i <= steps; ++i) {
            for (int j = 0; i + j <= steps; ++j) {
                Vector p(3);
                p << i * step, j * step, 1.0 - (i + j) * step;
                const double d = (p - v).squaredNorm();
                if (d < best_dist) {
                    best_dist = d;
                    best = p;
                }
            }
        }
    }
    return best;
}

/// Hard partially-supervised K-means by enumeration: every labeling of the
/// query rows, prototypes as class means over support plus assigned query.
/// Returns the labeling with the lowest energy.
inline std::vector<int> brute_force_hard_kmeans(const paddle::TaskInstance& task)
{
    const int k = task.k_total;
    const auto nq = static_cast<int>(task.n_query);
    std::vector<int> labels(static_cast<std::size_t>(nq), 0);
    std::vector<int> best;
    double best_energy = std::numeric_limits<double>::infinity();
    long combos = 1;
    for (int i = 0; i < nq; ++i) {
        combos *= k;
    }
    for (long code = 0; code < combos; ++code) {
        long c = code;
        for (int i = 0; i < nq; ++i) {
            labels[static_cast<std::size_t>(i)] = static_cast<int>(c % k);
            c /= k;
        }
        Matrix sums = Matrix::Zero(k, static_cast<Eigen::Index>(task.dim()));
        Vector counts = Vector::Zero(k);
        auto add = [&](Eigen::Index row, int label) {
            sums.row(label) += task.features.row(row);
            counts[label] += 1.0;
        };
        for (int i = 0; i < nq; ++i) {
            add(i, labels[static_cast<std::size_t>(i)]);
        }
        for (std::size_t s = 0; s < task.support_labels.size(); ++s) {
            add(nq + static_cast<Eigen::Index>(s), task.support_labels[s]);
        }
        double energy = 0.0;
        auto cost = [&](Eigen::Index row, int label) {
            energy += 0.5 * (task.features.row(row) - sums.row(label) / counts[label]).squaredNorm();
        };
        for (int i = 0; i < nq; ++i) {
            cost(i, labels[static_cast<std::size_t>(i)]);
        }
        for (std::size_t s = 0; s < task.support_labels.size(); ++s) {
            cost(nq + static_cast<Eigen::Index>(s), task.support_labels[s]);
        }
        if (energy < best_energy) {
            best_energy = energy;
            best = labels;
        }
    }
    return best;
}

} // namespace oracle
