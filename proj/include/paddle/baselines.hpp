#pragma once

#include <vector>

#include "paddle/types.hpp"

namespace paddle {

/// PADDLE's update cycle with lambda = 0: soft K-means with support rows
/// pinned to their labels.
SolverState kmeans_partial(const TaskInstance& task, SolverConfig config);

/// Euclidean projection onto the probability simplex (sort and threshold).
Vector simplex_project(const Vector& v);

struct PgdConfig {
    double step_size = 1e-3;
    int max_iters = 20000;
    double tol = 1e-6;
    double moment_decay_1 = 0.9;
    double moment_decay_2 = 0.999;
    double adam_epsilon = 1e-8;
    /// Also require the max-norm prototype change to fall below `tol` before
    /// stopping. Off by default: the stopping criterion is the assignment
    /// change, as for PADDLE.
    bool require_prototype_convergence = false;
    bool record_trace = false;

    void validate() const;
};

/// Gradient of the objective with respect to the query rows of U:
/// 1/2 ||w_k - z_n||^2 - (lambda / |Q|) (ln u_hat_k + 1).
Matrix objective_grad_assignments(const AssignmentMatrix& u, const PrototypeSet& w,
                                  const Matrix& z, double lambda);

/// Gradient of the objective with respect to the prototypes:
/// sum_n u_{n,k} (w_k - z_n).
Matrix objective_grad_prototypes(const AssignmentMatrix& u, const PrototypeSet& w,
                                 const Matrix& z);

/// Joint Adam steps on the query rows of U and on W, each U row projected
/// back onto the simplex after every step. Before the Adam update each U
/// gradient row is projected onto the tangent cone of the simplex at the
/// current row, so moments never push against an active bound. Starts from
/// init_state. The trace objective is the unregularized objective. Throws DivergenceError when the
/// iterates stop being finite or the prototype change exceeds 1e6.
SolverState pgd_solve(const TaskInstance& task, const PgdConfig& config, double lambda);

/// Nearest support-class mean, ties to the lowest class index.
std::vector<int> inductive_baseline(const TaskInstance& task);

} // namespace paddle
