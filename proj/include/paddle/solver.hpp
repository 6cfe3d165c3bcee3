#pragma once

#include "paddle/types.hpp"

namespace paddle {

/// Support-class means as prototypes, a zero dual vector, uniform query rows
/// and support rows pinned to their labels.
SolverState init_state(const TaskInstance& task);

/// A* V: each query row is V / |Q|, support rows are zero.
Matrix adjoint_apply(const DualVector& v, std::size_t n_query, std::size_t n_total);

/// Row-wise max-shifted softmax, in place.
void softmax_rows(Eigen::Ref<Matrix> logits);

/// Closed-form minimizer of the regularized energy over the query rows of U:
/// u_n = softmax(-1/2 ||w_k - z_n||^2 + lambda v_k / |Q|). Support rows are
/// copied through unchanged.
AssignmentMatrix update_assignments(const SolverState& state, const TaskInstance& task,
                                    double lambda);

/// v_k = 1 + ln(u_hat_k + epsilon). With epsilon == 0 every proportion must
/// be strictly positive, otherwise InvariantError is thrown.
DualVector update_dual(const AssignmentMatrix& u, double epsilon);

/// Assignment-weighted mean of all N features per class.
PrototypeSet update_prototypes(const AssignmentMatrix& u, const Matrix& z);

/// Cyclic block coordinate descent U -> V -> W until the max-norm change of
/// the query assignments drops to `config.tol` (checked from the second outer
/// iteration on) or `config.max_iters` is reached.
SolverState solve(const TaskInstance& task, const SolverConfig& config);

} // namespace paddle
