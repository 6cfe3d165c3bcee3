#include "paddle/solver.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "paddle/error.hpp"
#include "paddle/model.hpp"

namespace paddle {

SolverState init_state(const TaskInstance& task)
{
    task.validate();
    const auto k = static_cast<Eigen::Index>(task.k_total);
    const auto nq = static_cast<Eigen::Index>(task.n_query);
    const auto n = static_cast<Eigen::Index>(task.n_total());

    SolverState state;
    state.u.n_query = task.n_query;
    state.u.rows = Matrix::Zero(n, k);
    state.u.rows.topRows(nq).setConstant(1.0 / static_cast<double>(k));
    for (std::size_t i = 0; i < task.support_labels.size(); ++i) {
        state.u.rows(nq + static_cast<Eigen::Index>(i), task.support_labels[i]) = 1.0;
    }

    state.w.w = Matrix::Zero(k, static_cast<Eigen::Index>(task.dim()));
    Vector counts = Vector::Zero(k);
    const auto support = task.support_features();
    for (std::size_t i = 0; i < task.support_labels.size(); ++i) {
        const int y = task.support_labels[i];
        state.w.w.row(y) += support.row(static_cast<Eigen::Index>(i));
        counts[y] += 1.0;
    }
    for (Eigen::Index c = 0; c < k; ++c) {
        state.w.w.row(c) /= counts[c];
    }
    state.v.v = Vector::Zero(k);
    return state;
}

Matrix adjoint_apply(const DualVector& v, std::size_t n_query, std::size_t n_total)
{
    if (n_query > n_total || n_query == 0) {
        throw ConfigError("adjoint_apply needs 0 < n_query <= n_total");
    }
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n_total), v.v.size());
    const Eigen::RowVectorXd row = v.v.transpose() / static_cast<double>(n_query);
    out.topRows(static_cast<Eigen::Index>(n_query)).rowwise() = row;
    return out;
}

void softmax_rows(Eigen::Ref<Matrix> logits)
{
    for (Eigen::Index n = 0; n < logits.rows(); ++n) {
        auto row = logits.row(n);
        row.array() -= row.maxCoeff();
        row = row.array().exp().matrix();
        row /= row.sum();
    }
}

AssignmentMatrix update_assignments(const SolverState& state, const TaskInstance& task,
                                    double lambda)
{
    const auto nq = static_cast<Eigen::Index>(task.n_query);
    Matrix logits = -0.5 * squared_distances(task.query_features(), state.w.w);
    if (lambda != 0.0) {
        const Eigen::RowVectorXd bias
            = (lambda / static_cast<double>(task.n_query)) * state.v.v.transpose();
        logits.rowwise() += bias;
    }
    softmax_rows(logits);

    AssignmentMatrix out = state.u;
    out.rows.topRows(nq) = logits;
    return out;
}

DualVector update_dual(const AssignmentMatrix& u, double epsilon)
{
    const Vector prop = class_proportions(u);
    if (epsilon == 0.0) {
        for (Eigen::Index k = 0; k < prop.size(); ++k) {
            if (!(prop[k] > 0.0)) {
                throw InvariantError("dual update with epsilon = 0 needs strictly positive "
                                     "class proportions; class "
                                     + std::to_string(k) + " is empty");
            }
        }
    }
    return DualVector{(1.0 + (prop.array() + epsilon).log()).matrix()};
}

PrototypeSet update_prototypes(const AssignmentMatrix& u, const Matrix& z)
{
    const Vector mass = u.rows.colwise().sum().transpose();
    for (Eigen::Index k = 0; k < mass.size(); ++k) {
        if (!(mass[k] > 0.0)) {
            throw InvariantError("class " + std::to_string(k) + " has zero assignment mass");
        }
    }
    Matrix w = u.rows.transpose() * z;
    w.array().colwise() /= mass.array();
    return PrototypeSet{std::move(w)};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

SolverState solve(const TaskInstance& task, const SolverConfig& config)
{
    config.validate();
    const double lambda = config.resolved_lambda(task.n_query);
    const auto nq = static_cast<Eigen::Index>(task.n_query);

    SolverState state = init_state(task);
    const auto start = Clock::now();
    double excluded = 0.0;
    auto record = [&](int iteration, double criterion) {
        const double elapsed = seconds_since(start) - excluded;
        const auto t0 = Clock::now();
        const double f = regularized_objective(state.u, state.w, state.v, task.features, lambda,
                                               config.epsilon);
        excluded += seconds_since(t0);
        state.trace.push_back({iteration, criterion, f, elapsed});
    };
    if (config.record_trace) {
        record(0, 0.0);
    }

    Matrix previous = state.u.rows.topRows(nq);
    for (int it = 1; it <= config.max_iters; ++it) {
        state.u = update_assignments(state, task, lambda);
        state.v = update_dual(state.u, config.epsilon);
        state.w = update_prototypes(state.u, task.features);

        state.criterion = (state.u.rows.topRows(nq) - previous).cwiseAbs().maxCoeff();
        previous = state.u.rows.topRows(nq);
        state.iteration = it;
        if (config.record_trace) {
            record(it, state.criterion);
        }
        // the uniform start is not an iterate of the algorithm, so the first
        // change measured against it never stops the loop
        if (it >= 2 && state.criterion <= config.tol) {
            state.converged = true;
            break;
        }
    }
    return state;
}

} // namespace paddle
