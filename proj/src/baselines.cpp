#include "paddle/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include "paddle/error.hpp"
#include "paddle/model.hpp"
#include "paddle/solver.hpp"

namespace paddle {

SolverState kmeans_partial(const TaskInstance& task, SolverConfig config)
{
    config.lambda = 0.0;
    return solve(task, config);
}

Vector simplex_project(const Vector& v)
{
    const Eigen::Index k = v.size();
    if (k == 0) {
        throw ConfigError("cannot project an empty vector onto the simplex");
    }
    if (!v.allFinite()) {
        throw ConfigError("simplex projection input must be finite");
    }
    std::vector<double> sorted(v.data(), v.data() + k);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double tau = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        cumulative += sorted[static_cast<std::size_t>(j)];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) {
            tau = candidate;
        }
    }
    return (v.array() - tau).max(0.0).matrix();
}

void PgdConfig::validate() const
{
    if (!(step_size > 0.0)) {
        throw ConfigError("PGD step size must be positive");
    }
    if (max_iters < 1) {
        throw ConfigError("PGD max_iters must be at least 1");
    }
    if (!(tol > 0.0)) {
        throw ConfigError("PGD tolerance must be positive");
    }
    if (!(moment_decay_1 >= 0.0 && moment_decay_1 < 1.0 && moment_decay_2 >= 0.0
          && moment_decay_2 < 1.0)) {
        throw ConfigError("Adam decay rates must lie in [0, 1)");
    }
}

namespace {

// projection can zero a proportion exactly
constexpr double kLogFloor = 1e-12;

} // namespace

Matrix objective_grad_assignments(const AssignmentMatrix& u, const PrototypeSet& w,
                                  const Matrix& z, double lambda)
{
    const auto nq = static_cast<Eigen::Index>(u.n_query);
    Matrix g = 0.5 * squared_distances(z.topRows(nq), w.w);
    if (lambda != 0.0) {
        const Vector prop = class_proportions(u);
        const Eigen::RowVectorXd shift
            = ((lambda / static_cast<double>(u.n_query))
               * (prop.array().max(kLogFloor).log() + 1.0))
                  .matrix()
                  .transpose();
        g.rowwise() -= shift;
    }
    return g;
}

Matrix objective_grad_prototypes(const AssignmentMatrix& u, const PrototypeSet& w,
                                 const Matrix& z)
{
    const Vector mass = u.rows.colwise().sum().transpose();
    Matrix g = mass.asDiagonal() * w.w;
    g -= u.rows.transpose() * z;
    return g;
}

namespace {

struct Adam {
    Matrix m;
    Matrix s;

    Adam(Eigen::Index rows, Eigen::Index cols)
        : m(Matrix::Zero(rows, cols))
        , s(Matrix::Zero(rows, cols))
    {
    }

    void step(Eigen::Ref<Matrix> param, const Matrix& grad, const PgdConfig& cfg, int t)
    {
        m = cfg.moment_decay_1 * m + (1.0 - cfg.moment_decay_1) * grad;
        s = cfg.moment_decay_2 * s + (1.0 - cfg.moment_decay_2) * grad.cwiseAbs2();
        const double c1 = 1.0 - std::pow(cfg.moment_decay_1, t);
        const double c2 = 1.0 - std::pow(cfg.moment_decay_2, t);
        param.array()
            -= cfg.step_size * (m.array() / c1) / ((s.array() / c2).sqrt() + cfg.adam_epsilon);
    }
};

using Clock = std::chrono::steady_clock;

// Adam normalizes per coordinate, so any per-row offset in the gradient turns
// into a uniform shift that the simplex projection cancels, and rows never
// leave their start. The gradient is therefore restricted to the face of the
// simplex it can move along: centered over the positive entries plus the zero
// entries it would raise; other zero entries get no gradient.
template <class Row, class Grad>
void project_to_tangent_cone(const Row& row, Grad&& grad)
{
    const Eigen::Index k = row.size();
    std::vector<bool> active(static_cast<std::size_t>(k));
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
        if (row[j] > 0.0) {
            active[static_cast<std::size_t>(j)] = true;
            sum += grad[j];
            ++count;
        }
    }
    // zero entries whose gradient is below the face mean would grow
    bool changed = true;
    while (changed) {
        changed = false;
        const double mean = sum / count;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (!active[static_cast<std::size_t>(j)] && grad[j] < mean) {
                active[static_cast<std::size_t>(j)] = true;
                sum += grad[j];
                ++count;
                changed = true;
            }
        }
    }
    const double mean = sum / count;
    for (Eigen::Index j = 0; j < k; ++j) {
        grad[j] = active[static_cast<std::size_t>(j)] ? grad[j] - mean : 0.0;
    }
}

} // namespace

SolverState pgd_solve(const TaskInstance& task, const PgdConfig& config, double lambda)
{
    config.validate();
    if (!(lambda >= 0.0)) {
        throw ConfigError("lambda must be non-negative");
    }
    const auto nq = static_cast<Eigen::Index>(task.n_query);
    const auto k = static_cast<Eigen::Index>(task.k_total);

    SolverState state = init_state(task);
    Adam adam_u(nq, k);
    Adam adam_w(state.w.w.rows(), state.w.w.cols());

    const auto start = Clock::now();
    double excluded = 0.0;
    auto record = [&](int iteration, double criterion) {
        const double elapsed
            = std::chrono::duration<double>(Clock::now() - start).count() - excluded;
        const auto t0 = Clock::now();
        const double f = objective(state.u, state.w, task.features, lambda);
        excluded += std::chrono::duration<double>(Clock::now() - t0).count();
        state.trace.push_back({iteration, criterion, f, elapsed});
    };
    if (config.record_trace) {
        record(0, 0.0);
    }

    Matrix previous = state.u.rows.topRows(nq);
    for (int it = 1; it <= config.max_iters; ++it) {
        Matrix grad_u = objective_grad_assignments(state.u, state.w, task.features, lambda);
        for (Eigen::Index n = 0; n < nq; ++n) {
            project_to_tangent_cone(state.u.rows.row(n), grad_u.row(n));
        }
        const Matrix grad_w = objective_grad_prototypes(state.u, state.w, task.features);
        const Matrix w_before = state.w.w;

        adam_u.step(state.u.rows.topRows(nq), grad_u, config, it);
        adam_w.step(state.w.w, grad_w, config, it);
        for (Eigen::Index n = 0; n < nq; ++n) {
            state.u.rows.row(n) = simplex_project(state.u.rows.row(n).transpose()).transpose();
        }

        const double w_change = (state.w.w - w_before).cwiseAbs().maxCoeff();
        if (!state.w.w.allFinite() || !std::isfinite(w_change) || w_change > 1e6) {
            throw DivergenceError("projected gradient descent diverged at iteration "
                                  + std::to_string(it) + "; reduce the step size");
        }

        state.criterion = (state.u.rows.topRows(nq) - previous).cwiseAbs().maxCoeff();
        previous = state.u.rows.topRows(nq);
        state.iteration = it;
        if (config.record_trace) {
            record(it, state.criterion);
        }
        if (it >= 2 && state.criterion <= config.tol
            && (!config.require_prototype_convergence || w_change <= config.tol)) {
            state.converged = true;
            break;
        }
    }
    return state;
}

std::vector<int> inductive_baseline(const TaskInstance& task)
{
    const SolverState init = init_state(task);
    const Matrix d = squared_distances(task.query_features(), init.w.w);
    std::vector<int> labels(task.n_query);
    for (Eigen::Index n = 0; n < d.rows(); ++n) {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < d.cols(); ++k) {
            if (d(n, k) < d(n, best)) {
                best = k;
            }
        }
        labels[static_cast<std::size_t>(n)] = static_cast<int>(best);
    }
    return labels;
}

} // namespace paddle
