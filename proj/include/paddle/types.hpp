#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace paddle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Feature vectors of a single class, one per row. Stored in single precision
/// since that is what the bank file format carries.
struct ClassRecord {
    std::uint32_t class_id = 0;
    Eigen::MatrixXf vectors;
};

/// Labeled pool of feature vectors grouped by class.
struct FeatureBank {
    std::vector<ClassRecord> classes;
    std::size_t dim = 0;

    std::size_t total_vectors() const;
    const ClassRecord* find(std::uint32_t class_id) const;

    /// Throws InvariantError unless every row has `dim` finite entries, ids
    /// are unique and no class is empty.
    void validate() const;
};

bool operator==(const ClassRecord& a, const ClassRecord& b);
bool operator==(const FeatureBank& a, const FeatureBank& b);

/// One few-shot episode. Features are stacked query-first: rows
/// [0, n_query) are the query set and rows [n_query, N) the support set.
/// Class indices are 0-based task-local labels in [0, k_total).
struct TaskInstance {
    Matrix features;
    std::size_t n_query = 0;
    std::vector<int> support_labels;
    std::vector<int> query_truth;
    int k_total = 0;
    int k_effective = 0;
    /// Bank class id behind each task-local label.
    std::vector<std::uint32_t> class_ids;

    std::size_t n_total() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t n_support() const { return n_total() - n_query; }
    std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }

    auto query_features() const { return features.topRows(static_cast<Eigen::Index>(n_query)); }
    auto support_features() const
    {
        return features.bottomRows(static_cast<Eigen::Index>(n_support()));
    }

    /// Builds a task from separate support/query blocks.
    static TaskInstance from_blocks(const Matrix& support, std::vector<int> support_labels,
                                    const Matrix& query, std::vector<int> query_truth,
                                    int k_total);

    void validate() const;
};

/// N x K soft assignments; query rows first, support rows pinned one-hot.
struct AssignmentMatrix {
    Matrix rows;
    std::size_t n_query = 0;

    int k() const { return static_cast<int>(rows.cols()); }
    auto query_rows() const { return rows.topRows(static_cast<Eigen::Index>(n_query)); }
    auto query_rows() { return rows.topRows(static_cast<Eigen::Index>(n_query)); }

    /// Query rows on the simplex within `tol`; support rows must be one-hot.
    bool is_valid(double tol = 1e-9) const;
};

/// K x d class prototypes.
struct PrototypeSet {
    Matrix w;
};

/// Dual variable conjugate to the class-proportion entropy.
struct DualVector {
    Vector v;
};

struct SolverConfig {
    /// Weight of the partition-complexity term; |Q| when unset.
    std::optional<double> lambda;
    double epsilon = 1e-12;
    int max_iters = 500;
    double tol = 1e-6;
    std::uint64_t seed = 0;
    bool record_trace = false;

    double resolved_lambda(std::size_t n_query) const
    {
        return lambda.value_or(static_cast<double>(n_query));
    }
    void validate() const;
};

struct TraceEntry {
    int iteration = 0;
    double criterion = 0.0;
    double objective = 0.0;
    /// Solver time since start, excluding time spent evaluating `objective`.
    double elapsed_seconds = 0.0;
};

struct SolverState {
    AssignmentMatrix u;
    PrototypeSet w;
    DualVector v;
    int iteration = 0;
    double criterion = 0.0;
    bool converged = false;
    std::vector<TraceEntry> trace;
};

} // namespace paddle
