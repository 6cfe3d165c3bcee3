#include "paddle/types.hpp"

#include <string>
#include <unordered_set>

#include "paddle/error.hpp"

namespace paddle {

std::size_t FeatureBank::total_vectors() const
{
    std::size_t n = 0;
    for (const auto& c : classes) {
        n += static_cast<std::size_t>(c.vectors.rows());
    }
    return n;
}

const ClassRecord* FeatureBank::find(std::uint32_t class_id) const
{
    for (const auto& c : classes) {
        if (c.class_id == class_id) {
            return &c;
        }
    }
    return nullptr;
}

void FeatureBank::validate() const
{
    if (dim == 0) {
        throw InvariantError("feature bank has dimension 0");
    }
    std::unordered_set<std::uint32_t> seen;
    for (const auto& c : classes) {
        if (!seen.insert(c.class_id).second) {
            throw InvariantError("duplicate class id " + std::to_string(c.class_id));
        }
        if (c.vectors.rows() == 0) {
            throw InvariantError("class " + std::to_string(c.class_id) + " has no vectors");
        }
        if (static_cast<std::size_t>(c.vectors.cols()) != dim) {
            throw InvariantError("class " + std::to_string(c.class_id) + " has vectors of length "
                                 + std::to_string(c.vectors.cols()) + ", expected "
                                 + std::to_string(dim));
        }
        if (!c.vectors.allFinite()) {
            throw InvariantError("class " + std::to_string(c.class_id)
                                 + " contains non-finite values");
        }
    }
}

bool operator==(const ClassRecord& a, const ClassRecord& b)
{
    return a.class_id == b.class_id && a.vectors.rows() == b.vectors.rows()
           && a.vectors.cols() == b.vectors.cols() && a.vectors == b.vectors;
}

bool operator==(const FeatureBank& a, const FeatureBank& b)
{
    return a.dim == b.dim && a.classes == b.classes;
}

TaskInstance TaskInstance::from_blocks(const Matrix& support, std::vector<int> support_labels,
                                       const Matrix& query, std::vector<int> query_truth,
                                       int k_total)
{
    if (support.cols() != query.cols() && query.rows() > 0) {
        throw ConfigError("support and query feature dimensions differ");
    }
    TaskInstance t;
    t.features.resize(query.rows() + support.rows(), support.cols());
    t.features.topRows(query.rows()) = query;
    t.features.bottomRows(support.rows()) = support;
    t.n_query = static_cast<std::size_t>(query.rows());
    t.support_labels = std::move(support_labels);
    t.query_truth = std::move(query_truth);
    t.k_total = k_total;
    std::unordered_set<int> distinct(t.query_truth.begin(), t.query_truth.end());
    t.k_effective = static_cast<int>(distinct.size());
    t.validate();
    return t;
}

void TaskInstance::validate() const
{
    if (k_total < 1) {
        throw InvariantError("task needs at least one class");
    }
    if (n_query < 1 || n_query > n_total()) {
        throw InvariantError("task needs a non-empty query set");
    }
    if (support_labels.size() != n_support()) {
        throw InvariantError("support label count does not match support rows");
    }
    if (!query_truth.empty() && query_truth.size() != n_query) {
        throw InvariantError("query truth count does not match query rows");
    }
    if (!features.allFinite()) {
        throw InvariantError("task features contain non-finite values");
    }
    std::vector<int> per_class(static_cast<std::size_t>(k_total), 0);
    for (int y : support_labels) {
        if (y < 0 || y >= k_total) {
            throw InvariantError("support label " + std::to_string(y) + " out of range");
        }
        ++per_class[static_cast<std::size_t>(y)];
    }
    for (int k = 0; k < k_total; ++k) {
        if (per_class[static_cast<std::size_t>(k)] == 0) {
            throw InvariantError("class " + std::to_string(k) + " has no support example");
        }
    }
    for (int y : query_truth) {
        if (y < 0 || y >= k_total) {
            throw InvariantError("query label " + std::to_string(y) + " out of range");
        }
    }
}

bool AssignmentMatrix::is_valid(double tol) const
{
    const auto nq = static_cast<Eigen::Index>(n_query);
    if (nq > rows.rows()) {
        return false;
    }
    for (Eigen::Index n = 0; n < rows.rows(); ++n) {
        const auto row = rows.row(n);
        if (!row.allFinite() || row.minCoeff() < -tol || std::abs(row.sum() - 1.0) > tol) {
            return false;
        }
        if (n >= nq) {
            // support rows are exact one-hot vectors
            int ones = 0;
            for (Eigen::Index k = 0; k < row.size(); ++k) {
                if (row[k] == 1.0) {
                    ++ones;
                } else if (row[k] != 0.0) {
                    return false;
                }
            }
            if (ones != 1) {
                return false;
            }
        }
    }
    return true;
}

void SolverConfig::validate() const
{
    if (!(tol > 0.0)) {
        throw ConfigError("solver tolerance must be positive");
    }
    if (max_iters < 1) {
        throw ConfigError("max_iters must be at least 1");
    }
    if (!(epsilon >= 0.0)) {
        throw ConfigError("epsilon must be non-negative");
    }
    if (lambda && !(*lambda >= 0.0)) {
        throw ConfigError("lambda must be non-negative");
    }
}

} // namespace paddle
