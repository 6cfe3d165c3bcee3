#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paddle/baselines.hpp"
#include "paddle/io.hpp"
#include "paddle/taskgen.hpp"
#include "paddle/types.hpp"

namespace paddle {

enum class Method { paddle, kmeans, pgd, inductive };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// A lambda value, either absolute or a multiple of the query size.
struct LambdaChoice {
    double value = 1.0;
    bool relative = true;

    double resolve(int query_size) const
    {
        return relative ? value * static_cast<double>(query_size) : value;
    }
    std::string label() const;
};

/// Parses `auto`, a real, `sweep` or `sweep:<list>`. List entries are reals
/// or multiples of |Q| written with a `q` suffix (`0.25q`, `q`, `2q`). A bare
/// `sweep` means {0, q/4, q/2, q, 2q}.
std::vector<LambdaChoice> parse_lambda_setting(std::string_view text, bool* is_sweep = nullptr);

struct SyntheticBankSpec {
    int k = 20;
    int dim = 16;
    int per_class = 600;
    double separation = 6.0;
};

/// Parses `k=..,dim=..,per-class=..,sep=..`; missing keys keep their defaults.
SyntheticBankSpec parse_synthetic_spec(std::string_view text);

struct BenchmarkConfig {
    std::optional<std::filesystem::path> bank_path;
    SyntheticBankSpec synthetic;
    std::vector<Method> methods{Method::paddle};
    /// Number of candidate classes; the bank's class count when unset.
    std::optional<int> k_total;
    std::vector<int> k_effective{5};
    std::vector<int> shots{5};
    int query_size = 75;
    int n_tasks = 1000;
    std::vector<LambdaChoice> lambdas{LambdaChoice{}};
    bool lambda_sweep = false;
    std::uint64_t seed = 0;
    int workers = 1;
    SolverConfig solver;
    PgdConfig pgd;

    void validate() const;
};

/// Aggregate for one (method, k_effective, shots, lambda) cell.
struct SummaryRow {
    std::string method;
    int k_effective = 0;
    int shots = 0;
    double lambda = 0.0;
    std::string lambda_label;
    int n_tasks = 0;
    double mean_accuracy = 0.0;
    /// Half width of the normal-approximation 95% interval.
    double ci95 = 0.0;
    /// Mean count of classes holding more than 1/(2|Q|) of the query mass.
    double mean_effective_classes = 0.0;
    /// Mean count of classes with any query mass at all.
    double mean_label_cost = 0.0;
    double mean_iterations = 0.0;
    double mean_wall_time = 0.0;
};

struct BenchmarkResult {
    std::vector<ResultRecord> records;
    std::vector<SummaryRow> summary;
};

/// Bank used by a benchmark: loaded from disk, or synthesized from the
/// master seed.
FeatureBank benchmark_bank(const BenchmarkConfig& config);

/// Seed of task `task_index` in the (k_effective, shots) cell.
std::uint64_t task_seed(std::uint64_t master, int k_effective, int shots, std::size_t task_index);

/// Runs every method on every task of every cell. All feasibility checks
/// happen before the first task. Records are ordered by cell, task, lambda,
/// then method, independent of the worker count.
BenchmarkResult run_benchmark(const BenchmarkConfig& config, const FeatureBank& bank);
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

/// Normal-approximation 95% half width of the mean.
double ci95_half_width(const std::vector<double>& samples);

std::string format_summary(const std::vector<SummaryRow>& rows);
/// One row per (method, k_effective, shots) with an accuracy column per lambda.
std::string format_lambda_sweep(const std::vector<SummaryRow>& rows);

struct RaceConfig {
    TaskSpec task;
    double lambda_scale = 1.0; // lambda = lambda_scale * |Q|
    SolverConfig solver;
    PgdConfig pgd;
};

struct RaceRow {
    std::string method;
    int iteration = 0;
    double elapsed_seconds = 0.0;
    double criterion = 0.0;
    double objective = 0.0;
    std::string status;
};

struct RaceOutcome {
    std::string method;
    std::string status; // converged | max_iters | diverged
    int iterations = 0;
    /// Solver time when the criterion first reached the tolerance.
    std::optional<double> time_to_tol;
    double total_seconds = 0.0;
    double accuracy = 0.0;
};

struct RaceResult {
    std::vector<RaceRow> rows;
    RaceOutcome paddle;
    RaceOutcome pgd;
};

/// Runs PADDLE and PGD on the same task. PGD divergence is reported in the
/// rows, not thrown.
RaceResult run_convergence_race(const FeatureBank& bank, const RaceConfig& config);

inline constexpr std::string_view kRaceHeader
    = "method,iteration,elapsed_seconds,criterion,objective,status";
std::string format_race(const RaceResult& race);

} // namespace paddle
