#include "paddle/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "paddle/error.hpp"
#include "paddle/model.hpp"
#include "paddle/random.hpp"
#include "paddle/solver.hpp"

namespace paddle {

std::string_view method_name(Method m)
{
    switch (m) {
    case Method::paddle:
        return "paddle";
    case Method::kmeans:
        return "kmeans";
    case Method::pgd:
        return "pgd";
    case Method::inductive:
        return "inductive";
    }
    return "unknown";
}

Method parse_method(std::string_view name)
{
    for (auto m : {Method::paddle, Method::kmeans, Method::pgd, Method::inductive}) {
        if (name == method_name(m)) {
            return m;
        }
    }
    throw ConfigError("unknown method '" + std::string(name)
                      + "' (expected paddle, kmeans, pgd or inductive)");
}

namespace {

double parse_real(std::string_view text, std::string_view what)
{
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(x)) {
        throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
    }
    return x;
}

std::vector<std::string_view> split_list(std::string_view text)
{
    std::vector<std::string_view> out;
    while (!text.empty()) {
        const auto pos = text.find(',');
        const auto item = text.substr(0, pos);
        if (!item.empty()) {
            out.push_back(item);
        }
        if (pos == std::string_view::npos) {
            break;
        }
        text.remove_prefix(pos + 1);
    }
    return out;
}

LambdaChoice parse_lambda_value(std::string_view item)
{
    if (!item.empty() && (item.back() == 'q' || item.back() == 'Q')) {
        item.remove_suffix(1);
        const double scale = item.empty() ? 1.0 : parse_real(item, "lambda multiple");
        if (scale < 0.0) {
            throw ConfigError("lambda must be non-negative");
        }
        return {scale, true};
    }
    const double value = parse_real(item, "lambda");
    if (value < 0.0) {
        throw ConfigError("lambda must be non-negative");
    }
    return {value, false};
}

} // namespace

std::string LambdaChoice::label() const
{
    return relative ? format_real(value) + "q" : format_real(value);
}

std::vector<LambdaChoice> parse_lambda_setting(std::string_view text, bool* is_sweep)
{
    if (is_sweep) {
        *is_sweep = false;
    }
    if (text == "auto") {
        return {LambdaChoice{1.0, true}};
    }
    if (text == "sweep" || text == "sweep:") {
        if (is_sweep) {
            *is_sweep = true;
        }
        return {{0.0, true}, {0.25, true}, {0.5, true}, {1.0, true}, {2.0, true}};
    }
    if (text.starts_with("sweep:")) {
        if (is_sweep) {
            *is_sweep = true;
        }
        std::vector<LambdaChoice> out;
        for (auto item : split_list(text.substr(6))) {
            out.push_back(parse_lambda_value(item));
        }
        if (out.empty()) {
            throw ConfigError("empty lambda sweep list");
        }
        return out;
    }
    return {parse_lambda_value(text)};
}

SyntheticBankSpec parse_synthetic_spec(std::string_view text)
{
    SyntheticBankSpec spec;
    for (auto item : split_list(text)) {
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("synthetic bank entry '" + std::string(item) + "' lacks '='");
        }
        const auto key = item.substr(0, eq);
        const auto value = item.substr(eq + 1);
        auto as_int = [&](std::string_view what) {
            const double x = parse_real(value, what);
            if (x != std::floor(x) || x < 1.0 || x > 1e9) {
                throw ConfigError(std::string(what) + " must be a positive integer");
            }
            return static_cast<int>(x);
        };
        if (key == "k") {
            spec.k = as_int("k");
        } else if (key == "dim") {
            spec.dim = as_int("dim");
        } else if (key == "per-class" || key == "per_class") {
            spec.per_class = as_int("per-class");
        } else if (key == "sep" || key == "separation") {
            spec.separation = parse_real(value, "separation");
            if (spec.separation < 0.0) {
                throw ConfigError("separation must be non-negative");
            }
        } else {
            throw ConfigError("unknown synthetic bank key '" + std::string(key) + "'");
        }
    }
    return spec;
}

void BenchmarkConfig::validate() const
{
    if (n_tasks < 1) {
        throw ConfigError("n_tasks must be at least 1");
    }
    if (methods.empty()) {
        throw ConfigError("at least one method is required");
    }
    if (k_effective.empty() || shots.empty()) {
        throw ConfigError("k_effective and shots lists must be non-empty");
    }
    if (lambdas.empty()) {
        throw ConfigError("at least one lambda value is required");
    }
    if (workers < 1) {
        throw ConfigError("workers must be at least 1");
    }
    solver.validate();
    pgd.validate();
}

FeatureBank benchmark_bank(const BenchmarkConfig& config)
{
    if (config.bank_path) {
        return load_feature_bank(*config.bank_path);
    }
    const auto& s = config.synthetic;
    return synth_gaussian_bank(s.k, s.dim, s.per_class, s.separation,
                               derive_seed(config.seed, 0xBA4CULL));
}

std::uint64_t task_seed(std::uint64_t master, int k_effective, int shots, std::size_t task_index)
{
    const auto cell = derive_seed(derive_seed(master, static_cast<std::uint64_t>(k_effective)),
                                  static_cast<std::uint64_t>(shots));
    return derive_seed(cell, task_index);
}

double ci95_half_width(const std::vector<double>& samples)
{
    const auto n = samples.size();
    if (n < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (double x : samples) {
        mean += x;
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : samples) {
        ss += (x - mean) * (x - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return 1.96 * sd / std::sqrt(static_cast<double>(n));
}

namespace {

using Clock = std::chrono::steady_clock;

struct MethodRun {
    ResultRecord record;
    int label_cost_exact = 0;
};

AssignmentMatrix one_hot(const std::vector<int>& labels, int k)
{
    AssignmentMatrix u;
    u.n_query = labels.size();
    u.rows = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), k);
    for (std::size_t n = 0; n < labels.size(); ++n) {
        u.rows(static_cast<Eigen::Index>(n), labels[n]) = 1.0;
    }
    return u;
}

MethodRun run_method(Method method, const TaskInstance& task, double lambda,
                     const BenchmarkConfig& config)
{
    const auto start = Clock::now();
    AssignmentMatrix u;
    int iterations = 0;
    switch (method) {
    case Method::paddle: {
        SolverConfig cfg = config.solver;
        cfg.lambda = lambda;
        auto state = solve(task, cfg);
        u = std::move(state.u);
        iterations = state.iteration;
        break;
    }
    case Method::kmeans: {
        auto state = kmeans_partial(task, config.solver);
        u = std::move(state.u);
        iterations = state.iteration;
        break;
    }
    case Method::pgd: {
        auto state = pgd_solve(task, config.pgd, lambda);
        u = std::move(state.u);
        iterations = state.iteration;
        break;
    }
    case Method::inductive:
        u = one_hot(inductive_baseline(task), task.k_total);
        break;
    }
    const double wall = std::chrono::duration<double>(Clock::now() - start).count();

    const auto predicted = predict_labels(u);
    MethodRun run;
    run.record.method = std::string(method_name(method));
    run.record.k_total = task.k_total;
    run.record.k_effective = task.k_effective;
    run.record.shots = static_cast<int>(task.n_support()) / task.k_total;
    run.record.query_size = static_cast<int>(task.n_query);
    run.record.lambda = lambda;
    run.record.accuracy = accuracy(predicted, task.query_truth);
    run.record.effective_class_count
        = label_cost(u, 1.0 / (2.0 * static_cast<double>(task.n_query)));
    run.record.iterations = iterations;
    run.record.wall_time_seconds = wall;
    run.label_cost_exact = label_cost(u, 0.0);
    return run;
}

struct Cell {
    int k_effective;
    int shots;
};

template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn)
{
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                while (true) {
                    const auto i = next.fetch_add(1);
                    if (i >= count) {
                        return;
                    }
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                        next = count;
                        return;
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& config)
{
    config.validate();
    return run_benchmark(config, benchmark_bank(config));
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config, const FeatureBank& bank)
{
    config.validate();
    bank.validate();
    const int k_total = config.k_total.value_or(static_cast<int>(bank.classes.size()));

    std::vector<Cell> cells;
    for (int k_eff : config.k_effective) {
        for (int s : config.shots) {
            TaskSpec spec{k_total, k_eff, s, config.query_size, 0, std::nullopt};
            check_feasible(bank, spec);
            cells.push_back({k_eff, s});
        }
    }

    const auto n_tasks = static_cast<std::size_t>(config.n_tasks);
    const std::size_t units = cells.size() * n_tasks;
    const std::size_t per_unit = config.lambdas.size() * config.methods.size();
    std::vector<MethodRun> runs(units * per_unit);

    parallel_for(units, config.workers, [&](std::size_t unit) {
        const Cell& cell = cells[unit / n_tasks];
        const std::size_t task_index = unit % n_tasks;
        TaskSpec spec{k_total, cell.k_effective, cell.shots, config.query_size,
                      task_seed(config.seed, cell.k_effective, cell.shots, task_index),
                      std::nullopt};
        const TaskInstance task = generate_task(bank, spec);
        std::size_t slot = unit * per_unit;
        for (const auto& lam : config.lambdas) {
            const double lambda = lam.resolve(config.query_size);
            for (Method m : config.methods) {
                MethodRun run = run_method(m, task, lambda, config);
                run.record.task_index = task_index;
                run.record.seed = spec.seed;
                runs[slot++] = std::move(run);
            }
        }
    });

    BenchmarkResult result;
    result.records.reserve(runs.size());
    for (const auto& r : runs) {
        result.records.push_back(r.record);
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t l = 0; l < config.lambdas.size(); ++l) {
            for (std::size_t m = 0; m < config.methods.size(); ++m) {
                SummaryRow row;
                row.method = std::string(method_name(config.methods[m]));
                row.k_effective = cells[c].k_effective;
                row.shots = cells[c].shots;
                row.lambda = config.lambdas[l].resolve(config.query_size);
                row.lambda_label = config.lambdas[l].label();
                row.n_tasks = config.n_tasks;
                std::vector<double> accs;
                for (std::size_t t = 0; t < n_tasks; ++t) {
                    const auto& run
                        = runs[(c * n_tasks + t) * per_unit + l * config.methods.size() + m];
                    accs.push_back(run.record.accuracy);
                    row.mean_accuracy += run.record.accuracy;
                    row.mean_effective_classes += run.record.effective_class_count;
                    row.mean_label_cost += run.label_cost_exact;
                    row.mean_iterations += run.record.iterations;
                    row.mean_wall_time += run.record.wall_time_seconds;
                }
                const auto n = static_cast<double>(n_tasks);
                row.mean_accuracy /= n;
                row.mean_effective_classes /= n;
                row.mean_label_cost /= n;
                row.mean_iterations /= n;
                row.mean_wall_time /= n;
                row.ci95 = ci95_half_width(accs);
                result.summary.push_back(std::move(row));
            }
        }
    }
    return result;
}

std::string format_summary(const std::vector<SummaryRow>& rows)
{
    std::string out = "method,k_effective,shots,lambda,n_tasks,mean_accuracy,ci95,"
                      "mean_effective_classes,mean_label_cost,mean_iterations,mean_wall_time\n";
    for (const auto& r : rows) {
        out += r.method + ',' + std::to_string(r.k_effective) + ',' + std::to_string(r.shots) + ','
               + format_real(r.lambda) + ',' + std::to_string(r.n_tasks) + ','
               + format_real(r.mean_accuracy) + ',' + format_real(r.ci95) + ','
               + format_real(r.mean_effective_classes) + ',' + format_real(r.mean_label_cost)
               + ',' + format_real(r.mean_iterations) + ',' + format_real(r.mean_wall_time)
               + '\n';
    }
    return out;
}

std::string format_lambda_sweep(const std::vector<SummaryRow>& rows)
{
    std::vector<std::string> labels;
    using Key = std::tuple<std::string, int, int>;
    std::vector<Key> keys;
    std::map<Key, std::map<std::string, double>> table;
    for (const auto& r : rows) {
        if (std::find(labels.begin(), labels.end(), r.lambda_label) == labels.end()) {
            labels.push_back(r.lambda_label);
        }
        Key key{r.method, r.k_effective, r.shots};
        if (!table.contains(key)) {
            keys.push_back(key);
        }
        table[key][r.lambda_label] = r.mean_accuracy;
    }
    std::string out = "method,k_effective,shots";
    for (const auto& l : labels) {
        out += ",acc_lambda=" + l;
    }
    out += '\n';
    for (const auto& key : keys) {
        out += std::get<0>(key) + ',' + std::to_string(std::get<1>(key)) + ','
               + std::to_string(std::get<2>(key));
        for (const auto& l : labels) {
            const auto& row = table[key];
            const auto it = row.find(l);
            out += ',' + (it == row.end() ? std::string() : format_real(it->second));
        }
        out += '\n';
    }
    return out;
}

namespace {

RaceOutcome summarize(const std::string& method, const SolverState& state, double tol,
                      const TaskInstance& task)
{
    RaceOutcome out;
    out.method = method;
    out.status = state.converged ? "converged" : "max_iters";
    out.iterations = state.iteration;
    out.total_seconds = state.trace.empty() ? 0.0 : state.trace.back().elapsed_seconds;
    for (const auto& e : state.trace) {
        if (e.iteration >= 2 && e.criterion <= tol) {
            out.time_to_tol = e.elapsed_seconds;
            break;
        }
    }
    out.accuracy = accuracy(predict_labels(state.u), task.query_truth);
    return out;
}

void append_rows(RaceResult& race, const std::string& method, const SolverState& state,
                 const std::string& status)
{
    for (const auto& e : state.trace) {
        race.rows.push_back({method, e.iteration, e.elapsed_seconds, e.criterion, e.objective,
                             status});
    }
}

} // namespace

RaceResult run_convergence_race(const FeatureBank& bank, const RaceConfig& config)
{
    const TaskInstance task = generate_task(bank, config.task);
    const double lambda = config.lambda_scale * static_cast<double>(task.n_query);

    RaceResult race;
    SolverConfig scfg = config.solver;
    scfg.lambda = lambda;
    scfg.record_trace = true;
    const SolverState paddle_state = solve(task, scfg);
    race.paddle = summarize("paddle", paddle_state, scfg.tol, task);
    append_rows(race, "paddle", paddle_state, race.paddle.status);

    PgdConfig pcfg = config.pgd;
    pcfg.record_trace = true;
    try {
        const SolverState pgd_state = pgd_solve(task, pcfg, lambda);
        race.pgd = summarize("pgd", pgd_state, pcfg.tol, task);
        append_rows(race, "pgd", pgd_state, race.pgd.status);
    } catch (const DivergenceError&) {
        race.pgd.method = "pgd";
        race.pgd.status = "diverged";
        race.rows.push_back({"pgd", -1, 0.0, std::nan(""), std::nan(""), "diverged"});
    }
    return race;
}

std::string format_race(const RaceResult& race)
{
    std::string out(kRaceHeader);
    out += '\n';
    for (const auto& r : race.rows) {
        out += r.method + ',' + std::to_string(r.iteration) + ',' + format_real(r.elapsed_seconds)
               + ',' + format_real(r.criterion) + ',' + format_real(r.objective, 10) + ','
               + r.status + '\n';
    }
    return out;
}

} // namespace paddle
