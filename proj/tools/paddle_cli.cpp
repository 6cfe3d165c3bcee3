// paddle: benchmark runner for the PADDLE solver and its baselines.
//
//   paddle bench    --synthetic k=20,dim=16,sep=6 --methods paddle,kmeans --out results.csv
//   paddle race     --synthetic k=20,dim=16 --shots 20 --out race.csv
//   paddle gen-bank --synthetic k=20,dim=16 --out bank.bin

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "paddle/bench.hpp"
#include "paddle/error.hpp"

namespace fs = std::filesystem;
using namespace paddle;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct BankOptions {
    std::string bank;
    std::string synthetic;
};

struct Options {
    BankOptions source;
    std::string methods = "paddle";
    std::string k_eff = "5";
    std::string shots = "5";
    std::string race_shots = "20";
    std::optional<int> k_total;
    int query_size = 75;
    int n_tasks = 1000;
    std::string lambda = "auto";
    std::uint64_t seed = 0;
    std::optional<int> workers;
    std::string out;
    int max_iters = 500;
    double tol = 1e-6;
    int pgd_max_iters = 20000;
    std::string format = "binary";
    bool quiet = false;
};

std::vector<int> parse_int_list(const std::string& text, const char* what)
{
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(',', start), text.size());
        const std::string item = text.substr(start, end - start);
        if (!item.empty()) {
            std::size_t used = 0;
            int value = 0;
            try {
                value = std::stoi(item, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != item.size()) {
                throw ConfigError(std::string("invalid ") + what + " entry '" + item + "'");
            }
            out.push_back(value);
        }
        start = end + 1;
    }
    if (out.empty()) {
        throw ConfigError(std::string(what) + " list is empty");
    }
    return out;
}

std::vector<Method> parse_methods(const std::string& text)
{
    std::vector<Method> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(',', start), text.size());
        if (end > start) {
            out.push_back(parse_method(std::string_view(text).substr(start, end - start)));
        }
        start = end + 1;
    }
    return out;
}

int resolve_workers(const std::optional<int>& flag)
{
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("PADDLE_WORKERS"); env && *env) {
        try {
            std::size_t used = 0;
            const int n = std::stoi(env, &used);
            if (used == std::string(env).size()) {
                return n;
            }
        } catch (const std::exception&) {
        }
        throw ConfigError(std::string("invalid PADDLE_WORKERS '") + env + "'");
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void add_bank_options(CLI::App& app, BankOptions& source)
{
    auto* bank = app.add_option("--bank", source.bank, "Feature bank (binary or CSV)");
    auto* synth = app.add_option("--synthetic", source.synthetic,
                                 "Synthetic Gaussian bank: k=..,dim=..,per-class=..,sep=..");
    bank->excludes(synth);
}

FeatureBank load_bank(const BankOptions& source, std::uint64_t seed)
{
    BenchmarkConfig config;
    config.seed = seed;
    if (!source.bank.empty()) {
        config.bank_path = source.bank;
    } else {
        config.synthetic = parse_synthetic_spec(source.synthetic);
    }
    return benchmark_bank(config);
}

fs::path sibling(const fs::path& out, const std::string& suffix)
{
    fs::path p = out;
    p.replace_extension();
    p += suffix;
    return p;
}

void print_summary(const std::vector<SummaryRow>& rows)
{
    std::printf("%-10s %5s %5s %9s %7s %9s %8s %9s %9s\n", "method", "k_eff", "shots", "lambda",
                "tasks", "accuracy", "ci95", "eff_cls", "iters");
    for (const auto& r : rows) {
        std::printf("%-10s %5d %5d %9s %7d %9.4f %8.4f %9.3f %9.1f\n", r.method.c_str(),
                    r.k_effective, r.shots, format_real(r.lambda).c_str(), r.n_tasks,
                    r.mean_accuracy, r.ci95, r.mean_effective_classes, r.mean_iterations);
    }
}

void run_bench(const Options& o)
{
    BenchmarkConfig config;
    if (!o.source.bank.empty()) {
        config.bank_path = o.source.bank;
    } else if (!o.source.synthetic.empty()) {
        config.synthetic = parse_synthetic_spec(o.source.synthetic);
    }
    config.methods = parse_methods(o.methods);
    config.k_total = o.k_total;
    config.k_effective = parse_int_list(o.k_eff, "--k-eff");
    config.shots = parse_int_list(o.shots, "--shots");
    config.query_size = o.query_size;
    config.n_tasks = o.n_tasks;
    config.lambdas = parse_lambda_setting(o.lambda, &config.lambda_sweep);
    config.seed = o.seed;
    config.workers = resolve_workers(o.workers);
    config.solver.max_iters = o.max_iters;
    config.solver.tol = o.tol;
    config.pgd.max_iters = o.pgd_max_iters;
    config.validate();

    const FeatureBank bank = benchmark_bank(config);
    const BenchmarkResult result = run_benchmark(config, bank);

    const fs::path out = o.out.empty() ? fs::path("results.csv") : fs::path(o.out);
    save_results(result.records, out);
    write_file(sibling(out, ".summary.csv"), format_summary(result.summary));
    if (config.lambda_sweep) {
        write_file(sibling(out, ".lambda_sweep.csv"), format_lambda_sweep(result.summary));
    }
    if (!o.quiet) {
        print_summary(result.summary);
        std::printf("wrote %s (%zu records)\n", out.string().c_str(), result.records.size());
    }
}

void run_race(const Options& o)
{
    const FeatureBank bank = load_bank(o.source, o.seed);
    RaceConfig config;
    const auto k_eff = parse_int_list(o.k_eff, "--k-eff");
    const auto shots = parse_int_list(o.race_shots, "--shots");
    if (k_eff.size() != 1 || shots.size() != 1) {
        throw ConfigError("race takes a single --k-eff and --shots value");
    }
    config.task = TaskSpec{o.k_total.value_or(static_cast<int>(bank.classes.size())), k_eff[0],
                           shots[0], o.query_size, task_seed(o.seed, k_eff[0], shots[0], 0),
                           std::nullopt};
    config.task.validate();
    bool sweep = false;
    const auto lambdas = parse_lambda_setting(o.lambda, &sweep);
    if (sweep) {
        throw ConfigError("race takes a single lambda value");
    }
    config.lambda_scale = lambdas[0].relative ? lambdas[0].value
                                              : lambdas[0].value / static_cast<double>(o.query_size);
    config.solver.max_iters = o.max_iters;
    config.solver.tol = o.tol;
    config.solver.validate();
    config.pgd.max_iters = o.pgd_max_iters;
    config.pgd.tol = o.tol;
    config.pgd.validate();

    const RaceResult race = run_convergence_race(bank, config);
    const fs::path out = o.out.empty() ? fs::path("race.csv") : fs::path(o.out);
    write_file(out, format_race(race));
    if (!o.quiet) {
        for (const auto* r : {&race.paddle, &race.pgd}) {
            const std::string ttt = r->time_to_tol ? format_real(*r->time_to_tol) : "-";
            std::printf("%-7s %-10s iterations=%d time_to_tol=%s accuracy=%.4f\n",
                        r->method.c_str(), r->status.c_str(), r->iterations, ttt.c_str(),
                        r->accuracy);
        }
        if (race.paddle.time_to_tol && race.pgd.time_to_tol && *race.paddle.time_to_tol > 0.0) {
            std::printf("speedup %.1fx\n", *race.pgd.time_to_tol / *race.paddle.time_to_tol);
        }
        std::printf("wrote %s\n", out.string().c_str());
    }
}

void run_gen_bank(const Options& o)
{
    if (!o.source.bank.empty()) {
        throw ConfigError("gen-bank only takes --synthetic");
    }
    BankFormat format;
    if (o.format == "binary") {
        format = BankFormat::binary;
    } else if (o.format == "csv") {
        format = BankFormat::csv;
    } else {
        throw ConfigError("--format must be binary or csv");
    }
    const FeatureBank bank = load_bank(o.source, o.seed);
    const fs::path out = o.out.empty() ? fs::path("bank.bin") : fs::path(o.out);
    save_feature_bank(bank, out, format);
    if (!o.quiet) {
        std::printf("wrote %s (%zu classes, %zu vectors, dim %zu)\n", out.string().c_str(),
                    bank.classes.size(), bank.total_vectors(), bank.dim);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"PADDLE transductive few-shot benchmark"};
    app.require_subcommand(1);
    Options o;

    auto* bench = app.add_subcommand("bench", "Accuracy benchmark over sampled tasks");
    add_bank_options(*bench, o.source);
    bench->add_option("--methods", o.methods, "paddle,kmeans,pgd,inductive")->capture_default_str();
    bench->add_option("--k-eff", o.k_eff, "Effective class counts")->capture_default_str();
    bench->add_option("--shots", o.shots, "Support shots per class")->capture_default_str();
    bench->add_option("--k-total", o.k_total, "Candidate classes (default: all bank classes)");
    bench->add_option("--query-size", o.query_size)->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_option("--n-tasks", o.n_tasks)->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_option("--lambda", o.lambda, "auto | <real> | <x>q | sweep[:list]")->capture_default_str();
    bench->add_option("--seed", o.seed)->capture_default_str();
    bench->add_option("--workers", o.workers, "Worker threads (default: $PADDLE_WORKERS or all cores)");
    bench->add_option("--out", o.out, "Per-task results CSV (default results.csv)");
    bench->add_option("--max-iters", o.max_iters)->capture_default_str();
    bench->add_option("--tol", o.tol)->capture_default_str();
    bench->add_option("--pgd-max-iters", o.pgd_max_iters)->capture_default_str();
    bench->add_flag("--quiet", o.quiet);

    auto* race = app.add_subcommand("race", "PADDLE vs PGD convergence trace on one task");
    add_bank_options(*race, o.source);
    race->add_option("--k-eff", o.k_eff)->capture_default_str();
    race->add_option("--shots", o.race_shots)->capture_default_str();
    race->add_option("--k-total", o.k_total);
    race->add_option("--query-size", o.query_size)->capture_default_str()->check(CLI::PositiveNumber);
    race->add_option("--lambda", o.lambda, "auto | <real> | <x>q")->capture_default_str();
    race->add_option("--seed", o.seed)->capture_default_str();
    race->add_option("--out", o.out, "Trace CSV (default race.csv)");
    race->add_option("--max-iters", o.max_iters)->capture_default_str();
    race->add_option("--tol", o.tol)->capture_default_str();
    race->add_option("--pgd-max-iters", o.pgd_max_iters)->capture_default_str();
    race->add_flag("--quiet", o.quiet);

    auto* gen = app.add_subcommand("gen-bank", "Write a synthetic Gaussian feature bank");
    gen->add_option("--synthetic", o.source.synthetic, "k=..,dim=..,per-class=..,sep=..");
    gen->add_option("--seed", o.seed)->capture_default_str();
    gen->add_option("--out", o.out, "Output path (default bank.bin)");
    gen->add_option("--format", o.format, "binary | csv")->capture_default_str();
    gen->add_flag("--quiet", o.quiet);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (bench->parsed()) {
            run_bench(o);
        } else if (race->parsed()) {
            run_race(o);
        } else {
            run_gen_bank(o);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
