#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "paddle/bench.hpp"
#include "paddle/error.hpp"

using namespace paddle;

namespace {

// Results CSV with the wall time column blanked.
std::string without_wall_time(const std::vector<ResultRecord>& records)
{
    auto copy = records;
    for (auto& r : copy) {
        r.wall_time_seconds = 0.0;
    }
    return format_results(copy);
}

BenchmarkConfig small_config()
{
    BenchmarkConfig config;
    config.synthetic = {8, 4, 60, 4.0};
    config.methods = {Method::paddle, Method::kmeans, Method::inductive};
    config.k_effective = {2, 4};
    config.shots = {1, 3};
    config.query_size = 20;
    config.n_tasks = 12;
    config.seed = 99;
    return config;
}

} // namespace

TEST_CASE("method names")
{
    for (auto m : {Method::paddle, Method::kmeans, Method::pgd, Method::inductive}) {
        CHECK(parse_method(method_name(m)) == m);
    }
    CHECK_THROWS_AS(parse_method("svm"), ConfigError);
}

TEST_CASE("lambda settings")
{
    bool sweep = true;
    auto l = parse_lambda_setting("auto", &sweep);
    CHECK(!sweep);
    REQUIRE(l.size() == 1);
    CHECK(l[0].resolve(75) == 75.0);

    l = parse_lambda_setting("12.5", &sweep);
    CHECK(l[0].resolve(75) == 12.5);
    CHECK(l[0].label() == "12.5");

    l = parse_lambda_setting("sweep", &sweep);
    CHECK(sweep);
    REQUIRE(l.size() == 5);
    const double expected[] = {0.0, 18.75, 37.5, 75.0, 150.0};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(l[i].resolve(75) == expected[i]);
    }

    l = parse_lambda_setting("sweep:0,q,3.5,0.5q", &sweep);
    REQUIRE(l.size() == 4);
    CHECK(l[1].resolve(40) == 40.0);
    CHECK(l[2].resolve(40) == 3.5);
    CHECK(l[3].resolve(40) == 20.0);
    CHECK(l[3].label() == "0.5q");

    CHECK_THROWS_AS(parse_lambda_setting("-1"), ConfigError);
    CHECK_THROWS_AS(parse_lambda_setting("abc"), ConfigError);
    CHECK_THROWS_AS(parse_lambda_setting("sweep:x"), ConfigError);
    CHECK_THROWS_AS(parse_lambda_setting("sweep:,"), ConfigError);
}

TEST_CASE("synthetic bank settings")
{
    const auto s = parse_synthetic_spec("k=7,dim=3,per-class=50,sep=2.5");
    CHECK(s.k == 7);
    CHECK(s.dim == 3);
    CHECK(s.per_class == 50);
    CHECK(s.separation == 2.5);
    CHECK(parse_synthetic_spec("dim=9").k == 20);
    CHECK_THROWS_AS(parse_synthetic_spec("k=0"), ConfigError);
    CHECK_THROWS_AS(parse_synthetic_spec("k=2.5"), ConfigError);
    CHECK_THROWS_AS(parse_synthetic_spec("color=3"), ConfigError);
    CHECK_THROWS_AS(parse_synthetic_spec("sep"), ConfigError);
    CHECK_THROWS_AS(parse_synthetic_spec("sep=-1"), ConfigError);
}

TEST_CASE("confidence interval")
{
    CHECK(ci95_half_width({}) == 0.0);
    CHECK(ci95_half_width({0.5}) == 0.0);
    // sd of {0, 1} is 1/sqrt(2)
    CHECK(ci95_half_width({0.0, 1.0}) == doctest::Approx(1.96 * std::sqrt(0.5) / std::sqrt(2.0)));
}

TEST_CASE("benchmark layout and records")
{
    const auto config = small_config();
    const auto result = run_benchmark(config);
    CHECK(result.records.size() == 4u * 12u * 3u);
    CHECK(result.summary.size() == 4u * 3u);
    std::size_t i = 0;
    for (int k_eff : config.k_effective) {
        for (int s : config.shots) {
            for (std::size_t t = 0; t < 12; ++t) {
                for (const char* m : {"paddle", "kmeans", "inductive"}) {
                    const auto& r = result.records[i++];
                    CHECK(r.method == m);
                    CHECK(r.task_index == t);
                    CHECK(r.k_effective == k_eff);
                    CHECK(r.shots == s);
                    CHECK(r.k_total == 8);
                    CHECK(r.query_size == 20);
                    CHECK(r.lambda == 20.0);
                    CHECK(r.seed == task_seed(99, k_eff, s, t));
                    CHECK(r.accuracy >= 0.0);
                    CHECK(r.accuracy <= 1.0);
                }
            }
        }
    }
    for (const auto& row : result.summary) {
        CHECK(row.n_tasks == 12);
        CHECK(row.mean_effective_classes <= row.mean_label_cost);
    }
    const auto parsed = parse_results(format_results(result.records));
    CHECK(parsed.size() == result.records.size());
}

TEST_CASE("benchmarks are deterministic and independent of the worker count")
{
    auto config = small_config();
    config.methods.push_back(Method::pgd);
    config.pgd.max_iters = 300;
    config.n_tasks = 6;
    const auto serial = run_benchmark(config);
    const auto again = run_benchmark(config);
    config.workers = 4;
    const auto parallel = run_benchmark(config);
    CHECK(without_wall_time(serial.records) == without_wall_time(again.records));
    CHECK(without_wall_time(serial.records) == without_wall_time(parallel.records));
}

TEST_CASE("a single cell can be re-run on its own")
{
    auto config = small_config();
    const auto full = run_benchmark(config);
    config.k_effective = {4};
    config.shots = {3};
    const auto cell = run_benchmark(config);
    std::vector<ResultRecord> expected;
    for (const auto& r : full.records) {
        if (r.k_effective == 4 && r.shots == 3) {
            expected.push_back(r);
        }
    }
    CHECK(without_wall_time(cell.records) == without_wall_time(expected));
}

TEST_CASE("inductive accuracy is at chance on indistinguishable classes")
{
    BenchmarkConfig config;
    config.synthetic = {10, 4, 200, 0.0};
    config.methods = {Method::inductive};
    config.k_effective = {10};
    config.shots = {5};
    config.query_size = 75;
    config.n_tasks = 300;
    config.seed = 4;
    const auto result = run_benchmark(config);
    REQUIRE(result.summary.size() == 1);
    const auto& row = result.summary[0];
    CHECK(std::abs(row.mean_accuracy - 0.1) <= row.ci95);
}

TEST_CASE("paddle beats partial kmeans on well separated classes")
{
    BenchmarkConfig config;
    // two dimensions keep twenty classes close enough to matter
    config.synthetic = {20, 2, 300, 20.0};
    config.methods = {Method::paddle, Method::kmeans};
    config.k_effective = {3};
    config.shots = {5};
    config.query_size = 75;
    config.n_tasks = 100;
    config.seed = 1;
    config.workers = 4;
    const auto result = run_benchmark(config);
    REQUIRE(result.summary.size() == 2);
    CHECK(result.summary[0].method == "paddle");
    CHECK(result.summary[0].mean_accuracy > result.summary[1].mean_accuracy);
    CHECK(result.summary[0].mean_effective_classes < result.summary[1].mean_effective_classes);
}

TEST_CASE("confidence interval halves when the task count quadruples")
{
    BenchmarkConfig config;
    config.synthetic = {10, 4, 100, 2.0};
    config.methods = {Method::inductive};
    config.k_effective = {5};
    config.shots = {1};
    config.query_size = 30;
    config.seed = 12;
    config.n_tasks = 100;
    const double small = run_benchmark(config).summary[0].ci95;
    config.n_tasks = 400;
    const double large = run_benchmark(config).summary[0].ci95;
    CHECK(small / large == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("lambda sweep emits one accuracy column per lambda")
{
    auto config = small_config();
    config.methods = {Method::paddle};
    config.k_effective = {2};
    config.shots = {3};
    config.lambdas = parse_lambda_setting("sweep", &config.lambda_sweep);
    const auto result = run_benchmark(config);
    CHECK(result.summary.size() == 5);
    CHECK(result.records.size() == 5u * 12u);
    const std::string table = format_lambda_sweep(result.summary);
    std::istringstream in(table);
    std::string header, row, extra;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header
          == "method,k_effective,shots,acc_lambda=0q,acc_lambda=0.25q,acc_lambda=0.5q,"
             "acc_lambda=1q,acc_lambda=2q");
    CHECK(std::count(row.begin(), row.end(), ',') == 7);
    CHECK(!std::getline(in, extra));
    std::set<double> lambdas;
    for (const auto& r : result.records) {
        lambdas.insert(r.lambda);
    }
    CHECK(lambdas == std::set<double>{0.0, 5.0, 10.0, 20.0, 40.0});
}

TEST_CASE("auto lambda is the query size")
{
    BenchmarkConfig config;
    config.synthetic = {6, 3, 120, 3.0};
    config.methods = {Method::paddle, Method::kmeans, Method::pgd, Method::inductive};
    config.pgd.max_iters = 50;
    config.k_effective = {3};
    config.shots = {2};
    config.n_tasks = 3;
    config.lambdas = parse_lambda_setting("auto");
    for (const auto& r : run_benchmark(config).records) {
        CHECK(r.lambda == 75.0);
    }
}

TEST_CASE("infeasible configurations fail before running")
{
    BenchmarkConfig config;
    config.synthetic = {5, 2, 10, 3.0};
    config.k_effective = {2};
    config.shots = {8};
    CHECK_THROWS_AS(run_benchmark(config), ConfigError);
    config.shots = {2};
    config.k_effective = {6};
    CHECK_THROWS_AS(run_benchmark(config), ConfigError);
    config.k_effective = {2};
    config.n_tasks = 0;
    CHECK_THROWS_AS(run_benchmark(config), ConfigError);
    config.n_tasks = 1;
    config.methods.clear();
    CHECK_THROWS_AS(run_benchmark(config), ConfigError);
}

TEST_CASE("convergence race")
{
    const auto bank = synth_gaussian_bank(10, 8, 200, 8.0, 3);
    RaceConfig config;
    config.task = TaskSpec{10, 5, 20, 75, 42, std::nullopt};
    const auto race = run_convergence_race(bank, config);
    CHECK(race.paddle.status == "converged");
    REQUIRE(race.paddle.time_to_tol.has_value());
    for (const auto& row : race.rows) {
        if (row.method == "paddle") {
            CHECK(std::isfinite(row.criterion));
            CHECK(std::isfinite(row.objective));
        }
    }
    CHECK(race.pgd.iterations > race.paddle.iterations);

    const auto again = run_convergence_race(bank, config);
    REQUIRE(again.rows.size() == race.rows.size());
    for (std::size_t i = 0; i < race.rows.size(); ++i) {
        CHECK(again.rows[i].method == race.rows[i].method);
        CHECK(again.rows[i].iteration == race.rows[i].iteration);
        CHECK(again.rows[i].criterion == race.rows[i].criterion);
        CHECK(again.rows[i].objective == race.rows[i].objective);
    }
    const std::string csv = format_race(race);
    CHECK(csv.starts_with(std::string(kRaceHeader) + "\n"));

    config.pgd.step_size = 1e7;
    const auto diverged = run_convergence_race(bank, config);
    CHECK(diverged.pgd.status == "diverged");
    CHECK(diverged.rows.back().status == "diverged");
}
