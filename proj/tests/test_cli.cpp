#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "paddle/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Sandbox {
    fs::path dir;
    Sandbox()
    {
        std::random_device rd;
        dir = fs::temp_directory_path() / ("paddle_cli_" + std::to_string(rd()));
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    int run(const std::string& args) const
    {
        const std::string cmd = std::string("\"") + PADDLE_CLI_PATH + "\" " + args + " > \""
                                + (dir / "stdout.txt").string() + "\" 2> \""
                                + (dir / "stderr.txt").string() + "\"";
        const int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
        return status;
#endif
    }

    std::string path(const std::string& name) const { return (dir / name).string(); }
    std::string stderr_text() const { return paddle::read_file(dir / "stderr.txt"); }
};

} // namespace

TEST_CASE("gen-bank writes a loadable bank")
{
    Sandbox box;
    REQUIRE(box.run("gen-bank --synthetic k=6,dim=3,per-class=40 --seed 2 --out "
                    + box.path("bank.bin"))
            == 0);
    REQUIRE(box.run("gen-bank --synthetic k=6,dim=3,per-class=40 --seed 2 --format csv --out "
                    + box.path("bank.csv"))
            == 0);
    const auto bin = paddle::load_feature_bank(box.path("bank.bin"));
    CHECK(bin.classes.size() == 6);
    CHECK(bin.dim == 3);
    CHECK(bin == paddle::load_feature_bank(box.path("bank.csv")));
}

TEST_CASE("bench writes results and summary")
{
    Sandbox box;
    REQUIRE(box.run("gen-bank --synthetic k=6,dim=3,per-class=40 --out " + box.path("bank.bin"))
            == 0);
    REQUIRE(box.run("bench --bank " + box.path("bank.bin")
                    + " --methods paddle,kmeans --k-eff 2,3 --shots 2 --query-size 15"
                      " --n-tasks 5 --workers 2 --out "
                    + box.path("r.csv"))
            == 0);
    const auto records = paddle::load_results(box.path("r.csv"));
    CHECK(records.size() == 2u * 5u * 2u);
    for (const auto& r : records) {
        CHECK(r.lambda == 15.0);
    }
    CHECK(fs::exists(box.path("r.summary.csv")));
    CHECK(!fs::exists(box.path("r.lambda_sweep.csv")));

    REQUIRE(box.run("bench --synthetic k=6,dim=3,per-class=40 --k-eff 2 --shots 2 --query-size 15"
                    " --n-tasks 3 --lambda sweep:0,q --out "
                    + box.path("s.csv"))
            == 0);
    const std::string sweep = paddle::read_file(box.path("s.lambda_sweep.csv"));
    CHECK(sweep.starts_with("method,k_effective,shots,acc_lambda=0,acc_lambda=1q\n"));
}

TEST_CASE("worker count falls back to the environment")
{
    Sandbox box;
    CHECK(box.run("bench --synthetic k=4,dim=2,per-class=30 --k-eff 2 --shots 1 --query-size 10"
                  " --n-tasks 2 --quiet --out "
                  + box.path("a.csv"))
          == 0);
    ::setenv("PADDLE_WORKERS", "zero", 1);
    CHECK(box.run("bench --synthetic k=4,dim=2,per-class=30 --k-eff 2 --shots 1 --query-size 10"
                  " --n-tasks 2 --quiet --out "
                  + box.path("b.csv"))
          == 2);
    ::unsetenv("PADDLE_WORKERS");
}

TEST_CASE("bench defaults")
{
    Sandbox box;
    REQUIRE(box.run("bench --synthetic k=4,dim=2,per-class=60 --k-eff 2 --n-tasks 2 --quiet --out "
                    + box.path("d.csv"))
            == 0);
    const auto records = paddle::load_results(box.path("d.csv"));
    REQUIRE(records.size() == 2);
    for (const auto& r : records) {
        CHECK(r.shots == 5);
        CHECK(r.query_size == 75);
        CHECK(r.method == "paddle");
        CHECK(r.k_total == 4);
    }
}

TEST_CASE("race writes a trace")
{
    Sandbox box;
    REQUIRE(box.run("race --synthetic k=10,dim=8,per-class=200,sep=8 --k-eff 5 --seed 3 --out "
                    + box.path("race.csv"))
            == 0);
    const std::string trace = paddle::read_file(box.path("race.csv"));
    CHECK(trace.starts_with("method,iteration,elapsed_seconds,criterion,objective,status\n"));
    CHECK(trace.find("\npaddle,") != std::string::npos);
    CHECK(trace.find("\npgd,") != std::string::npos);
}

TEST_CASE("exit codes")
{
    Sandbox box;
    CHECK(box.run("") == 2);
    CHECK(box.run("bench --n-tasks 0") == 2);
    CHECK(box.run("bench --methods svm --n-tasks 1") == 2);
    CHECK(box.run("bench --synthetic k=4,dim=2,per-class=5 --k-eff 2 --shots 9 --n-tasks 1 --out "
                  + box.path("x.csv"))
          == 2);
    CHECK(box.stderr_text().find("class") != std::string::npos);
    CHECK(!fs::exists(box.path("x.csv")));
    CHECK(box.run("bench --lambda -3 --n-tasks 1") == 2);
    CHECK(box.run("bench --bank " + box.path("missing.bin") + " --n-tasks 1") == 1);
    paddle::write_file(box.path("bad.csv"), "class_id,f0\n1,2,3\n");
    CHECK(box.run("bench --bank " + box.path("bad.csv") + " --n-tasks 1") == 1);
    CHECK(box.stderr_text().find("line 2") != std::string::npos);
}
