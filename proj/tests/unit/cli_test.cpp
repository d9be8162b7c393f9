#include <gtest/gtest.h>

#include "cli_runner.hpp"
#include "json.hpp"

namespace mtsim {
namespace {

using testing::CliRunner;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    trace = cli.path("t.trace");
    ASSERT_EQ(cli.run("gen-trace --workload zipf --blocks 1000 --ops 20000 --theta 1.0 --read-ratio 0.9 --seed 7 -o " +
                      trace)
                  .exit_code,
              0);
  }
  CliRunner cli;
  std::string trace;
};

TEST_F(Cli, GenTraceIsByteIdentical) {
  const std::string again = cli.path("again.trace");
  ASSERT_EQ(cli.run("gen-trace --workload zipf --blocks 1000 --ops 20000 --theta 1.0 --read-ratio 0.9 --seed 7 -o " +
                    again)
                .exit_code,
            0);
  EXPECT_EQ(CliRunner::read(trace), CliRunner::read(again));
  EXPECT_EQ(CliRunner::read(trace).substr(0, 32), "MTSIM v1 blocks=1000 ops=20000\nR");
}

TEST_F(Cli, SeedDefaultsToZero) {
  const std::string a = cli.path("a.trace"), b = cli.path("b.trace");
  ASSERT_EQ(cli.run("gen-trace --blocks 100 --ops 500 -o " + a).exit_code, 0);
  ASSERT_EQ(cli.run("gen-trace --blocks 100 --ops 500 --seed 0 -o " + b).exit_code, 0);
  EXPECT_EQ(CliRunner::read(a), CliRunner::read(b));
}

TEST_F(Cli, UsageErrorsExitTwo) {
  const auto r = cli.run("gen-trace --read-ratio 1.2 -o " + cli.path("x.trace"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(cli.run("gen-trace --workload log --theta 0.5 -o " + cli.path("x.trace")).exit_code, 2);
  EXPECT_EQ(cli.run("simulate --trace " + trace + " --hierarchy dram:1MB,tape:1GB").exit_code, 2);
  EXPECT_EQ(cli.run("simulate --trace " + trace + " --hierarchy dram:1MB,ssd:1GB --policy 1,1").exit_code, 2);
  EXPECT_EQ(cli.run("no-such-command").exit_code, 2);
  EXPECT_EQ(cli.run("").exit_code, 2);
}

TEST_F(Cli, ConfigurationErrorsExitThree) {
  // Footprint of 1000 blocks does not fit a 1 MB SSD.
  const auto r = cli.run("simulate --trace " + trace + " --hierarchy dram:1MB,ssd:1MB");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_EQ(cli.run("simulate --trace " + cli.path("missing") + " --hierarchy dram:1MB,ssd:1GB").exit_code, 3);
}

TEST_F(Cli, SimulateDefaultPolicyIsEager) {
  const std::string base = "simulate --trace " + trace + " --hierarchy dram:256KB,nvm:1MB,ssd:1GB --seed 3";
  const auto a = cli.run(base);
  const auto b = cli.run(base + " --policy 1,1,1,1");
  ASSERT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j.at("ops_total"), 20000);
  EXPECT_EQ(j.at("ops_measured"), 10000);
}

TEST_F(Cli, FractionalPolicyRuns) {
  const auto r = cli.run("simulate --trace " + trace +
                         " --hierarchy dram:256KB,nvm:1MB,ssd:1GB --policy 1,1,0.01,0.5 --format csv");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
}

TEST_F(Cli, SlowerNvmTakesLonger) {
  const std::string base = "simulate --trace " + trace + " --hierarchy dram:256KB,nvm:1MB,ssd:1GB";
  const auto fast = nlohmann::json::parse(cli.run(base + " --nvm-latency-mult 2").out);
  const auto slow = nlohmann::json::parse(cli.run(base + " --nvm-latency-mult 8").out);
  EXPECT_GT(slow.at("sim_time_ns").get<std::uint64_t>(), fast.at("sim_time_ns").get<std::uint64_t>());
}

TEST_F(Cli, CatalogFromEnvironment) {
  const std::string catalog = cli.path("slow.catalog");
  {
    std::ofstream out(catalog);
    out << "ssd ssd 50000 600000 1000000000 0.2 0\n";
  }
  const std::string base = "simulate --trace " + trace + " --hierarchy dram:256KB,nvm:1MB,ssd:1GB";
  const auto normal = nlohmann::json::parse(cli.run(base).out);
  const auto slow = nlohmann::json::parse(cli.run(base + " --catalog " + catalog).out);
  const auto env = nlohmann::json::parse(cli.run_with_env("MTSIM_CATALOG=" + catalog, base).out);
  EXPECT_GT(slow.at("sim_time_ns").get<std::uint64_t>(), normal.at("sim_time_ns").get<std::uint64_t>());
  EXPECT_EQ(env, slow);
}

TEST_F(Cli, TuneReplayIsDeterministic) {
  const std::string base = "tune --trace " + trace +
                           " --hierarchy dram:256KB,nvm:1MB,ssd:1GB --mode replay --seed 1 --epoch-ops 5000 --tmin 1";
  const std::string h1 = cli.path("h1.csv"), h2 = cli.path("h2.csv"), s1 = cli.path("s1.json");
  ASSERT_EQ(cli.run(base + " -o " + h1 + " --summary " + s1).exit_code, 0);
  ASSERT_EQ(cli.run(base + " -o " + h2).exit_code, 0);
  EXPECT_EQ(CliRunner::read(h1), CliRunner::read(h2));
  EXPECT_EQ(CliRunner::read(h1).substr(0, 52), "step,temperature,d_r,d_w,n_r,n_w,objective,accepted\n");
  const auto summary = nlohmann::json::parse(CliRunner::read(s1));
  EXPECT_TRUE(summary.contains("best_policy"));
}

TEST_F(Cli, TuneEpochLongerThanTrace) {
  EXPECT_EQ(cli.run("tune --trace " + trace + " --hierarchy dram:256KB,nvm:1MB,ssd:1GB --epoch-ops 20001").exit_code,
            3);
}

TEST_F(Cli, RecommendInfeasibleBudgetIsEmpty) {
  const auto r = cli.run("recommend --trace " + trace + " --budget 1");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);  // header only
}

TEST_F(Cli, RecommendSingleNvmSsdCandidate) {
  const auto r = cli.run("recommend --trace " + trace + " --budget 5000 --dram-set 0 --nvm-set 1TB --ssd-set 2TB");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  ASSERT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
  const std::string row = r.out.substr(r.out.find('\n') + 1);
  EXPECT_EQ(row.substr(0, 19), "1,0,1024,2048,1433.");
}

TEST_F(Cli, RecommendRowsSortedByPerfPerPrice) {
  const auto r = cli.run("recommend --trace " + trace +
                         " --budget 2000 --dram-set 0,1GB,4GB --nvm-set 0,16GB,64GB --ssd-set 0,1TB --parallel 3 "
                         "--format json");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_GT(j.size(), 2u);
  for (std::size_t i = 1; i < j.size(); ++i)
    EXPECT_GE(j[i - 1].at("perf_per_price").get<double>(), j[i].at("perf_per_price").get<double>());
}

TEST_F(Cli, CharacterizeEndsAtOne) {
  const auto r = cli.run("characterize --trace " + trace);
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.substr(0, 31), "block_fraction,access_fraction\n");
  EXPECT_EQ(r.out.substr(r.out.size() - 4), "1,1\n");
}

TEST_F(Cli, CharacterizeSingleBlockTrace) {
  const std::string single = cli.path("single.trace");
  {
    std::ofstream out(single);
    out << "MTSIM v1 blocks=4 ops=3\nR 2\nW 2\nR 2\n";
  }
  const auto r = cli.run("characterize --trace " + single);
  EXPECT_EQ(r.out, "block_fraction,access_fraction\n1,1\n");
}

TEST_F(Cli, MalformedTraceExitsThree) {
  const std::string bad = cli.path("bad.trace");
  {
    std::ofstream out(bad);
    out << "MTSIM v1 blocks=4 ops=2\nR 2\nR 9\n";
  }
  const auto r = cli.run("characterize --trace " + bad);
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace mtsim
