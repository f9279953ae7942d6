#include "amms/amms.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace amms;

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("amms_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  CliResult run(const std::string& args) const {
    const std::string out = path("stdout.txt");
    const std::string cmd = std::string(AMMS_CLI_PATH) + " " + args + " > " + out + " 2> " + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    return CliResult{WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenSolveVerifyTightExample) {
  ASSERT_EQ(run("gen --tight-example -o " + path("inst.json")).code, 0);
  EXPECT_EQ(instance_from_json(read_json_file(path("inst.json"))), gen_paper_example());

  CliResult solved = run("solve -i " + path("inst.json") + " -o " + path("alloc.json") + " --trace " + path("trace.json") + " --dump-graph " + path("graphs.json"));
  ASSERT_EQ(solved.code, 0);
  EXPECT_NE(solved.out.find("case direct"), std::string::npos);
  json alloc = read_json_file(path("alloc.json"));
  EXPECT_EQ(alloc["bundles"], json::parse("[[2,3,4],[0,1],[5,6,7]]"));
  EXPECT_EQ(read_json_file(path("trace.json"))["case"], "direct");
  EXPECT_EQ(read_json_file(path("graphs.json")).size(), 1u);

  CliResult ok = run("verify -i " + path("inst.json") + " -a " + path("alloc.json"));
  EXPECT_EQ(ok.code, 0);
  EXPECT_TRUE(json::parse(ok.out)["passed"].get<bool>());
  EXPECT_EQ(run("verify -i " + path("inst.json") + " -a " + path("alloc.json") + " --alpha 1").code, 1);
}

TEST_F(Cli, SolveToStdout) {
  write_json_file(path("inst.json"), to_json(gen_random(5, 9, CostModel::Uniform, 3)));
  CliResult r = run("solve -i " + path("inst.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["bundles"].size(), 5u);
}

TEST_F(Cli, MmsQuery) {
  write_json_file(path("inst.json"), to_json(gen_paper_example()));
  CliResult r = run("--json mms -i " + path("inst.json") + " --agent 2");
  ASSERT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j["value"], "1");
  EXPECT_EQ(j["partition"], json::parse("[[0,1],[2,3,4],[5,6,7]]"));
  CliResult sub = run("mms -i " + path("inst.json") + " --agent 0 --k 1 --items 0 1");
  ASSERT_EQ(sub.code, 0);
  EXPECT_EQ(json::parse(sub.out)["value"], "3/4");
}

TEST_F(Cli, GenIsSeeded) {
  ASSERT_EQ(run("--seed 5 gen --n 4 --m 7 --model paper-like -o " + path("a.json")).code, 0);
  ASSERT_EQ(run("--seed 5 gen --n 4 --m 7 --model paper-like -o " + path("b.json")).code, 0);
  EXPECT_EQ(read_json_file(path("a.json")), read_json_file(path("b.json")));
  EXPECT_EQ(instance_from_json(read_json_file(path("a.json"))), gen_random(4, 7, CostModel::PaperLike, 5));
}

TEST_F(Cli, SuiteJsonLines) {
  CliResult r = run("--json suite --suites oracle-cross-check,solver-by-n --count 5 --ns 3 4 --max-m 6 --failures " + path("fail"));
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(json::parse(line)["failures"], 0);
    ++lines;
  }
  EXPECT_EQ(lines, 2u);
}

TEST_F(Cli, Bench) {
  CliResult r = run("--json bench --ns 3 5 --m 6 --count 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"mean_ms\""), std::string::npos);
}

TEST_F(Cli, ErrorsExitWithTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("solve").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("solve -i " + path("missing.json")).code, 2);
  std::ofstream(path("bad.json")) << R"({"n": 2, "m": 1, "costs": [[1]]})";
  EXPECT_EQ(run("solve -i " + path("bad.json")).code, 2);
  EXPECT_EQ(run("gen --n 2 --m 3 --model adversarial").code, 2);
  EXPECT_EQ(run("suite --suites nope").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}
