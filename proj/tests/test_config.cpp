#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "invnorm/config.hpp"

using namespace invnorm;

namespace {

struct CliRun {
  int code;
  std::string output;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(INVNORM_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST(Config, UnknownKeyRejected) {
  EXPECT_THROW(parse_config("[problem]\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[nonsense]\nk = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[eigen]\nk = ten\n"), ConfigError);
}

TEST(Config, DefaultsParseBack) {
  const RunConfig c = parse_config(dump_defaults());
  const RunConfig d;
  EXPECT_EQ(c.problem, d.problem);
  EXPECT_EQ(c.pipeline.n_cert, d.pipeline.n_cert);
  EXPECT_EQ(c.pipeline.k, d.pipeline.k);
  EXPECT_EQ(c.pipeline.sigma_margin, d.pipeline.sigma_margin);
}

TEST(Config, ValuesAreApplied) {
  const RunConfig c = parse_config(
      "[problem]\ntype = constant-q\nc = 2.5\ndim = 1\n[discretization]\nn_cert = 14\n"
      "[constants]\nch_mode = user\nch_value = 0.01\nnorm_Q = 4\n[refinement]\nmode = never\nrho = nu\n");
  EXPECT_EQ(c.problem, "constant-q");
  EXPECT_EQ(c.c, 2.5);
  EXPECT_EQ(c.dim, 1);
  EXPECT_EQ(c.pipeline.n_cert, 14);
  EXPECT_EQ(c.pipeline.ch_mode, ChMode::user);
  EXPECT_EQ(c.pipeline.ch_value, 0.01);
  EXPECT_EQ(c.pipeline.norm_Q, 4.0);
  EXPECT_EQ(c.pipeline.refine, RefineMode::never);
  EXPECT_EQ(c.pipeline.rho, RhoMode::nu);
  const ProblemSpec p = make_problem(c);
  EXPECT_EQ(p.name, "constant-q");
  EXPECT_EQ(p.dim, 1);
}

TEST(Config, ShippedConfigsParse) {
  for (const auto& e : std::filesystem::directory_iterator(std::string(INVNORM_SOURCE_DIR) + "/configs"))
    if (e.path().extension() == ".ini") EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
}

TEST(Cli, MalformedConfigExitsWithOne) {
  const auto path = temp_file("invnorm_bad.ini", "[problem]\nbogus = 1\n");
  const CliRun r = run_cli("certify --config " + path.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("bogus"), std::string::npos) << r.output;
}

TEST(Cli, CertifiedRunExitsWithZero) {
  const auto out = std::filesystem::temp_directory_path() / "invnorm_zero_2d.json";
  std::filesystem::remove(out);
  const CliRun r = run_cli("certify --config " + std::string(INVNORM_SOURCE_DIR) + "/configs/zero_2d.ini --out " +
                        out.string());
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(std::filesystem::exists(out));
  const Certificate c = load_certificate(out.string());
  EXPECT_TRUE(c.certified);
}

TEST(Cli, TableOfEmptyDirectoryFails) {
  const auto dir = std::filesystem::temp_directory_path() / "invnorm_empty_runs";
  std::filesystem::create_directories(dir);
  for (const auto& e : std::filesystem::directory_iterator(dir)) std::filesystem::remove_all(e.path());
  const CliRun r = run_cli("table --which 1 --runs " + dir.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("error"), std::string::npos) << r.output;
}

TEST(Cli, CorruptedGramNamesStage) {
  const CliRun r = run_cli("selftest --corrupt-gram");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("[assemble]"), std::string::npos) << r.output;
}
