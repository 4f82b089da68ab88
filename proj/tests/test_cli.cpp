#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MDIM_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::map<std::string, std::string> keys(const std::string& out) {
  std::map<std::string, std::string> m;
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq != std::string::npos) m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

std::string sample(const std::string& name) { return std::string(MDIM_SAMPLES_DIR) + "/" + name; }

}  // namespace

TEST(Cli, DimBothOnPath) {
  auto r = run("dim --algo both " + sample("p4.txt"));
  EXPECT_EQ(r.code, 0);
  auto k = keys(r.out);
  EXPECT_EQ(k["dp_dim"], "1");
  EXPECT_EQ(k["brute_dim"], "1");
  EXPECT_EQ(k["status"], "ok");
}

TEST(Cli, DimWithRoot) {
  auto r = run("dim --algo both --root 1 " + sample("p4.txt"));
  EXPECT_EQ(r.code, 0);
  auto k = keys(r.out);
  EXPECT_EQ(k["dp_dim"], "2");
  EXPECT_EQ(k["brute_dim"], "2");
}

TEST(Cli, CheckRejectsSingleVertexOnTriangle) {
  auto r = run("check --set 0 " + sample("k3.txt"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("not resolving"), std::string::npos);
  EXPECT_EQ(run("check --set 0,1 " + sample("k3.txt")).code, 0);
}

TEST(Cli, GeneratedGraphPipesIntoDim) {
  auto r = run("gen --n 10 --omega 3 --seed 7 | " + std::string(MDIM_CLI_PATH) + " dim --algo both -");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(keys(r.out)["status"], "ok");
}

TEST(Cli, WitnessesReverify) {
  for (const char* f : {"p4.txt", "k4.txt", "star5.txt", "chordal12.txt"}) {
    auto k = keys(run("dim " + sample(f)).out);
    ASSERT_FALSE(k["dp_witness"].empty()) << f;
    EXPECT_EQ(run("check --set " + k["dp_witness"] + " " + sample(f)).code, 0) << f;
  }
}

TEST(Cli, IdenticalInputsGiveIdenticalResults) {
  auto a = keys(run("dim " + sample("chordal12.txt")).out);
  auto b = keys(run("dim --jobs 3 " + sample("chordal12.txt")).out);
  for (const char* key : {"input_digest", "dp_dim", "dp_witness", "dp_best_root", "memo_entries_total"})
    EXPECT_EQ(a[key], b[key]) << key;
}

TEST(Cli, ErrorCodes) {
  EXPECT_EQ(run("dim " + sample("missing.txt")).code, 2);
  EXPECT_EQ(run("dim --memo-cap 1 " + sample("chordal12.txt")).code, 3);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("echo '4 4 0 1 1 2 2 3 3 0' | " + std::string(MDIM_CLI_PATH) + " dim -").code, 2);
}

TEST(Cli, TreeExport) {
  auto r = run("tree --root 0 " + sample("k4.txt"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("tree nodes=", 0), 0u);
  auto dot = run("tree --root 0 --format dot " + sample("k4.txt"));
  EXPECT_EQ(dot.out.rfind("digraph", 0), 0u);
}

TEST(Cli, SelftestIsReproducible) {
  auto a = run("selftest --trials 8 --n-max 7 --omega-max 3 --seed 11");
  auto b = run("selftest --trials 8 --n-max 7 --omega-max 3 --seed 11");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(keys(a.out)["verdict"], "pass");
}

TEST(Cli, JsonReport) {
  auto r = run("dim --json " + sample("p4.txt"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"dp_dim\": 1"), std::string::npos);
}
