#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netupd/hardness.hpp"
#include "netupd/netmodel.hpp"
#include "testutil.hpp"

using namespace netupd;
using namespace netupd::testutil;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("netupd_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  std::string cmd = std::string("\"") + NETUPD_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string run_capture(const std::string& args, int* rc = nullptr) {
  std::string cmd = std::string("\"") + NETUPD_CLI_PATH + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  char buf[4096];
  while (size_t got = fread(buf, 1, sizeof(buf), pipe)) out.append(buf, got);
  int code = pclose(pipe);
  if (rc) *rc = code;
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("schedule/assess round trip through the binary") {
  TempDir dir;
  fs::path inst = dir.path / "example.inst";
  {
    std::ofstream out(inst);
    out << write_instance(delay_example_instance());
  }
  fs::path sched = dir.path / "greedy.sched";
  std::string report = run_capture("schedule \"" + inst.string() + "\" --algorithm greedy --out \"" +
                                   sched.string() + "\"");
  CHECK(report.find("alpha_min 2") != std::string::npos);
  CHECK(fs::exists(sched));

  int rc = 0;
  std::string assessed =
      run_capture("assess \"" + inst.string() + "\" \"" + sched.string() + "\"", &rc);
  CHECK(rc == 0);
  CHECK(assessed.find("alpha_min 2") != std::string::npos);

  std::string delayed = run_capture("schedule \"" + inst.string() +
                                    "\" --algorithm delay --delay-threshold 1");
  CHECK(delayed.find("alpha_min 1") != std::string::npos);
  CHECK(delayed.find("rounds 3") != std::string::npos);
}

TEST_CASE("exact subcommand reports the delay-example optimum") {
  TempDir dir;
  fs::path inst = dir.path / "example.inst";
  {
    std::ofstream out(inst);
    out << write_instance(delay_example_instance());
  }
  fs::path witness = dir.path / "witness.sched";
  std::string out = run_capture("exact \"" + inst.string() + "\" --alpha 1 --max-pairs 4 --out \"" +
                                witness.string() + "\"");
  CHECK(out == "rounds 3\n");
  // The emitted witness parses and assesses clean.
  Instance instance = delay_example_instance();
  UpdateSchedule schedule = read_schedule(instance, slurp(witness));
  CHECK(assess(instance, schedule).alpha_min <= 1.0 + kLoadTolerance);
}

TEST_CASE("encode writes an LP model file") {
  TempDir dir;
  fs::path inst = dir.path / "example.inst";
  {
    std::ofstream out(inst);
    out << write_instance(delay_example_instance());
  }
  fs::path lp = dir.path / "model.lp";
  CHECK(run("encode \"" + inst.string() + "\" --objective alpha --rounds 2 --out \"" +
            lp.string() + "\"") == 0);
  std::string text = slurp(lp);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("alpha") != std::string::npos);
  ParsedLp parsed = parse_lp_text(text);
  CHECK(parsed.rows.size() > 100);
}

TEST_CASE("solve drives the bundled solver end to end") {
  if (!solver_available()) return;
  TempDir dir;
  fs::path inst = dir.path / "example.inst";
  {
    std::ofstream out(inst);
    out << write_instance(delay_example_instance());
  }
  fs::path sched = dir.path / "milp.sched";
  int rc = 0;
  std::string out = run_capture("solve \"" + inst.string() +
                                    "\" --objective rounds --alpha 1 --horizon 4 --solver-cmd '" +
                                    solver_command() + "' --out \"" + sched.string() + "\"",
                                &rc);
  CHECK(rc == 0);
  CHECK(out.find("objective 3") != std::string::npos);
  Instance instance = delay_example_instance();
  UpdateSchedule schedule = read_schedule(instance, slurp(sched));
  CHECK(assess(instance, schedule).alpha_min <= 1.0 + 1e-6);
}

TEST_CASE("gadget subcommand emits instance and role map") {
  TempDir dir;
  fs::path cnf = dir.path / "f.cnf";
  {
    std::ofstream out(cnf);
    out << "p cnf 2 2\n1 -2 2 0\n-1 2 2 0\n";
  }
  fs::path inst = dir.path / "gadget.inst";
  CHECK(run("gadget \"" + cnf.string() + "\" --variant add --epsilon 0.25 --out \"" +
            inst.string() + "\"") == 0);
  Instance instance = read_instance(slurp(inst));
  CHECK(validate_instance(instance).empty());
  CHECK(instance.pairs.size() == 6);  // truth flows, ladder, three clause flows
  std::string roles = slurp(inst.string() + ".roles");
  CHECK(roles.find("variant add") != std::string::npos);
}

TEST_CASE("generate then sweep over a tiny corpus") {
  TempDir dir;
  fs::path out_dir = dir.path / "instances";
  CHECK(run(std::string("--seed 4 generate --topology-dir \"") + NETUPD_TOPOLOGY_DIR +
            "\" --pairs 5 --max-nodes 9 --out \"" + out_dir.string() + "\"") == 0);
  int count = 0;
  for (const auto& e : fs::directory_iterator(out_dir))
    if (e.path().extension() == ".inst") ++count;
  CHECK(count >= 3);

  fs::path csv = dir.path / "sweep.csv";
  CHECK(run("sweep --instances \"" + out_dir.string() +
            "\" --algorithms greedy,delay --alpha-grid 1.0:1.5:0.5 --out \"" + csv.string() +
            "\"") == 0);
  std::string text = slurp(csv);
  CHECK(text.rfind("topology,seed,algorithm,alpha,rounds,alpha_min,beta_min,feasible,status\n",
                   0) == 0);
  CHECK(text.find(",aggregate") != std::string::npos);
  CHECK(fs::exists(csv.string() + ".timing.csv"));
}
