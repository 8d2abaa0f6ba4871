// Copyright 2026 The duelopt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <doctest.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr is merged when asked.
Run cli(const std::string& args, bool merge_stderr = false, const std::string& stdin_text = "") {
  std::string cmd = std::string(DUELOPT_CLI) + " " + args;
  if (!stdin_text.empty()) cmd = "printf '" + stdin_text + "' | " + cmd;
  cmd += merge_stderr ? " 2>&1" : " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<double> fields(const std::string& line) {
  std::vector<double> v;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) v.push_back(std::stod(f));
  return v;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

const fs::path kWork = fs::path("cli_work");

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(cli("--help").code == 0);
  for (const char* sub : {"run", "analyze", "list-benchmarks", "decompose", "sample-posterior"}) {
    const Run r = cli(std::string(sub) + " --help");
    CHECK_MESSAGE(r.code == 0, sub);
    CHECK(r.out.find("--") != std::string::npos);
  }
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("decompose --no-such-flag").code == 2);
  const Run bad_rule = cli("run --mode bbo --benchmarks forrester --rules nosuch", true);
  CHECK(bad_rule.code == 2);
  CHECK(bad_rule.out.find("ucb-phi") != std::string::npos);
  CHECK(cli("run --mode bbo --benchmarks nosuch --rules random").code == 2);
  CHECK(cli("run --mode bbo --benchmarks forrester --rules muc").code == 2);
  CHECK(cli("decompose --mu-range 1").code == 2);
}

TEST_CASE("run writes one file per trial and resumes") {
  fs::remove_all(kWork);
  const std::string args =
      "run --mode bbo --benchmarks forrester --rules ucb-phi,random --reps 5 --iters 20 --seed 7 "
      "--fit-samples 100 --threads 2 --out " + (kWork / "r").string();
  const Run r = cli(args, true);
  CHECK(r.code == 0);
  CHECK(count(r.out, "final=") == 10);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(kWork / "r")) {
    if (e.path().extension() == ".jsonl") ++files;
  }
  CHECK(files == 10);
  CHECK(fs::exists(kWork / "r" / "manifest.json"));
  const Run again = cli(args, true);
  CHECK(again.code == 0);
  CHECK(count(again.out, "skipped") == 10);

  const Run analysis = cli("analyze --alpha 0.05 --input " + (kWork / "r").string() + " --out " +
                           (kWork / "report").string());
  CHECK(analysis.code == 0);
  CHECK(analysis.out.find("borda") != std::string::npos);
  CHECK(fs::exists(kWork / "report" / "ranking.csv"));
  CHECK(fs::exists(kWork / "report" / "winmatrix_forrester.csv"));
}

TEST_CASE("interactive oracle asks once per iteration") {
  fs::remove_all(kWork / "i");
  const Run r = cli("run --mode pbo --rules muc --oracle interactive --iters 3 --fit-samples 100 --out " +
                        (kWork / "i").string(),
                    false, "1\\n0\\n1\\n");
  CHECK(r.code == 0);
  CHECK(count(r.out, "prefer A?") == 3);

  const Run closed = cli("run --mode pbo --rules muc --oracle interactive --iters 3 --fit-samples 100 "
                         "--no-resume --out " + (kWork / "i").string(),
                         false, "1\\n");
  CHECK(closed.code == 1);
}

TEST_CASE("analyze failures") {
  const Run missing = cli("analyze --input cli_no_such_dir", true);
  CHECK(missing.code == 1);
  CHECK(missing.out.find("cli_no_such_dir") != std::string::npos);
  fs::create_directories(kWork / "empty");
  CHECK(cli("analyze --input " + (kWork / "empty").string()).code == 1);
  CHECK(cli("analyze").code == 2);
}

TEST_CASE("list-benchmarks") {
  const Run r = cli("list-benchmarks");
  CHECK(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls.size() == 35);
  CHECK(ls[0] == "name,dim,kernel,box");
  const Run j = cli("list-benchmarks --json");
  CHECK(j.out.front() == '[');
}

TEST_CASE("decompose grid") {
  const Run r = cli("decompose --mu-range -1,1 --sigma2-range 0.5,1 --steps 3");
  CHECK(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 10);
  CHECK(ls[0] == "mu,sigma2,total,epistemic_var,aleatoric_var,bald_info,conditional_entropy_term");
  bool saw_origin = false;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto v = fields(ls[i]);
    REQUIRE(v.size() == 7);
    CHECK(std::fabs(v[2] - v[3] - v[4]) < 1e-10);
    if (v[0] == 0.0 && v[1] == 1.0) {
      saw_origin = true;
      CHECK(std::fabs(v[3] - 0.083333) < 1e-6);
    }
  }
  CHECK(saw_origin);
}

TEST_CASE("sample-posterior") {
  fs::create_directories(kWork);
  const fs::path empty = kWork / "empty.jsonl";
  std::ofstream(empty) << "{\"type\":\"header\",\"mode\":\"binary\",\"lower\":[0],\"upper\":[1],"
                          "\"kernel\":{\"family\":\"se_ard\",\"lengthscales\":[0.2],"
                          "\"signal_variance\":1.0,\"jitter\":1e-8}}\n";
  const std::string args = "sample-posterior --dataset " + empty.string() +
                           " --method decoupled --n-samples 100 --grid 50 --seed 3";
  const Run r = cli(args);
  CHECK(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 51);
  // Columns: x0, empirical mean, empirical variance, posterior mean, posterior variance, samples.
  double var = 0.0;
  for (std::size_t i = 1; i < ls.size(); ++i) var += fields(ls[i])[2];
  CHECK(std::fabs(var / 50 - 1.0) < 0.3);
  CHECK(cli(args).out == r.out);

  const fs::path crowded = kWork / "crowded.jsonl";
  {
    std::ofstream out(crowded);
    out << "{\"type\":\"header\",\"mode\":\"binary\",\"lower\":[0],\"upper\":[1],"
           "\"kernel\":{\"family\":\"se_ard\",\"lengthscales\":[0.2],\"signal_variance\":1.0,"
           "\"jitter\":1e-8}}\n";
    for (int i = 0; i < 12; ++i) out << "{\"x\":[" << i / 11.0 << "],\"c\":" << i % 2 << "}\n";
  }
  const Run starved = cli("sample-posterior --dataset " + crowded.string() +
                              " --method weight-space --features 8 --n-samples 5 --grid 5",
                          true);
  CHECK(starved.code == 0);
  CHECK(starved.out.find("variance starvation") != std::string::npos);

  const fs::path broken = kWork / "broken.jsonl";
  std::ofstream(broken) << "not json\n";
  CHECK(cli("sample-posterior --dataset " + broken.string()).code == 1);
}
