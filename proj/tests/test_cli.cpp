#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(OPTREG_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(OPTREG_CONFIGS) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("optreg_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const nlohmann::json& j) const {
    std::ofstream(path / name) << j.dump(2);
    return path / name;
  }
};

nlohmann::json small_risk_experiment() {
  return {{"scenario",
           {{"kind", "risk"}, {"premium", 2.0}, {"sigma", 1.0}, {"lambda_r", 0.5},
            {"claim_size", 1.0}, {"lambda_g", 0.3}, {"gain_size", 1.0}, {"horizon", 12.0},
            {"step", 0.02}}},
          {"experiment", {{"kind", "unbiasedness"}, {"replicates", 50}, {"levels", {5, 10}}}}};
}

}  // namespace

TEST_CASE("mc twice with the same seed writes identical bytes") {
  TempDir dir;
  const auto cfg = dir.write("small.cfg", small_risk_experiment());
  const auto a = dir.path / "a.csv", b = dir.path / "b.csv";
  const Run ra = run("mc --config " + cfg.string() + " --seed 42 --out " + a.string());
  const Run rb = run("mc --config " + cfg.string() + " --seed 42 --threads 1 --out " + b.string());
  CHECK(ra.code == 0);
  CHECK(rb.code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(dir.path / "a.cell0.raw.csv") == slurp(dir.path / "b.cell0.raw.csv"));
  CHECK(slurp(dir.path / "a.cell1.raw.csv") == slurp(dir.path / "b.cell1.raw.csv"));
  CHECK(ra.out == slurp(a));
  const auto c = dir.path / "c.csv";
  run("mc --config " + cfg.string() + " --seed 43 --out " + c.string());
  CHECK(slurp(a) != slurp(c));
}

TEST_CASE("seed precedence: flag over config over environment") {
  TempDir dir;
  auto j = small_risk_experiment();
  const auto cfg = dir.write("noseed.cfg", j);
  const std::string base = "sequential --H 5 --config " + cfg.string();
  const Run flag = run(base + " --seed 9");
  CHECK(flag.code == 0);
  CHECK(run(base, "OPT_REGRESS_SEED=9").out == flag.out);
  CHECK(run(base + " --seed 9", "OPT_REGRESS_SEED=1").out == flag.out);
  CHECK(run(base, "OPT_REGRESS_SEED=1").out != flag.out);
  CHECK(run(base, "OPT_REGRESS_SEED=abc").code == 1);
  j["scenario"]["seed"] = 9;
  const auto seeded = dir.write("seeded.cfg", j);
  CHECK(run("sequential --H 5 --config " + seeded.string(), "OPT_REGRESS_SEED=1").out == flag.out);
}

TEST_CASE("check-conditions reports the closed form") {
  const Run r = run("check-conditions --config " + config("risk_a2.cfg") + " --q 2");
  CHECK(r.code == 0);
  CHECK(r.out.find("slln_condition_q2,3\n") != std::string::npos);
  CHECK(r.out.find("design_diverges,true") != std::string::npos);
  const Run g = run("check-conditions --config " + config("nonlinear.cfg"));
  CHECK(g.out.find("g_condition_sqrt,7.5198848") != std::string::npos);
  CHECK(g.out.find("g_condition_converged,true") != std::string::npos);
  const Run ou = run("check-conditions --config " + config("ou.cfg"));
  CHECK(ou.code == 0);
  CHECK(ou.out.find("slln_condition_q2,unsupported") != std::string::npos);
}

TEST_CASE("sequential on the risk config stops at H") {
  const Run r = run("sequential --config " + config("risk.cfg") + " --H 100 --seed 7");
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "replicate,seed,theta_true,theta_hat,tau_H,beta_H,crossed,form");
  CHECK(row.rfind("0,7,1.8", 0) == 0);
  CHECK(row.find(",100,0,true,corrected") != std::string::npos);
}

TEST_CASE("simulate, then estimate from the written path") {
  TempDir dir;
  const auto path = dir.path / "x.csv";
  const Run s = run("simulate --config " + config("risk.cfg") + " --seed 3 --out " + path.string());
  CHECK(s.code == 0);
  const Run from_file = run("estimate --config " + config("risk.cfg") + " --path " +
                            path.string() + " --t 5 --t 50");
  const Run fresh = run("estimate --config " + config("risk.cfg") + " --seed 3 --t 5 --t 50");
  CHECK(from_file.code == 0);
  CHECK(from_file.out.rfind("t,theta_t\n5,", 0) == 0);
  CHECK(from_file.out == fresh.out);
  const Run seq_file = run("sequential --config " + config("risk.cfg") + " --H 20 --path " +
                           path.string());
  CHECK(seq_file.code == 0);
}

TEST_CASE("hypothesis prints one decision row") {
  const Run r = run("hypothesis --config " + config("hypothesis.cfg") + " --seed 1 --under H1");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("replicate,true_hypothesis,theta,phi,decision,H,delta,epsilon\n0,H1,0,", 0) == 0);
  CHECK(r.out.find(",144,1,0.05\n") != std::string::npos);
}

TEST_CASE("usage and config errors exit 1") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("sequential --config " + config("risk.cfg")).code == 1);
  CHECK(run("sequential --H 5 --config /nonexistent.cfg").code == 1);
  CHECK(run("sequential --H 5 --config " + config("risk.cfg") + " --form sideways").code == 1);
  TempDir dir;
  auto j = small_risk_experiment();
  j["experiment"]["kind"] = "kronecker";
  j["scenario"]["kind"] = "nonlinear";
  j["scenario"].erase("premium");
  CHECK(run("mc --config " + dir.write("bad.cfg", j).string()).code == 1);
}

TEST_CASE("a failing experiment exits 2") {
  TempDir dir;
  auto j = small_risk_experiment();
  j["experiment"]["kind"] = "variance_bound";
  j["experiment"]["variance_slack"] = 1e-6;
  const auto out = dir.path / "fail.csv";
  const Run r = run("mc --config " + dir.write("fail.cfg", j).string() + " --out " + out.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("variance_bound,overall,,,,,,,,,,fail") != std::string::npos);
}
