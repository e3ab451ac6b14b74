// Integration tests for the rbmest command line tool. The binary path
// arrives as the first program argument; every test shells out to it inside
// a scratch directory.
#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

std::string g_binary;
std::string g_scratch;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string out_path = g_scratch + "/stdout.txt";
  const std::string err_path = g_scratch + "/stderr.txt";
  std::string command = env_prefix;
  if (!command.empty()) command += " ";
  command += "'" + g_binary + "' " + args + " >'" + out_path + "' 2>'" + err_path + "'";
  const int status = std::system(command.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

nlohmann::json parse_report(const RunResult& r) {
  CAPTURE(r.err);
  REQUIRE_FALSE(r.out.empty());
  return nlohmann::json::parse(r.out);
}

std::string ratio_csv() {
  const std::string path = g_scratch + "/ratio.csv";
  write_file(path, "x,y\n1,3\n2,3\n3,6\n");
  return path;
}

// Small Poisson regression with a strong covariate effect.
std::string poisson_csv() {
  const std::string path = g_scratch + "/counts.csv";
  std::string csv = "y,z\n";
  const double y[] = {1, 2, 1, 3, 5, 8, 4, 6};
  const double z[] = {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  for (int i = 0; i < 8; ++i)
    csv += std::to_string(y[i]) + "," + std::to_string(z[i]) + "\n";
  write_file(path, csv);
  return path;
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// e(theta) for the worked ratio data at theta = 1.98.
const double kE198 = 54.0 + 1.98 * 1.98 * 14.0 - 2.0 * 1.98 * 27.0;

}  // namespace

TEST_CASE("worked ratio example reports the reduced-bias fit") {
  const std::string data = ratio_csv();
  const RunResult r =
      run_cli("fit --model ratio --estimator rbm --data '" + data + "' --epsilon 1e-13");
  CHECK(r.code == 0);
  const nlohmann::json report = parse_report(r);
  CHECK(report["estimates"][0].get<double>() == doctest::Approx(1.98).epsilon(1e-12));
  CHECK(report["se"][0].get<double>() ==
        doctest::Approx(std::sqrt(kE198) / 6.0).epsilon(1e-12));
  CHECK(report["convergence"]["converged"].get<bool>());
  CHECK(report["coefficients"][0]["name"].get<std::string>() == "theta");
  CHECK(report["criteria"].is_null());
  // The standard errors square to the vcov diagonal.
  const double se = report["se"][0].get<double>();
  CHECK(se * se == doctest::Approx(report["vcov"][0][0].get<double>()).epsilon(1e-12));
}

TEST_CASE("estimator dispatch matches the closed forms") {
  const std::string data = ratio_csv();
  const RunResult rm = run_cli("fit --model ratio --estimator m --data '" + data + "'");
  CHECK(rm.code == 0);
  CHECK(parse_report(rm)["estimates"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-12));

  const RunResult ro = run_cli("fit --model ratio --estimator onestep --data '" + data + "'");
  CHECK(ro.code == 0);
  CHECK(parse_report(ro)["estimates"][0].get<double>() ==
        doctest::Approx(71.0 / 36.0).epsilon(1e-12));
}

TEST_CASE("pivots are emitted for a supplied null point") {
  const std::string data = ratio_csv();
  const RunResult r =
      run_cli("fit --model ratio --estimator rbm --data '" + data + "' --null 2");
  CHECK(r.code == 0);
  const nlohmann::json report = parse_report(r);
  const auto& pivots = report["pivots"];
  CHECK(pivots["wald"]["df"].get<int>() == 1);
  CHECK(pivots["wald"]["statistic"].get<double>() ==
        doctest::Approx(0.02 * 0.02 * 36.0 / kE198).epsilon(1e-9));
  // At theta0 = 2 the unadjusted score vanishes, leaving only A(2) = -1/6.
  CHECK(pivots["score"]["statistic"].get<double>() ==
        doctest::Approx((1.0 / 36.0) / kE198).epsilon(1e-9));
  CHECK(pivots["wald"]["pvalue"].get<double>() > 0.0);
  CHECK(pivots["score"]["pvalue"].get<double>() < 1.0);
}

TEST_CASE("penalized estimators reject vector-psi models as input errors") {
  const std::string data = ratio_csv();
  const RunResult r =
      run_cli("fit --model ratio --estimator penalized --data '" + data + "'");
  CHECK(r.code == 1);
  CHECK(r.err.find("FlavorMismatch") != std::string::npos);
}

TEST_CASE("empty and malformed data files are input errors") {
  const std::string empty = g_scratch + "/empty.csv";
  write_file(empty, "");
  RunResult r = run_cli("fit --model ratio --data '" + empty + "'");
  CHECK(r.code == 1);
  CHECK(r.err.find("EmptyData") != std::string::npos);

  const std::string header_only = g_scratch + "/header_only.csv";
  write_file(header_only, "x,y\n");
  r = run_cli("fit --model ratio --data '" + header_only + "'");
  CHECK(r.code == 1);
  CHECK(r.err.find("EmptyData") != std::string::npos);

  const std::string bad_number = g_scratch + "/bad_number.csv";
  write_file(bad_number, "x,y\n1,3\n2,zebra\n");
  r = run_cli("fit --model ratio --data '" + bad_number + "'");
  CHECK(r.code == 1);
  CHECK(r.err.find(":3") != std::string::npos);
  CHECK(r.err.find("zebra") != std::string::npos);

  const std::string ragged = g_scratch + "/ragged.csv";
  write_file(ragged, "x,y\n1,2,3\n");
  r = run_cli("fit --model ratio --data '" + ragged + "'");
  CHECK(r.code == 1);
  CHECK(r.err.find("expected 2 fields") != std::string::npos);

  r = run_cli("fit --model ratio --data '" + g_scratch + "/does_not_exist.csv'");
  CHECK(r.code == 1);
}

TEST_CASE("glm reports round-trip as starting values") {
  const std::string data = poisson_csv();
  const RunResult first =
      run_cli("fit --model glm --family poisson --estimator rbm --data '" + data + "'");
  CHECK(first.code == 0);
  const nlohmann::json report = parse_report(first);
  REQUIRE(report["estimates"].size() == 2);
  CHECK(report["criteria"]["aic"]["penalty"].get<double>() == doctest::Approx(2.0));
  const double m2 = report["criteria"]["tic"]["minus_two"].get<double>();
  const double lb = report["criteria"]["tic"]["larger_better"].get<double>();
  CHECK(m2 == doctest::Approx(-2.0 * lb).epsilon(1e-12));

  const std::string start = format_full(report["estimates"][0].get<double>()) + "," +
                            format_full(report["estimates"][1].get<double>());
  const RunResult second = run_cli("fit --model glm --family poisson --estimator rbm --data '" +
                                   data + "' --start " + start);
  CHECK(second.code == 0);
  const nlohmann::json refit = parse_report(second);
  CHECK(refit["convergence"]["converged"].get<bool>());
  CHECK(refit["convergence"]["iterations"].get<int>() <= 2);
}

TEST_CASE("quasi fits report the Pearson moment dispersion") {
  const std::string data = poisson_csv();
  const RunResult r = run_cli(
      "fit --model quasi --link log --varfun mu --quasi-mode moment --estimator rbm "
      "--data '" +
      data + "'");
  CHECK(r.code == 0);
  const nlohmann::json report = parse_report(r);
  CHECK(report["dispersion"]["method"].get<std::string>() == "pearson_moment");
  CHECK(report["dispersion"]["divisor"].get<int>() == 6);  // n - p = 8 - 2
  CHECK(report["dispersion"]["phi"].get<double>() > 0.0);
}

TEST_CASE("non-convergence exits 2 with the report still emitted") {
  const std::string data = poisson_csv();
  const RunResult r = run_cli("fit --model glm --family poisson --estimator rbm --data '" +
                              data + "' --max-iter 3 --start 5,5");
  CHECK(r.code == 2);
  const nlohmann::json report = parse_report(r);
  CHECK_FALSE(report["convergence"]["converged"].get<bool>());
}

TEST_CASE("simulate is deterministic and honors RBM_SEED") {
  const std::string design = g_scratch + "/design.json";
  write_file(design,
             "{\"kind\":\"ratio_copula\",\"sample_sizes\":[10,20],"
             "\"replications\":40,\"rule\":\"fixed\",\"seed\":42}\n");

  const RunResult a =
      run_cli("simulate --design '" + design + "' --out '" + g_scratch + "/out_a'");
  CHECK(a.code == 0);
  CHECK(a.err.find("n=10") != std::string::npos);
  const RunResult b =
      run_cli("simulate --design '" + design + "' --out '" + g_scratch + "/out_b'");
  CHECK(b.code == 0);
  const std::string json_a = slurp(g_scratch + "/out_a/summary.json");
  const std::string json_b = slurp(g_scratch + "/out_b/summary.json");
  REQUIRE_FALSE(json_a.empty());
  CHECK(json_a == json_b);
  CHECK_FALSE(slurp(g_scratch + "/out_a/summary.csv").empty());

  const RunResult c = run_cli("simulate --design '" + design + "' --out '" + g_scratch +
                              "/out_c' --threads 3");
  CHECK(c.code == 0);
  CHECK(slurp(g_scratch + "/out_c/summary.json") == json_a);

  const RunResult d = run_cli(
      "simulate --design '" + design + "' --out '" + g_scratch + "/out_d'", "RBM_SEED=77");
  CHECK(d.code == 0);
  const std::string json_d = slurp(g_scratch + "/out_d/summary.json");
  CHECK(json_d != json_a);
  CHECK(json_d.find("\"seed\": 77") != std::string::npos);

  const RunResult bad_seed = run_cli(
      "simulate --design '" + design + "' --out '" + g_scratch + "/out_e'", "RBM_SEED=abc");
  CHECK(bad_seed.code == 1);
  CHECK(bad_seed.err.find("RBM_SEED") != std::string::npos);
}

TEST_CASE("design documents are validated with pointer paths") {
  const std::string bad_kind = g_scratch + "/bad_kind.json";
  write_file(bad_kind,
             "{\"kind\":\"weird\",\"sample_sizes\":[10],\"replications\":5}\n");
  RunResult r = run_cli("simulate --design '" + bad_kind + "' --out '" + g_scratch + "/x'");
  CHECK(r.code == 1);
  CHECK(r.err.find("/kind") != std::string::npos);

  const std::string no_reps = g_scratch + "/no_reps.json";
  write_file(no_reps, "{\"kind\":\"ratio_copula\",\"sample_sizes\":[10]}\n");
  r = run_cli("simulate --design '" + no_reps + "' --out '" + g_scratch + "/x'");
  CHECK(r.code == 1);
  CHECK(r.err.find("/replications") != std::string::npos);

  const std::string unknown_field = g_scratch + "/unknown_field.json";
  write_file(unknown_field,
             "{\"kind\":\"ratio_copula\",\"sample_sizes\":[10],"
             "\"replications\":5,\"foo\":1}\n");
  r = run_cli("simulate --design '" + unknown_field + "' --out '" + g_scratch + "/x'");
  CHECK(r.code == 1);
  CHECK(r.err.find("/foo") != std::string::npos);
}

TEST_CASE("select ranks candidates and reports exclusions") {
  // w duplicates z exactly, so the 'collinear' candidate cannot be fitted.
  const std::string data = g_scratch + "/select.csv";
  std::string csv = "y,z,w\n";
  for (int i = 0; i < 24; ++i) {
    const double z = 0.25 * i - 3.0;
    const double y = std::floor(std::exp(0.5 + 0.6 * z) + 0.5);
    csv += std::to_string(y) + "," + std::to_string(z) + "," + std::to_string(z) + "\n";
  }
  write_file(data, csv);

  const std::string candidates = g_scratch + "/candidates.json";
  write_file(candidates, R"({"candidates": [
    {"name": "collinear", "model": "glm", "family": "poisson", "covariates": ["z", "w"]},
    {"name": "slope", "model": "glm", "family": "poisson", "covariates": ["z"]},
    {"name": "slope_dup", "model": "glm", "family": "poisson", "covariates": ["z"]},
    {"name": "intercept_only", "model": "glm", "family": "poisson", "covariates": []}
  ]})");

  const RunResult r = run_cli("select --candidates '" + candidates + "' --data '" + data +
                              "' --criterion aic --at rbm");
  CHECK(r.code == 0);
  const nlohmann::json report = parse_report(r);
  REQUIRE(report["candidates"].size() == 4);

  const auto& collinear = report["candidates"][0];
  CHECK(collinear["excluded"].get<bool>());
  CHECK(collinear["error"].get<std::string>().find("SingularMatrix") != std::string::npos);
  CHECK(report["excluded"].get<int>() == 1);

  const auto& slope = report["candidates"][1];
  const auto& slope_dup = report["candidates"][2];
  CHECK(slope["minus_two"].get<double>() == slope_dup["minus_two"].get<double>());
  CHECK(slope["rank"].get<int>() < slope_dup["rank"].get<int>());
  CHECK(slope["weight"].get<double>() == slope_dup["weight"].get<double>());
  CHECK(report["best"].get<std::string>() == "slope");
  CHECK(slope["best"].get<bool>());
  CHECK_FALSE(slope_dup["best"].get<bool>());
  CHECK(slope["penalty"].get<double>() == doctest::Approx(2.0));

  double weight_sum = 0.0;
  for (const auto& c : report["candidates"])
    if (!c.contains("excluded")) weight_sum += c["weight"].get<double>();
  CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a single candidate receives weight one") {
  const std::string data = poisson_csv();
  const std::string candidates = g_scratch + "/single.json";
  write_file(candidates,
             R"([{"name": "only", "model": "glm", "family": "poisson"}])");
  const RunResult r = run_cli("select --candidates '" + candidates + "' --data '" + data +
                              "' --criterion tic --at rbm");
  CHECK(r.code == 0);
  const nlohmann::json report = parse_report(r);
  CHECK(report["candidates"][0]["weight"].get<double>() == doctest::Approx(1.0));
  CHECK(report["best"].get<std::string>() == "only");
}

TEST_CASE("information criteria exclude estimating-equation candidates") {
  const std::string data = poisson_csv();
  const std::string candidates = g_scratch + "/mixed.json";
  write_file(candidates, R"([
    {"name": "glm", "model": "glm", "family": "poisson"},
    {"name": "quasi", "model": "quasi", "link": "log", "varfun": "mu"}
  ])");
  const RunResult r = run_cli("select --candidates '" + candidates + "' --data '" + data +
                              "' --criterion tic --at rbm");
  CHECK(r.code == 0);
  const nlohmann::json report = parse_report(r);
  CHECK(report["candidates"][1]["excluded"].get<bool>());
  CHECK(report["candidates"][1]["error"].get<std::string>().find("FlavorMismatch") !=
        std::string::npos);
  CHECK(report["best"].get<std::string>() == "glm");
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-rbmest-binary> [doctest args]\n");
    return 1;
  }
  g_binary = argv[1];
  char scratch_template[] = "/tmp/rbmest_cli_XXXXXX";
  if (!mkdtemp(scratch_template)) {
    std::fprintf(stderr, "cannot create scratch directory\n");
    return 1;
  }
  g_scratch = scratch_template;

  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  return ctx.run();
}
