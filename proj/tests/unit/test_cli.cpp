#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "qalloc/cli.hpp"

using namespace qalloc;
using namespace qalloc::cli;
namespace fs = std::filesystem;

namespace {

const std::string kProblems = QALLOC_PROBLEMS_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qalloc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempFile {
 public:
  explicit TempFile(const std::string& content) {
    static int counter = 0;
    path_ = (fs::temp_directory_path() / ("qalloc_test_" + std::to_string(::getpid()) + "_" +
                                          std::to_string(counter++) + ".json"))
                .string();
    std::ofstream(path_) << content;
  }
  ~TempFile() { fs::remove(path_); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

int exit_for(const std::string& command, const std::string& content) {
  TempFile f(content);
  return invoke({command, f.path()}).code;
}

json strip_time(const std::string& text) {
  json j = json::parse(text);
  j.erase("wall_time_s");
  return j;
}

}  // namespace

TEST(CliAllocate, H1Fairness) {
  const auto o = invoke({"allocate", kProblems + "/allocation_custom.json"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  const double oracle = std::log(0.6) + std::log((std::pow(2.0, 1.5) - 1.0) / (std::pow(2.0, 1.5) + 1.0));
  EXPECT_NEAR(j["results"]["fairness"].get<double>(), oracle, 1e-12);
}

TEST(CliAllocate, H2ReliabilityAndPerEdgeValues) {
  const auto o = invoke({"allocate", kProblems + "/allocation_h2.json", "--criterion", "reliability"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  EXPECT_NEAR(j["results"]["reliability"].get<double>(), 0.30088, 1e-5);
  EXPECT_FALSE(j["results"].contains("fairness"));

  const Report r = cmd_allocate(json::parse(R"({"schema_version":1,"kind":"allocation","hypergraph":"H2","d":3})"), {});
  const auto& edges = r.results["edges"];
  ASSERT_EQ(edges.size(), 3u);
  EXPECT_NEAR(edges[0]["value"].get<double>(), 0.5, 1e-15);
  EXPECT_NEAR(edges[1]["value"].get<double>(), 0.267949, 1e-6);
  EXPECT_NEAR(edges[2]["value"].get<double>(), 0.267949, 1e-6);
}

TEST(CliEquitable, Monogamy) {
  const auto o = invoke({"equitable", kProblems + "/equitable_monogamy.json"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json sol = json::parse(o.out)["results"]["solutions"][0];
  EXPECT_NEAR(sol["values"]["N_AB"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(sol["values"]["N_5"].get<double>(), 0.5, 1e-12);
  EXPECT_EQ(sol["elimination_order"].size(), 2u);
  EXPECT_EQ(sol["stage_values"].size(), 2u);
}

TEST(CliEquitable, ExclusivityAndEmptyConstraints) {
  const Report ex = cmd_equitable(
      json::parse(R"({"schema_version":1,"kind":"equitable","builder":{"name":"exclusivity","gap_n":0.9442,"gap_m":1.0}})"),
      {});
  EXPECT_EQ(ex.results["solutions"][0]["values"]["N_m"].get<double>(), 1.0);
  EXPECT_EQ(ex.results["solutions"][0]["values"]["N_n"].get<double>(), 0.0);

  const Report box = cmd_equitable(json::parse(R"({"schema_version":1,"kind":"equitable","problem":{
      "variables":[{"id":"p","upper":0.3},{"id":"q","upper":0.8}]}})"),
                                   {});
  EXPECT_EQ(box.results["solutions"][0]["values"]["p"].get<double>(), 0.3);
  EXPECT_EQ(box.results["solutions"][0]["values"]["q"].get<double>(), 0.8);
}

TEST(CliRobustness, QubitMubAgainstClosedForm) {
  const auto o = invoke({"robustness", kProblems + "/robustness_qubit_mub.json"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json r = json::parse(o.out)["results"];
  EXPECT_NEAR(r["value"].get<double>(), 0.1716, 1e-3);
  EXPECT_LE(r["abs_diff"].get<double>(), 1e-3);
  EXPECT_LE(r["lo"].get<double>(), r["hi"].get<double>());
}

TEST(CliRobustness, CompatibleCases) {
  const Report dep = cmd_robustness(
      json::parse(R"({"schema_version":1,"kind":"robustness","assembly":{"type":"mub_pair","d":2,"eta":0.5}})"), {});
  EXPECT_EQ(dep.results["value"].get<double>(), 0.0);
  EXPECT_FALSE(dep.results.contains("closed_form"));
  const Report same = cmd_robustness(json::parse(R"({"schema_version":1,"kind":"robustness","assembly":{
      "type":"explicit","povms":[[[[1,0],[0,0]],[[0,0],[0,1]]],[[[1,0],[0,0]],[[0,0],[0,1]]]]}})"),
                                     {});
  EXPECT_EQ(same.results["value"].get<double>(), 0.0);
}

TEST(CliBellVerify, SeededRun) {
  const auto o = invoke({"bell-verify", kProblems + "/bell_verify.json"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json r = json::parse(o.out)["results"];
  EXPECT_LE(r["max_residual"].get<double>(), 1e-10);
  EXPECT_EQ(r["trials"].get<int>(), 100);
}

TEST(CliBellVerify, ZeroProjectorsSingleTrial) {
  BellVerifyProblem p;
  p.trials = 1;
  p.projectors = "zero";
  const Report r = cmd_bell_verify(p, {});
  EXPECT_EQ(r.results["max_residual"].get<double>(), 0.0);
  EXPECT_EQ(r.exit_code, 0);
}

TEST(CliDeterminism, SameSeedSameReport) {
  const auto a = invoke({"bell-verify", "--trials", "25", "--seed", "42"});
  const auto b = invoke({"bell-verify", "--trials", "25", "--seed", "42"});
  const auto c = invoke({"bell-verify", "--trials", "25", "--seed", "43"});
  EXPECT_EQ(strip_time(a.out), strip_time(b.out));
  EXPECT_NE(strip_time(a.out)["results"], strip_time(c.out)["results"]);
  for (const char* file : {"allocation_h2.json", "equitable_knapsack.json", "robustness_qubit_mub.json"}) {
    const std::string path = kProblems + "/" + file;
    const std::string cmd = file[0] == 'a' ? "allocate" : file[0] == 'e' ? "equitable" : "robustness";
    EXPECT_EQ(strip_time(invoke({cmd, path}).out), strip_time(invoke({cmd, path}).out)) << file;
  }
}

TEST(CliReport, EchoesInputsAndProvenance) {
  const auto o = invoke({"robustness", kProblems + "/robustness_qubit_mub.json", "--seed", "5"});
  const json j = json::parse(o.out);
  EXPECT_EQ(j["inputs"]["assembly"]["type"], "mub_pair");
  EXPECT_EQ(j["provenance"]["seed"], 5);
  EXPECT_TRUE(j["provenance"].contains("version"));
  EXPECT_TRUE(j["provenance"]["tolerances"].contains("bracket"));
  EXPECT_TRUE(j.contains("wall_time_s"));
}

TEST(CliFormats, CsvAndTextAndOutFile) {
  const auto csv = invoke({"allocate", kProblems + "/allocation_h2.json", "--format", "csv"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "edge,size,value,prior");
  EXPECT_NE(csv.out.find("\"{a,b}\""), std::string::npos);

  const auto text = invoke({"equitable", kProblems + "/equitable_monogamy.json", "--format", "text"});
  EXPECT_NE(text.out.find("N_AB"), std::string::npos);

  const std::string out = (fs::temp_directory_path() / "qalloc_cli_out.json").string();
  const auto file = invoke({"allocate", kProblems + "/allocation_h2.json", "--out", out});
  EXPECT_EQ(file.code, 0);
  EXPECT_TRUE(file.out.empty());
  std::ifstream in(out);
  EXPECT_EQ(json::parse(in)["command"], "allocate");
  fs::remove(out);
}

TEST(CliExitCodes, Golden) {
  // 2: schema
  EXPECT_EQ(invoke({"allocate", "/nonexistent/problem.json"}).code, exit_code::kSchema);
  EXPECT_EQ(exit_for("allocate", "{not json"), exit_code::kSchema);
  EXPECT_EQ(exit_for("allocate", R"({"schema_version":2,"kind":"allocation","hypergraph":"H1","d":2})"), 2);
  EXPECT_EQ(exit_for("allocate", R"({"schema_version":1,"kind":"equitable","hypergraph":"H1","d":2})"), 2);
  EXPECT_EQ(exit_for("allocate", R"({"schema_version":1,"kind":"allocation","hypergraph":"H1"})"), 2);
  EXPECT_EQ(exit_for("allocate", R"({"schema_version":1,"kind":"allocation","hypergraph":{"vertices":["a"],"edges":[["z"]]},"d":2})"), 2);
  EXPECT_EQ(exit_for("allocate", R"({"schema_version":1,"kind":"allocation","hypergraph":"H2","d":2,"priors":{"a":0.5}})"), 2);
  EXPECT_EQ(exit_for("equitable", R"({"schema_version":1,"kind":"equitable","problem":{"variables":[{"id":"x","upper":1}],
      "constraints":[{"coefficients":{"y":1},"budget":1}]}})"), 2);
  EXPECT_EQ(exit_for("robustness", R"({"schema_version":1,"kind":"robustness","assembly":{"type":"mub_pair","d":"two"}})"), 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"allocate", kProblems + "/allocation_h2.json", "--format", "xml"}).code, 2);

  // 3: domain
  EXPECT_EQ(exit_for("allocate", R"({"schema_version":1,"kind":"allocation","hypergraph":"H1","d":1})"), 3);
  EXPECT_EQ(exit_for("allocate", R"({"schema_version":1,"kind":"allocation","hypergraph":"H2","d":2,"priors":{"a":1.5,"b":0.1}})"), 3);
  EXPECT_EQ(exit_for("equitable", R"({"schema_version":1,"kind":"equitable","builder":{"name":"monogamy","lambda":4}})"), 3);
  EXPECT_EQ(exit_for("equitable", R"({"schema_version":1,"kind":"equitable","problem":{"variables":[{"id":"x","lower":1,"upper":0.5}]}})"), 3);
  EXPECT_EQ(exit_for("robustness", R"({"schema_version":1,"kind":"robustness","assembly":{"type":"explicit","povms":[[[[0.5,0],[0,0.5]]]]}})"), 3);

  // 4: infeasible
  const auto inf = [] {
    TempFile f(R"({"schema_version":1,"kind":"equitable","problem":{"variables":[{"id":"x","lower":0.6,"upper":1},
        {"id":"y","lower":0.6,"upper":1}],"constraints":[{"coefficients":{"x":1,"y":1},"budget":1,"label":"cap"}]}})");
    return invoke({"equitable", f.path()});
  }();
  EXPECT_EQ(inf.code, exit_code::kInfeasible);
  EXPECT_NE(inf.err.find("cap"), std::string::npos);

  // 5: cap exceeded
  EXPECT_EQ(exit_for("robustness", R"({"schema_version":1,"kind":"robustness","assembly":{"type":"product_mub","sites":3,"d":3}})"), 5);
  EXPECT_EQ(exit_for("robustness", R"({"schema_version":1,"kind":"robustness","assembly":{"type":"mub_pair","d":2},"s_max":0.01})"), 5);
}

TEST(CliExitCodes, SchemaErrorsCarryFieldPath) {
  TempFile f(R"({"schema_version":1,"kind":"equitable","problem":{"variables":[{"id":"x","upper":"high"}]}})");
  const auto o = invoke({"equitable", f.path()});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("/problem/variables/0/upper"), std::string::npos) << o.err;
  EXPECT_TRUE(o.out.empty());
}

TEST(CliExamples, EveryCommittedProblemRuns) {
  for (const auto& entry : fs::directory_iterator(kProblems)) {
    const json doc = load_problem_file(entry.path().string());
    std::string kind = check_header(doc);
    const std::string cmd = kind == "allocation" ? "allocate" : kind;
    EXPECT_EQ(invoke({cmd, entry.path().string()}).code, 0) << entry.path();
  }
}
