#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddsafe/cli/commands.hpp"
#include "ddsafe/io/hash.hpp"
#include "ddsafe/synth/certificate.hpp"

using namespace ddsafe;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string config_path(const char* name) { return std::string(DDSAFE_CONFIG_DIR) + "/" + name; }

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::string& command, const cli::Options& opt) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(command, opt, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("ddsafe_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& leaf) const { return (dir_ / leaf).string(); }

  std::string write(const std::string& leaf, const std::string& text) const {
    std::ofstream(path(leaf)) << text;
    return path(leaf);
  }

  fs::path dir_;
};

cli::Options gen_opts(const std::string& config, const std::string& out) {
  cli::Options o;
  o.config = config;
  o.out = out;
  return o;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

/// Manifest entries that must not depend on when the command ran.
json stable_part(json manifest) {
  manifest.erase("started");
  manifest.erase("finished");
  manifest.erase("solver_seconds");
  return manifest;
}

}  // namespace

TEST_F(CliTest, GenWritesEightyRowsAndIsDeterministic) {
  const auto a = run("gen", gen_opts(config_path("flow.yaml"), path("a.csv")));
  ASSERT_EQ(a.code, cli::kOk) << a.err;
  const auto b = run("gen", gen_opts(config_path("flow.yaml"), path("a.csv")));
  ASSERT_EQ(b.code, cli::kOk) << b.err;
  std::ifstream in(path("a.csv"));
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 81);
  EXPECT_EQ(a.out, b.out);

  auto opt = gen_opts(config_path("flow.yaml"), path("c.csv"));
  opt.seed = 2;
  ASSERT_EQ(run("gen", opt).code, cli::kOk);
  EXPECT_NE(io::sha256_file(path("a.csv")), io::sha256_file(path("c.csv")));

  const auto m = read_json(path("a.csv.manifest.json"));
  EXPECT_EQ(m.at("tool_version"), cli::kToolVersion);
  ASSERT_EQ(m.at("files").size(), 1u);
  EXPECT_EQ(m.at("files")[0].at("sha256"), io::sha256_file(path("a.csv")));
  EXPECT_EQ(m.at("config").at("sha256"), io::sha256_file(config_path("flow.yaml")));
}

TEST_F(CliTest, InvalidConfigExitsOneWithFieldDiagnostic) {
  std::ifstream in(config_path("expand1d.yaml"));
  std::stringstream text;
  text << in.rdbuf();
  std::string s = text.str();
  s.replace(s.find("samples: 20"), 11, "samples: 0");
  const auto r = run("gen", gen_opts(write("bad.yaml", s), path("x.csv")));
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_NE(r.err.find("data.samples"), std::string::npos) << r.err;
  EXPECT_EQ(run("frobnicate", {}).code, cli::kUsage);
  EXPECT_EQ(run("gen", {}).code, cli::kUsage);
}

TEST_F(CliTest, ToyPipelineCertifiesSimulatesAndVerifies) {
  const auto cfg = config_path("expand1d.yaml");
  ASSERT_EQ(run("gen", gen_opts(cfg, path("toy.csv"))).code, cli::kOk);

  cli::Options s;
  s.config = cfg;
  s.dataset = path("toy.csv");
  s.out = path("cert.json");
  const auto syn = run("synth", s);
  ASSERT_EQ(syn.code, cli::kOk) << syn.out << syn.err;
  EXPECT_NE(syn.out.find("columns=3"), std::string::npos) << syn.out;
  EXPECT_NE(syn.out.find("status=certified"), std::string::npos) << syn.out;
  const auto cert_hash = io::sha256_file(path("cert.json"));
  const auto synth_manifest = stable_part(read_json(path("cert.json.manifest.json")));

  cli::Options sim;
  sim.config = cfg;
  sim.certificate = path("cert.json");
  sim.out = path("sim");
  const auto r = run("simulate", sim);
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto audit = read_json(path("sim/audit.json"));
  EXPECT_EQ(audit.at("unsafe_count"), 0);
  EXPECT_TRUE(fs::exists(path("sim/trajectories.csv")));
  EXPECT_TRUE(fs::exists(path("sim/levelset.csv")));
  const auto sim_manifest = stable_part(read_json(path("sim/manifest.json")));
  EXPECT_EQ(sim_manifest.at("files").size(), 3u);

  cli::Options v;
  v.config = cfg;
  v.dataset = path("toy.csv");
  v.certificate = path("cert.json");
  const auto ver = run("verify", v);
  EXPECT_EQ(ver.code, cli::kOk) << ver.out;
  EXPECT_NE(ver.out.find("verification passed"), std::string::npos);

  // Rerunning every stage reproduces the same artifacts.
  ASSERT_EQ(run("synth", s).code, cli::kOk);
  EXPECT_EQ(io::sha256_file(path("cert.json")), cert_hash);
  EXPECT_EQ(stable_part(read_json(path("cert.json.manifest.json"))), synth_manifest);
  ASSERT_EQ(run("simulate", sim).code, cli::kOk);
  EXPECT_EQ(stable_part(read_json(path("sim/manifest.json"))), sim_manifest);
}

TEST_F(CliTest, VerifyRejectsCorruptedAndCrossDatasetCertificates) {
  const auto cfg = config_path("expand1d.yaml");
  ASSERT_EQ(run("gen", gen_opts(cfg, path("toy.csv"))).code, cli::kOk);
  cli::Options s;
  s.config = cfg;
  s.dataset = path("toy.csv");
  s.out = path("cert.json");
  ASSERT_EQ(run("synth", s).code, cli::kOk);

  auto cert = synth::load_certificate_json(path("cert.json"));
  cert.rho = -cert.rho;
  synth::save_certificate_json(path("negated.json"), cert);
  cli::Options v;
  v.config = cfg;
  v.dataset = path("toy.csv");
  v.certificate = path("negated.json");
  const auto neg = run("verify", v);
  EXPECT_EQ(neg.code, cli::kVerification);
  EXPECT_NE(neg.out.find("gate initial-set-grid FAIL"), std::string::npos) << neg.out;
  EXPECT_NE(neg.out.find("verification failed:"), std::string::npos);

  auto other = gen_opts(cfg, path("other.csv"));
  other.seed = 99;
  ASSERT_EQ(run("gen", other).code, cli::kOk);
  v.certificate = path("cert.json");
  v.dataset = path("other.csv");
  const auto cross = run("verify", v);
  EXPECT_EQ(cross.code, cli::kVerification);
  EXPECT_NE(cross.out.find("gate identity FAIL"), std::string::npos) << cross.out;

  write("junk.json", "{\"schema\": 1}");
  v.dataset = path("toy.csv");
  v.certificate = path("junk.json");
  EXPECT_EQ(run("verify", v).code, cli::kUsage);
}

TEST_F(CliTest, InitialEqualsUnsafeExitsThree) {
  std::ifstream in(config_path("expand1d.yaml"));
  std::stringstream text;
  text << in.rdbuf();
  std::string s = text.str();
  s.replace(s.find("\"-1 - x1^2\""), 11, "\"0.25 - x1^2\"");
  const auto cfg = write("same.yaml", s);
  ASSERT_EQ(run("gen", gen_opts(cfg, path("d.csv"))).code, cli::kOk);
  cli::Options o;
  o.config = cfg;
  o.dataset = path("d.csv");
  o.out = path("rec.json");
  const auto r = run("synth", o);
  EXPECT_EQ(r.code, cli::kInfeasible) << r.out << r.err;
  const auto rec = read_json(path("rec.json"));
  EXPECT_EQ(rec.at("status"), "infeasible");
  EXPECT_EQ(rec.at("degrees").at("d1"), 2);
  EXPECT_NE(r.out.find("infeasible at degree (d1, d2) = (2, 1)"), std::string::npos) << r.out;
}

TEST_F(CliTest, OpenLoopFlowReachesUnsafeSet) {
  cli::Options o;
  o.config = config_path("flow.yaml");
  o.open_loop = true;
  o.out = path("ol");
  const auto r = run("simulate", o);
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_GE(read_json(path("ol/audit.json")).at("unsafe_count").get<int>(), 1);
  EXPECT_FALSE(fs::exists(path("ol/levelset.csv")));
  o.certificate = path("missing.json");
  EXPECT_EQ(run("simulate", o).code, cli::kUsage);
}

TEST_F(CliTest, ReportPrintsComplexityIdentitiesAndReferenceNotes) {
  const auto plain = run("report", {});
  ASSERT_EQ(plain.code, cli::kOk);
  EXPECT_NE(plain.out.find("C(19,3) = 969 -> C(5,3) = 10"), std::string::npos) << plain.out;
  EXPECT_NE(plain.out.find("C(28,4) = 20475 -> C(6,4) = 15"), std::string::npos) << plain.out;

  cli::Options o;
  o.config = config_path("flow.yaml");
  const auto flow = run("report", o);
  ASSERT_EQ(flow.code, cli::kOk) << flow.err;
  EXPECT_NE(flow.out.find("columns=22 (reference 22) faces=324 (reference 324)"), std::string::npos) << flow.out;
  EXPECT_NE(flow.out.find("max_gram=15 (reference 15)"), std::string::npos) << flow.out;

  o.config = config_path("expand1d.yaml");
  const auto toy = run("report", o);
  ASSERT_EQ(toy.code, cli::kOk);
  EXPECT_NE(toy.out.find("config expand1d"), std::string::npos) << toy.out;
}

TEST_F(CliTest, FlowSynthSummaryAndInfeasibilityRecord) {
  ASSERT_EQ(run("gen", gen_opts(config_path("flow.yaml"), path("flow.csv"))).code, cli::kOk);
  cli::Options o;
  o.config = config_path("flow.yaml");
  o.dataset = path("flow.csv");
  o.out = path("flow.json");
  const auto r = run("synth", o);
  EXPECT_NE(r.out.find("columns=22 faces=324"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("max_gram=15"), std::string::npos) << r.out;
  // The faithful constraint set admits no positive margin for a nonempty unsafe set.
  EXPECT_EQ(r.code, cli::kInfeasible) << r.out;
  EXPECT_EQ(read_json(path("flow.json")).at("status"), "infeasible");
}
