#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "amp/campaign.hpp"

using namespace amp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("amplab_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("config parser: comments, blanks, whitespace, duplicates") {
  CampaignConfig cfg = CampaignConfig::parse_text(
      "# a comment\n"
      "experiment = valiant\n"
      "\n"
      "  seed=9\n"
      "alpha = 0.3   \n");
  CHECK(cfg.experiment() == "valiant");
  CHECK(cfg.seed() == 9);
  CHECK(cfg.get_real("alpha", 0.0) == 0.3);
  CHECK_THROWS_AS(CampaignConfig::parse_text("a=1\na=2\n"), ConfigError);
  CHECK_THROWS_AS(CampaignConfig::parse_text("noequals\n"), ConfigError);
}

TEST_CASE("config validation rejects unknown keys and out-of-range values") {
  auto with = [](const std::string& body) {
    CampaignConfig c = CampaignConfig::parse_text(body);
    c.validate();
  };
  CHECK_THROWS_AS(with("experiment=valiant\nbogus_key=1\n"), ConfigError);
  CHECK_THROWS_AS(with("experiment=unknown_thing\n"), ConfigError);
  CHECK_THROWS_AS(with("experiment=valiant\neta=0\n"), ConfigError);
  CHECK_THROWS_AS(with("experiment=valiant\nalpha=0.6\nbeta=0.5\n"), ConfigError);
  CHECK_THROWS_AS(with("experiment=single\nn=25\n"), ConfigError);
  CHECK_THROWS_AS(with("experiment=single\neps=1.5\n"), ConfigError);
  CHECK_THROWS_AS(with("experiment=extract\nmode=sideways\n"), ConfigError);
  CHECK_THROWS_AS(with("experiment=puzzle\ng=nand\n"), ConfigError);
  // Keys from one experiment are not valid in another.
  CHECK_THROWS_AS(with("experiment=valiant\nhint_prob=0.3\n"), ConfigError);
}

TEST_CASE("canonical form drops output and parallelism but keeps the physics") {
  CampaignConfig a = CampaignConfig::parse_text("experiment=valiant\nseed=1\nout=/tmp/x\njobs=4\n");
  CampaignConfig b = CampaignConfig::parse_text("experiment=valiant\nseed=1\nout=/tmp/y\njobs=8\n");
  CHECK(a.canonical() == b.canonical());
  CHECK(a.digest() == b.digest());
  CampaignConfig c = CampaignConfig::parse_text("experiment=valiant\nseed=2\n");
  CHECK(a.digest() != c.digest());
}

TEST_CASE("a campaign writes records and a summary that replay verifies") {
  TempDir tmp;
  CampaignConfig cfg = CampaignConfig::parse_text("experiment=valiant\nseed=5\nsweep=0\n");
  cfg.validate();
  CampaignResult res = run_campaign(cfg);
  CHECK(res.pass);
  CHECK(!res.records.empty());
  write_outputs(res, tmp.path.string());
  CHECK(fs::exists(tmp.path / "records.jsonl"));
  CHECK(fs::exists(tmp.path / "summary.json"));

  ReplayReport rep1 = replay_campaign(tmp.path.string(), 1);
  CHECK(rep1.ok);
  CHECK(rep1.mismatches.empty());
  ReplayReport rep8 = replay_campaign(tmp.path.string(), 8);
  CHECK(rep8.ok);  // records are bit-identical regardless of jobs
}

TEST_CASE("replay flags tampered records") {
  TempDir tmp;
  CampaignConfig cfg = CampaignConfig::parse_text("experiment=valiant\nseed=6\nsweep=0\n");
  cfg.validate();
  write_outputs(run_campaign(cfg), tmp.path.string());

  // Flip one byte in the stored records.
  fs::path rec = tmp.path / "records.jsonl";
  std::string text;
  {
    std::ifstream in(rec);
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  REQUIRE(!text.empty());
  text[text.size() / 2] = text[text.size() / 2] == 'x' ? 'y' : 'x';
  std::ofstream(rec) << text;

  ReplayReport rep = replay_campaign(tmp.path.string(), 1);
  CHECK(!rep.ok);
  CHECK(!rep.mismatches.empty());
}

TEST_CASE("campaign results are reproducible across jobs settings") {
  CampaignConfig c1 = CampaignConfig::parse_text("experiment=extract\nseed=3\njobs=1\n");
  CampaignConfig c8 = CampaignConfig::parse_text("experiment=extract\nseed=3\njobs=8\n");
  c1.validate();
  c8.validate();
  CampaignResult r1 = run_campaign(c1);
  CampaignResult r8 = run_campaign(c8);
  CHECK(r1.records == r8.records);
  CHECK(r1.pass);
  CHECK(r8.pass);
}

TEST_CASE("seed changes the records, config digest pins the physics") {
  CampaignConfig a = CampaignConfig::parse_text("experiment=extract\nseed=3\n");
  CampaignConfig b = CampaignConfig::parse_text("experiment=extract\nseed=4\n");
  a.validate();
  b.validate();
  CHECK(a.digest() != b.digest());
  CampaignResult ra = run_campaign(a);
  CampaignResult rb = run_campaign(b);
  CHECK(ra.records != rb.records);
}
