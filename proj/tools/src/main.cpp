// amp: seeded, replayable experiment campaigns with JSONL records.
//
// Exit codes: 0 all verdicts passed, 2 configuration error, 3 verdict
// failure (or replay mismatch).

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "amp/campaign.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  double eta = 0.0;
  bool eta_set = false;
  int jobs = 1;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config_path, "key=value config file");
  sub->add_option("--out", o.out_dir, "output directory (default: campaigns/<experiment>)");
  sub->add_option("--seed", o.seed, "root seed")->each([&](const std::string&) { o.seed_set = true; });
  sub->add_option("--eta", o.eta, "global failure budget for estimates")
      ->each([&](const std::string&) { o.eta_set = true; });
  sub->add_option("--jobs", o.jobs, "worker threads for per-trial parallelism")
      ->check(CLI::Range(1, 256));
}

std::string resolve_out(const CommonOpts& o, const std::string& experiment) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("AMPLAB_OUT")) return std::string(env) + "/" + experiment;
  return "campaigns/" + experiment;
}

int run_one(const std::string& experiment, const CommonOpts& o) {
  amp::CampaignConfig cfg;
  if (!o.config_path.empty()) cfg = amp::CampaignConfig::parse_file(o.config_path);
  if (cfg.has("experiment") && cfg.experiment() != experiment)
    throw amp::ConfigError("config file names experiment '" + cfg.experiment() +
                           "' but subcommand is '" + experiment + "'");
  cfg.set("experiment", experiment);
  if (o.seed_set) cfg.set("seed", std::to_string(o.seed));
  if (o.eta_set) cfg.set("eta", std::to_string(o.eta));
  cfg.set("jobs", std::to_string(o.jobs));

  amp::CampaignResult res = amp::run_campaign(cfg);
  const std::string out = resolve_out(o, experiment);
  amp::write_outputs(res, out);
  std::printf("%s\n", res.summary_json.c_str());
  std::printf("wrote %s/records.jsonl (%zu records), %s/summary.json\n", out.c_str(),
              res.records.size(), out.c_str());
  std::printf("%s: %s\n", experiment.c_str(), res.pass ? "PASS" : "FAIL");
  return res.pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hardness-amplification laboratory: seeded experiment campaigns"};
  app.require_subcommand(1);

  const char* experiments[] = {"single", "multi",   "xor",    "extract",
                               "puzzle", "valiant", "commit", "reduce"};
  const char* blurbs[] = {
      "single-instance predictor extraction from a distinguisher",
      "k-instance hybrid experiments and global extraction",
      "XOR-of-predicates bound and constructive violation handling",
      "leftover-hash extraction demo with exact enumeration",
      "weakly verifiable puzzle solver extraction",
      "read-once monotone gap amplifier construction",
      "commitment composition: hiding, binding, decoder",
      "weak-protocol reduction demo with non-rewinding certificate"};

  CommonOpts opts[8];
  CLI::App* subs[8];
  for (int i = 0; i < 8; ++i) {
    subs[i] = app.add_subcommand(experiments[i], blurbs[i]);
    add_common(subs[i], opts[i]);
  }

  std::string replay_dir;
  int replay_jobs = 1;
  CLI::App* replay = app.add_subcommand("replay", "re-run a persisted campaign and compare");
  replay->add_option("dir", replay_dir, "campaign output directory")->required();
  replay->add_option("--jobs", replay_jobs, "worker threads")->check(CLI::Range(1, 256));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (replay->parsed()) {
      amp::ReplayReport rr = amp::replay_campaign(replay_dir, replay_jobs);
      if (rr.ok) {
        std::printf("replay: identical records and estimates (campaign %s)\n",
                    rr.reran_pass ? "passes" : "fails");
        return 0;
      }
      for (const std::string& m : rr.mismatches) std::fprintf(stderr, "replay: %s\n", m.c_str());
      return 3;
    }
    for (int i = 0; i < 8; ++i)
      if (subs[i]->parsed()) return run_one(experiments[i], opts[i]);
  } catch (const amp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
