#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace amp {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value configuration.  Keys are validated against a per-experiment
// whitelist; unknown keys and out-of-range values throw ConfigError before
// any output file is touched.
struct CampaignConfig {
  std::map<std::string, std::string> kv;

  // '#' comments and blank lines allowed; "key = value" per line.
  static CampaignConfig parse_text(const std::string& text);
  static CampaignConfig parse_file(const std::string& path);

  void set(const std::string& key, const std::string& value) { kv[key] = value; }
  bool has(const std::string& key) const { return kv.count(key) != 0; }

  std::string get_str(const std::string& key, const std::string& def) const;
  double get_real(const std::string& key, double def) const;
  uint64_t get_u64(const std::string& key, uint64_t def) const;

  std::string experiment() const { return get_str("experiment", ""); }
  uint64_t seed() const { return get_u64("seed", 1); }
  double eta() const { return get_real("eta", 1e-3); }
  int jobs() const { return static_cast<int>(get_u64("jobs", 1)); }

  // Throws ConfigError on unknown keys, unknown experiment or values outside
  // documented ranges.
  void validate() const;

  std::string canonical() const;  // sorted "key=value" lines
  uint64_t digest() const;        // FNV-1a of canonical()
};

struct CampaignResult {
  std::string experiment;
  bool pass = false;
  std::vector<std::string> records;  // JSONL lines, deterministic
  std::string summary_json;          // pretty-printed summary object
};

// Runs the named experiment and assembles records + summary.  Verdict
// failures are reported in the result, not thrown; only configuration
// problems throw ConfigError.
CampaignResult run_campaign(const CampaignConfig& cfg);

// Writes <dir>/records.jsonl and <dir>/summary.json, creating dir.
void write_outputs(const CampaignResult& res, const std::string& dir);

struct ReplayReport {
  bool ok = false;
  bool reran_pass = false;
  std::vector<std::string> mismatches;
};

// Re-runs the campaign persisted at dir (summary.json carries the full
// config including the seed root) and asserts bit-identical estimates,
// verdicts and records; the summary timestamp is excluded.
ReplayReport replay_campaign(const std::string& dir, int jobs);

}  // namespace amp
