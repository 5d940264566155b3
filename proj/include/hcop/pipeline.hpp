#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace hcop {

inline constexpr const char* kToolVersion = "hcop 1.0.0";

/// Full pipeline configuration.  Parsed from TOML-style `key = value` text;
/// every field has an embedded default so an empty config is valid.
struct PipelineConfig {
  int truncation = 12;           // series truncation N
  int bits = 256;                // angle precision B
  double delta = 1e-3;           // level-set tolerance
  std::int64_t resolution = 1 << 20;  // cover scan resolution
  int depth = 8;                 // tree depth d
  int quad_terms = 2;            // psi truncation inside quadratures
  int mesh_levels = 40;          // dyadic grading levels per half-gap
  double cell_cap_scale = 1.0;   // multiplies the frequency-derived cell cap
  int m = 64;                    // eigenvalue-parameter count
  int lambda_checks = 32;        // identity sample count
  int orbit_steps = 20000;
  double orbit_eps = 0.05;
  int n_seeds = 5;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = "out";

  /// Throws ConfigInvalid unless 9N + 53 <= B, delta > 8^{1-N}/7, m <= 2^d
  /// (plus basic range checks).
  void validate() const;
};

/// Parses `key = value` lines (# comments, [section] headers ignored);
/// unknown keys are rejected.  Starts from the defaults.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config_file(const std::string& path);
std::string print_config(const PipelineConfig& c);

/// FNV-1a 64-bit content hash, hex-encoded.
std::string content_hash(const std::string& bytes);
std::string file_hash(const std::string& path);

struct StageArtifact {
  std::string path;  // relative to out_dir
  std::string hash;
};

struct StageRecord {
  std::string name;
  std::string status;  // "ok", "cached", "failed", "not run"
  std::string cache_key;
  double wall_time_s = 0.0;
  bool checks_pass = true;
  std::vector<StageArtifact> artifacts;
  std::string error;
};

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_hash;
  std::vector<StageRecord> stages;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

/// Pipeline outcome folded into a process exit code:
/// 0 = all checks pass, 2 = checks ran with failures,
/// 3 = hard checks pass but a dynamics trend is flagged.
struct PipelineResult {
  RunManifest manifest;
  bool checks_pass = true;
  bool trends_pass = true;
  // 0 = all checks pass, 1 = a stage aborted with an execution error,
  // 2 = checks ran and failed, 3 = hard checks pass but a trend is flagged.
  int exit_code() const {
    for (const StageRecord& s : manifest.stages) {
      if (s.status == "failed") return 1;
    }
    return checks_pass ? (trends_pass ? 0 : 3) : 2;
  }
};

/// Runs stages in dependency order (belov-check, build-cantor,
/// verify-identities, build-model, decompose, orbit), stopping after
/// `through` when non-empty.  Stages whose cache key matches the manifest on
/// disk and whose artifacts still hash-match are reused.  The manifest is
/// written to <out_dir>/manifest.json regardless of failures.
PipelineResult run_pipeline(const PipelineConfig& config,
                            const std::string& through = "");

/// Renders <out_dir>/report.md from the manifest and per-stage artifacts;
/// stages without artifacts are listed as gaps.
std::string emit_report(const PipelineConfig& config,
                        const RunManifest& manifest);

std::vector<std::string> pipeline_stage_names();

}  // namespace hcop
