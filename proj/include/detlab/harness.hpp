#pragma once

// Experiment orchestration: family scans across set sizes, log-log exponent
// fits, an append-only result cache and JSONL / CSV row serialization.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "detlab/families.hpp"
#include "detlab/parallel.hpp"
#include "detlab/scalar.hpp"

namespace detlab {

inline constexpr const char* kArtifactVersion = "detlab-1";

enum class DMode { kFixed, kSupNonzero, kSupAll, kZero };

/// fixed | supnonzero | supall | zero
std::string dmode_name(DMode mode);
DMode parse_dmode(const std::string& text);

/// Counting engines reachable from a scan: brute, rowblock, conv (n = 2).
void check_engine(const std::string& engine, std::size_t n);

struct ScanRow {
  std::string family;  // kind name
  std::string params;  // family_params()
  std::uint64_t seed = 0;
  std::string field;   // FieldSpec::name()
  std::size_t x = 0;
  std::size_t n = 0;
  DMode dmode = DMode::kFixed;
  /// Input for kFixed / kZero, the maximizing value for the sup modes.
  /// Absent when the budget was hit before a sup was found.
  std::optional<std::string> d;
  std::string engine;
  std::optional<BigCount> count;
  double elapsed_ms = 0.0;
  bool budget_hit = false;

  /// Equality ignoring elapsed_ms.
  bool same_result(const ScanRow& other) const;
};

std::string row_to_json(const ScanRow& row);
/// Throws on malformed input.
ScanRow row_from_json(const std::string& line);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ScanRow& row);

/// Canonical key text: version, field, family, params, seed, X, n, d-mode,
/// d (fixed modes only) and engine.
std::string scan_key(const ScanRow& row, const std::string& version);
/// 16 hex digits of FNV-1a over scan_key().
std::string key_digest(const std::string& key);

/// Append-only JSONL store of ScanRows; each line also carries "key".
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path path,
                       std::string version = kArtifactVersion);

  /// Newest stored row with the same key as `probe`, if any.
  std::optional<ScanRow> get(const ScanRow& probe) const;
  /// Rows that hit the budget are not stored.
  void put(const ScanRow& row);

  const std::vector<std::string>& warnings() const { return warnings_; }
  const std::string& version() const { return version_; }

 private:
  std::filesystem::path path_;
  std::string version_;
  std::unordered_map<std::string, ScanRow> rows_;
  std::vector<std::string> warnings_;
};

struct ScanRequest {
  FamilySpec family;  // size is replaced by each entry of `sizes`
  FieldSpec field;
  std::vector<std::size_t> sizes;
  std::size_t n = 2;
  DMode dmode = DMode::kZero;
  std::string d = "0";  // used by kFixed
  std::string engine = "rowblock";
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::size_t computed = 0;
  std::size_t cache_hits = 0;
};

/// Computes a single row directly, without the cache. Budget overruns are
/// recorded in the row; other errors propagate.
ScanRow compute_row(const FamilySpec& family, const FieldSpec& field,
                    std::size_t n, DMode dmode, const std::string& d,
                    const std::string& engine, const EngineOptions& opts = {});

/// One row per size, in order. `sink` sees each row as soon as it is ready.
ScanResult run_scan(const ScanRequest& request, ResultCache* cache,
                    const EngineOptions& opts = {},
                    const std::function<void(const ScanRow&)>& sink = {});

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_stderr = 0.0;
  std::size_t points_used = 0;
  std::vector<std::string> warnings;
};

/// Least squares of log count against log X over rows with a positive
/// count. Throws when fewer than two such rows remain.
ExponentFit fit_exponent(const std::vector<ScanRow>& rows);

/// The flag if given, else DETLAB_THREADS if set, else 0 (all cores).
unsigned threads_from_environment(std::optional<unsigned> flag);

}  // namespace detlab
