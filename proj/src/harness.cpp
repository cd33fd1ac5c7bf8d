#include "detlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "detlab/detcount.hpp"
#include "detlab/error.hpp"

namespace detlab {

namespace {

using Json = nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

std::string set_digest(const GroundSet& set) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Scalar& s : set.elements()) h = fnv1a(s.encode(), h);
  return hex64(h);
}

std::string row_params(const FamilySpec& spec, const GroundSet& set) {
  std::string params = family_params(spec);
  if (spec.kind == FamilyKind::kExplicit) params += ";digest=" + set_digest(set);
  return params;
}

bool fixed_d(DMode mode) { return mode == DMode::kFixed || mode == DMode::kZero; }

SpectrumHistogram spectrum_with(const GroundSet& set, std::size_t n,
                                const std::string& engine,
                                const EngineOptions& opts) {
  if (engine == "conv") return det_spectrum_conv_n2(set);
  return det_spectrum(set, n,
                      engine == "brute" ? SpectrumEngine::kBrute : SpectrumEngine::kRowBlock,
                      opts);
}

BigCount count_with(const GroundSet& set, std::size_t n, const Scalar& d,
                    const std::string& engine, const EngineOptions& opts) {
  if (engine == "conv") return count_det_conv_n2(set, d);
  if (engine == "brute") return count_det_brute(set, n, d, opts);
  return count_det_rowblock(set, n, d, opts);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double log_count(const BigCount& c) {
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, c.get_mpz_t());
  return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
}

}  // namespace

std::string dmode_name(DMode mode) {
  switch (mode) {
    case DMode::kFixed: return "fixed";
    case DMode::kSupNonzero: return "supnonzero";
    case DMode::kSupAll: return "supall";
    case DMode::kZero: return "zero";
  }
  return "fixed";
}

DMode parse_dmode(const std::string& text) {
  if (text == "fixed") return DMode::kFixed;
  if (text == "supnonzero") return DMode::kSupNonzero;
  if (text == "supall") return DMode::kSupAll;
  if (text == "zero") return DMode::kZero;
  fail("unknown d-mode '" + text + "' (fixed|supnonzero|supall|zero)");
}

void check_engine(const std::string& engine, std::size_t n) {
  if (n == 0) fail("n must be at least 1");
  if (engine == "brute" || engine == "rowblock") return;
  if (engine == "conv") {
    if (n != 2) fail("conv engine requires n = 2");
    return;
  }
  fail("unknown engine '" + engine + "' (brute|rowblock|conv)");
}

bool ScanRow::same_result(const ScanRow& o) const {
  return family == o.family && params == o.params && seed == o.seed &&
         field == o.field && x == o.x && n == o.n && dmode == o.dmode &&
         d == o.d && engine == o.engine && count == o.count &&
         budget_hit == o.budget_hit;
}

namespace {

Json row_json(const ScanRow& row) {
  Json j;
  j["family"] = row.family;
  j["params"] = row.params;
  j["seed"] = row.seed;
  j["field"] = row.field;
  j["X"] = row.x;
  j["n"] = row.n;
  j["dmode"] = dmode_name(row.dmode);
  j["d"] = row.d ? Json(*row.d) : Json(nullptr);
  j["engine"] = row.engine;
  j["count"] = row.count ? Json(row.count->get_str()) : Json(nullptr);
  j["elapsed_ms"] = row.elapsed_ms;
  j["budget_hit"] = row.budget_hit;
  return j;
}

ScanRow row_of_json(const Json& j) {
  ScanRow row;
  row.family = j.at("family").get<std::string>();
  row.params = j.at("params").get<std::string>();
  row.seed = j.at("seed").get<std::uint64_t>();
  row.field = j.at("field").get<std::string>();
  row.x = j.at("X").get<std::size_t>();
  row.n = j.at("n").get<std::size_t>();
  row.dmode = parse_dmode(j.at("dmode").get<std::string>());
  if (!j.at("d").is_null()) row.d = j.at("d").get<std::string>();
  row.engine = j.at("engine").get<std::string>();
  if (!j.at("count").is_null()) {
    const std::string text = j.at("count").get<std::string>();
    BigCount c;
    if (text.empty() || c.set_str(text, 10) != 0 || c < 0) fail("bad count '" + text + "'");
    row.count = c;
  }
  row.elapsed_ms = j.at("elapsed_ms").get<double>();
  row.budget_hit = j.at("budget_hit").get<bool>();
  if (!row.budget_hit && !row.count) fail("row without count or budget flag");
  return row;
}

}  // namespace

std::string row_to_json(const ScanRow& row) { return row_json(row).dump(); }

ScanRow row_from_json(const std::string& line) {
  try {
    return row_of_json(Json::parse(line));
  } catch (const Json::exception& e) {
    fail(std::string("malformed row: ") + e.what());
  }
}

void write_csv_header(std::ostream& out) {
  out << "family,kind-params,seed,X,n,dmode,d,engine,count,elapsed_ms,budget_hit\n";
}

void write_csv_row(std::ostream& out, const ScanRow& row) {
  std::ostringstream elapsed;
  elapsed << std::fixed << std::setprecision(3) << row.elapsed_ms;
  out << csv_field(row.family) << ',' << csv_field(row.params) << ',' << row.seed
      << ',' << row.x << ',' << row.n << ',' << dmode_name(row.dmode) << ','
      << csv_field(row.d.value_or("")) << ',' << csv_field(row.engine) << ','
      << (row.count ? row.count->get_str() : "") << ',' << elapsed.str() << ','
      << (row.budget_hit ? "true" : "false") << '\n';
}

std::string scan_key(const ScanRow& row, const std::string& version) {
  std::string key = version;
  for (const std::string& part :
       {row.field, row.family, row.params, std::to_string(row.seed),
        std::to_string(row.x), std::to_string(row.n), dmode_name(row.dmode),
        fixed_d(row.dmode) ? row.d.value_or("") : std::string(), row.engine}) {
    key += '|';
    key += part;
  }
  return key;
}

std::string key_digest(const std::string& key) { return hex64(fnv1a(key)); }

ResultCache::ResultCache(std::filesystem::path path, std::string version)
    : path_(std::move(path)), version_(std::move(version)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      ScanRow row = row_of_json(j);
      const std::string digest = j.at("key").get<std::string>();
      if (digest != key_digest(scan_key(row, version_))) continue;
      rows_.insert_or_assign(digest, std::move(row));
    } catch (const std::exception&) {
      warnings_.push_back(path_.string() + ":" + std::to_string(line_no) +
                          ": skipped corrupt cache line");
    }
  }
}

std::optional<ScanRow> ResultCache::get(const ScanRow& probe) const {
  const auto it = rows_.find(key_digest(scan_key(probe, version_)));
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

void ResultCache::put(const ScanRow& row) {
  if (row.budget_hit) return;
  const std::string digest = key_digest(scan_key(row, version_));
  Json j = row_json(row);
  j["key"] = digest;
  const std::string line = j.dump() + "\n";
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) fail_io("cannot open cache file " + path_.string());
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.flush();
  if (!out) fail_io("cannot write cache file " + path_.string());
  rows_.insert_or_assign(digest, row);
}

namespace {

ScanRow row_template(const FamilySpec& family, const GroundSet& set,
                     const FieldSpec& field, std::size_t n, DMode dmode,
                     const std::string& d, const std::string& engine) {
  ScanRow row;
  row.family = family_kind_name(family.kind);
  row.params = row_params(family, set);
  row.seed = family.kind == FamilyKind::kRandom ? family.seed : 0;
  row.field = field.name();
  row.x = set.size();
  row.n = n;
  row.dmode = dmode;
  if (dmode == DMode::kFixed) row.d = parse_scalar(d, field).to_string();
  if (dmode == DMode::kZero) row.d = "0";
  row.engine = engine;
  return row;
}

void fill_row(ScanRow& row, const GroundSet& set, const EngineOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if (fixed_d(row.dmode)) {
      row.count = count_with(set, row.n, parse_scalar(*row.d, set.field()),
                             row.engine, opts);
    } else {
      const auto [d, c] = dsup(spectrum_with(set, row.n, row.engine, opts),
                               row.dmode == DMode::kSupNonzero);
      row.d = d.to_string();
      row.count = c;
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kBudget) throw;
    row.budget_hit = true;
    row.count.reset();
    if (!fixed_d(row.dmode)) row.d.reset();
  }
  row.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ScanRow compute_row(const FamilySpec& family, const FieldSpec& field,
                    std::size_t n, DMode dmode, const std::string& d,
                    const std::string& engine, const EngineOptions& opts) {
  check_engine(engine, n);
  const GroundSet set = generate(family, field);
  ScanRow row = row_template(family, set, field, n, dmode, d, engine);
  fill_row(row, set, opts);
  return row;
}

ScanResult run_scan(const ScanRequest& request, ResultCache* cache,
                    const EngineOptions& opts,
                    const std::function<void(const ScanRow&)>& sink) {
  if (request.sizes.empty()) fail("scan needs at least one size");
  check_engine(request.engine, request.n);
  if (request.family.kind == FamilyKind::kExplicit && request.sizes.size() > 1) {
    fail("explicit family takes its size from the file; give a single size");
  }
  ScanResult result;
  for (std::size_t size : request.sizes) {
    FamilySpec spec = request.family;
    spec.size = size;
    const GroundSet set = generate(spec, request.field);
    ScanRow row = row_template(spec, set, request.field, request.n,
                               request.dmode, request.d, request.engine);
    std::optional<ScanRow> hit = cache ? cache->get(row) : std::nullopt;
    if (hit) {
      row = std::move(*hit);
      ++result.cache_hits;
    } else {
      fill_row(row, set, opts);
      ++result.computed;
      if (cache) cache->put(row);
    }
    if (sink) sink(row);
    result.rows.push_back(std::move(row));
  }
  return result;
}

ExponentFit fit_exponent(const std::vector<ScanRow>& rows) {
  ExponentFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const ScanRow& row : rows) {
    if (!row.count) {
      fit.warnings.push_back("X=" + std::to_string(row.x) + ": no count (budget hit)");
      continue;
    }
    if (*row.count == 0 || row.x == 0) {
      fit.warnings.push_back("X=" + std::to_string(row.x) + ": zero count excluded");
      continue;
    }
    xs.push_back(std::log(static_cast<double>(row.x)));
    ys.push_back(log_count(*row.count));
  }
  if (xs.size() < 2) fail("exponent fit needs at least two rows with positive counts");
  const double m = static_cast<double>(xs.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) fail("exponent fit needs at least two distinct sizes");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssr += r * r;
  }
  fit.residual_stderr = xs.size() > 2 ? std::sqrt(ssr / (m - 2)) : 0.0;
  fit.points_used = xs.size();
  return fit;
}

unsigned threads_from_environment(std::optional<unsigned> flag) {
  if (flag) return *flag;
  const char* env = std::getenv("DETLAB_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v > 4096) fail(std::string("bad DETLAB_THREADS value '") + env + "'");
  return static_cast<unsigned>(v);
}

}  // namespace detlab
