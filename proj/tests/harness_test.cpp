#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "detlab/detcount.hpp"
#include "detlab/error.hpp"
#include "detlab/harness.hpp"
#include "test_util.hpp"

using namespace detlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_path(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("detlab_harness_" + name + ".jsonl");
  fs::remove(p);
  return p;
}

ScanRow synthetic(std::size_t x, long count) {
  ScanRow row;
  row.family = "interval";
  row.x = x;
  row.n = 2;
  row.engine = "brute";
  row.count = BigCount(count);
  return row;
}

ScanRequest interval_request(std::vector<std::size_t> sizes, std::string engine) {
  ScanRequest req;
  req.family.kind = FamilyKind::kInterval;
  req.sizes = std::move(sizes);
  req.n = 2;
  req.dmode = DMode::kZero;
  req.engine = std::move(engine);
  return req;
}

}  // namespace

TEST_CASE("scan over intervals matches brute counts") {
  const ScanResult result = run_scan(interval_request({2, 3, 4}, "conv"), nullptr);
  REQUIRE(result.rows.size() == 3);
  CHECK(result.computed == 3);
  CHECK(*result.rows[0].count == 6);
  for (const ScanRow& row : result.rows) {
    FamilySpec spec;
    spec.size = row.x;
    const GroundSet set = generate(spec, FieldSpec());
    CHECK(*row.count == count_det_brute(set, 2, FieldSpec().zero()));
    CHECK(row.d == std::optional<std::string>("0"));
    CHECK_FALSE(row.budget_hit);
  }
}

TEST_CASE("scan over a geometric progression") {
  ScanRequest req = interval_request({4}, "rowblock");
  req.family.kind = FamilyKind::kGeometricProgression;
  req.family.ratio = "2";
  const ScanResult result = run_scan(req, nullptr);
  CHECK(*result.rows[0].count == 44);
  CHECK(result.rows[0].params == "g=2");
}

TEST_CASE("sup modes report the maximizing d") {
  ScanRequest req = interval_request({2}, "brute");
  req.dmode = DMode::kSupAll;
  ScanRow all = run_scan(req, nullptr).rows[0];
  CHECK(all.d == std::optional<std::string>("0"));
  CHECK(*all.count == 6);
  req.dmode = DMode::kSupNonzero;
  ScanRow nonzero = run_scan(req, nullptr).rows[0];
  CHECK(nonzero.d == std::optional<std::string>("1"));
  CHECK(*nonzero.count == 2);
}

TEST_CASE("scan rows reproduce the named engine") {
  ScanRequest req = interval_request({3}, "rowblock");
  req.n = 3;
  req.dmode = DMode::kFixed;
  req.d = "2";
  const ScanRow row = run_scan(req, nullptr).rows[0];
  CHECK(row.d == std::optional<std::string>("2"));
  CHECK(*row.count == count_det_rowblock(detlab::testing::ints({1, 2, 3}), 3,
                                         detlab::testing::q("2")));
}

TEST_CASE("scan preconditions") {
  CHECK_THROWS_AS(run_scan(interval_request({}, "conv"), nullptr), Error);
  ScanRequest req = interval_request({2}, "conv");
  req.n = 3;
  CHECK_THROWS_AS(run_scan(req, nullptr), Error);
  CHECK_THROWS_AS(run_scan(interval_request({2}, "magic"), nullptr), Error);
  CHECK_THROWS_AS(parse_dmode("sometimes"), Error);
}

TEST_CASE("budget overrun is recorded and the scan continues") {
  ScanRequest req = interval_request({2, 5}, "brute");
  EngineOptions opts;
  opts.budget = 100;
  const ScanResult result = run_scan(req, nullptr, opts);
  REQUIRE(result.rows.size() == 2);
  CHECK_FALSE(result.rows[0].budget_hit);
  CHECK(result.rows[1].budget_hit);
  CHECK_FALSE(result.rows[1].count.has_value());
}

TEST_CASE("row json round trip") {
  ScanRow row = synthetic(7, 0);
  row.count = BigCount("123456789012345678901234567890");
  row.d = "-3/7";
  row.seed = 18446744073709551615ULL;
  row.dmode = DMode::kFixed;
  row.elapsed_ms = 1.25;
  const ScanRow back = row_from_json(row_to_json(row));
  CHECK(back.same_result(row));
  CHECK(back.elapsed_ms == 1.25);
  CHECK_THROWS_AS(row_from_json("{not json"), Error);
  CHECK_THROWS_AS(row_from_json("{\"family\":1}"), Error);
}

TEST_CASE("csv rows mirror the jsonl columns") {
  std::ostringstream out;
  write_csv_header(out);
  ScanRow row = synthetic(3, 33);
  row.params = "start=1;step=1";
  row.d = "0";
  row.dmode = DMode::kZero;
  write_csv_row(out, row);
  CHECK(out.str() ==
        "family,kind-params,seed,X,n,dmode,d,engine,count,elapsed_ms,budget_hit\n"
        "interval,start=1;step=1,0,3,2,zero,0,brute,33,0.000,false\n");
}

TEST_CASE("cache put, get, cold miss and version bump") {
  const fs::path path = fresh_path("cache");
  ScanRow row = synthetic(4, 20);
  row.d = "1";
  {
    ResultCache cache(path);
    CHECK_FALSE(cache.get(row).has_value());
    cache.put(row);
    REQUIRE(cache.get(row).has_value());
    CHECK(cache.get(row)->same_result(row));
  }
  ResultCache reopened(path);
  REQUIRE(reopened.get(row).has_value());
  CHECK(reopened.get(row)->same_result(row));

  ScanRow newer = row;
  newer.count = BigCount(21);
  reopened.put(newer);
  CHECK(*ResultCache(path).get(row)->count == 21);

  ScanRow other = row;
  other.d = "2";
  CHECK_FALSE(reopened.get(other).has_value());

  ResultCache bumped(path, "detlab-next");
  CHECK_FALSE(bumped.get(row).has_value());

  ScanRow over = synthetic(5, 0);
  over.count.reset();
  over.budget_hit = true;
  reopened.put(over);
  CHECK_FALSE(ResultCache(path).get(over).has_value());
  fs::remove(path);
}

TEST_CASE("corrupt cache lines are skipped with a warning") {
  const fs::path path = fresh_path("corrupt");
  ScanRow row = synthetic(2, 6);
  ResultCache(path).put(row);
  {
    std::ofstream out(path, std::ios::app);
    out << "{\"family\": truncated\n";
    out << "garbage\n";
  }
  ResultCache cache(path);
  CHECK(cache.warnings().size() == 2);
  CHECK(cache.get(row).has_value());
  fs::remove(path);
}

TEST_CASE("warm cache rerun recomputes nothing") {
  const fs::path path = fresh_path("warm");
  const ScanRequest req = interval_request({2, 3, 4}, "rowblock");
  ResultCache cold(path);
  const ScanResult first = run_scan(req, &cold);
  CHECK(first.computed == 3);
  ResultCache warm(path);
  const ScanResult second = run_scan(req, &warm);
  CHECK(second.computed == 0);
  CHECK(second.cache_hits == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(second.rows[i].same_result(first.rows[i]));
    CHECK(row_to_json(second.rows[i]) == row_to_json(first.rows[i]));
  }
  fs::remove(path);
}

TEST_CASE("scans are deterministic across thread counts") {
  ScanRequest req = interval_request({2, 3}, "brute");
  req.family.kind = FamilyKind::kRandom;
  req.family.seed = 99;
  req.family.lo = -5;
  req.family.hi = 5;
  req.n = 3;
  req.dmode = DMode::kSupNonzero;
  EngineOptions one;
  one.threads = 1;
  EngineOptions four;
  four.threads = 4;
  const ScanResult a = run_scan(req, nullptr, one);
  const ScanResult b = run_scan(req, nullptr, four);
  req.engine = "rowblock";
  const ScanResult c = run_scan(req, nullptr, four);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].same_result(b.rows[i]));
    CHECK(a.rows[i].count == c.rows[i].count);
    CHECK(a.rows[i].d == c.rows[i].d);
  }
}

TEST_CASE("fit_exponent") {
  const ExponentFit exact = fit_exponent({synthetic(2, 4), synthetic(4, 16), synthetic(8, 64)});
  CHECK(exact.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(exact.residual_stderr == doctest::Approx(0.0));
  CHECK(exact.points_used == 3);

  const ExponentFit cubic = fit_exponent({synthetic(3, 27), synthetic(5, 125),
                                          synthetic(7, 343), synthetic(11, 1331)});
  CHECK(std::abs(cubic.slope - 3.0) < 1e-12);
  CHECK(std::abs(cubic.intercept) < 1e-12);

  const ExponentFit skipping = fit_exponent({synthetic(1, 0), synthetic(2, 4), synthetic(4, 16)});
  CHECK(skipping.points_used == 2);
  CHECK(skipping.warnings.size() == 1);

  CHECK_THROWS_AS(fit_exponent({synthetic(2, 4)}), Error);
  CHECK_THROWS_AS(fit_exponent({synthetic(2, 4), synthetic(3, 0)}), Error);
}

TEST_CASE("thread count resolution") {
  setenv("DETLAB_THREADS", "3", 1);
  CHECK(threads_from_environment(std::nullopt) == 3);
  CHECK(threads_from_environment(5u) == 5);
  setenv("DETLAB_THREADS", "lots", 1);
  CHECK_THROWS_AS(threads_from_environment(std::nullopt), Error);
  unsetenv("DETLAB_THREADS");
  CHECK(threads_from_environment(std::nullopt) == 0);
}
