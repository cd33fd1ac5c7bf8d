// Command-line front end for the counting engines and the scan harness.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "detlab/detcount.hpp"
#include "detlab/energy.hpp"
#include "detlab/error.hpp"
#include "detlab/families.hpp"
#include "detlab/harness.hpp"
#include "detlab/incidence.hpp"
#include "detlab/matrix.hpp"

using namespace detlab;
using Json = nlohmann::ordered_json;

namespace {

struct Options {
  std::string field = "rational";
  std::string set_path;
  std::string family = "interval";
  std::size_t size = 3;
  std::string sizes;
  std::size_t n = 2;
  std::size_t m = 0;
  std::optional<std::size_t> r;
  std::string d = "0";
  std::string dmode = "fixed";
  std::string engine;
  std::optional<unsigned> threads;
  std::uint64_t seed = 0;
  std::uint64_t budget = EngineOptions{}.budget;
  std::string cache;
  std::string out;
  std::string format = "jsonl";
  std::string start = "1";
  std::string step = "1";
  std::string ratio = "2";
  std::int64_t lo = 1;
  std::int64_t hi = 100;
  std::size_t k = 3;
  std::string planes;
  std::string matrix;
  std::string kind;
  std::string input;
};

class Report {
 public:
  Report(const std::string& path, std::string format) : format_(std::move(format)) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) fail_io("cannot open output file " + path);
    }
  }

  std::ostream& stream() { return file_ ? *file_ : std::cout; }

  void row(const ScanRow& r) {
    if (format_ == "csv") {
      if (!header_) write_csv_header(stream());
      write_csv_row(stream(), r);
    } else {
      stream() << row_to_json(r) << '\n';
    }
    header_ = true;
  }

  void object(const Json& j) {
    if (format_ == "csv") {
      if (!header_) {
        std::string sep;
        for (const auto& [key, value] : j.items()) {
          stream() << sep << key;
          sep = ",";
        }
        stream() << '\n';
      }
      std::string sep;
      for (const auto& [key, value] : j.items()) {
        stream() << sep << csv_cell(value);
        sep = ",";
      }
      stream() << '\n';
    } else {
      stream() << j.dump() << '\n';
    }
    header_ = true;
  }

  void finish() {
    stream().flush();
    if (!stream()) fail_io("write to output failed");
  }

 private:
  static std::string csv_cell(const Json& v) {
    std::string text;
    if (v.is_string()) {
      text = v.get<std::string>();
    } else if (v.is_array()) {
      for (const auto& e : v) text += (text.empty() ? "" : ";") + csv_cell(e);
    } else if (!v.is_null()) {
      text = v.dump();
    }
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }

  std::string format_;
  std::unique_ptr<std::ofstream> file_;
  bool header_ = false;
};

std::string big(const BigCount& c) { return c.get_str(); }

EngineOptions engine_options(const Options& o) {
  EngineOptions opts;
  opts.budget = o.budget;
  opts.threads = threads_from_environment(o.threads);
  return opts;
}

FamilySpec family_spec(const Options& o) {
  FamilySpec spec;
  if (!o.set_path.empty()) {
    spec.kind = FamilyKind::kExplicit;
    spec.path = o.set_path;
    return spec;
  }
  spec.kind = parse_family_kind(o.family);
  spec.size = o.size;
  spec.start = o.start;
  spec.step = o.step;
  spec.ratio = o.ratio;
  spec.seed = o.seed;
  spec.lo = o.lo;
  spec.hi = o.hi;
  return spec;
}

std::size_t parse_size(const std::string& text) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) fail("bad size '" + text + "'");
  return v;
}

/// "2..4,6" -> {2, 3, 4, 6}
std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      sizes.push_back(parse_size(part));
      continue;
    }
    const std::size_t lo = parse_size(part.substr(0, dots));
    const std::size_t hi = parse_size(part.substr(dots + 2));
    if (lo > hi) fail("empty size range '" + part + "'");
    for (std::size_t s = lo; s <= hi; ++s) sizes.push_back(s);
  }
  if (sizes.empty()) fail("no sizes given");
  return sizes;
}

ScanRequest scan_request(const Options& o, const FieldSpec& field,
                         std::vector<std::size_t> sizes) {
  ScanRequest req;
  req.family = family_spec(o);
  req.field = field;
  req.sizes = std::move(sizes);
  req.n = o.n;
  req.dmode = parse_dmode(o.dmode);
  req.d = o.d;
  req.engine = o.engine.empty() ? "rowblock" : o.engine;
  return req;
}

ScanResult emit_scan(const Options& o, const FieldSpec& field, std::vector<std::size_t> sizes) {
  std::unique_ptr<ResultCache> cache;
  if (!o.cache.empty()) {
    cache = std::make_unique<ResultCache>(o.cache);
    for (const auto& w : cache->warnings()) std::cerr << "warning: " << w << '\n';
  }
  Report report(o.out, o.format);
  const ScanResult result = run_scan(scan_request(o, field, std::move(sizes)), cache.get(),
                                     engine_options(o),
                                     [&](const ScanRow& row) { report.row(row); });
  report.finish();
  std::cerr << "rows: " << result.rows.size() << " computed: " << result.computed
            << " cached: " << result.cache_hits << '\n';
  for (const ScanRow& row : result.rows) {
    if (row.budget_hit) {
      std::cerr << "budget exceeded at X=" << row.x << '\n';
    }
  }
  return result;
}

void run_count(const Options& o, const FieldSpec& field) {
  const ScanResult result = emit_scan(o, field, {family_spec(o).size});
  if (result.rows.front().budget_hit) fail_budget("count exceeds the step budget");
}

void run_spectrum(const Options& o, const FieldSpec& field) {
  const GroundSet set = generate(family_spec(o), field);
  const std::string engine = o.engine.empty() ? "rowblock" : o.engine;
  check_engine(engine, o.n);
  const SpectrumHistogram h =
      engine == "conv" ? det_spectrum_conv_n2(set)
                       : det_spectrum(set, o.n,
                                      engine == "brute" ? SpectrumEngine::kBrute
                                                        : SpectrumEngine::kRowBlock,
                                      engine_options(o));
  Report report(o.out, o.format);
  for (const auto& [d, c] : h.counts) {
    report.object(Json{{"X", set.size()}, {"n", o.n}, {"d", d.to_string()}, {"count", big(c)}});
  }
  report.finish();
}

void run_rank(const Options& o, const FieldSpec& field) {
  const GroundSet set = generate(family_spec(o), field);
  const std::size_t m = o.m == 0 ? o.n : o.m;
  Report report(o.out, o.format);
  const EngineOptions opts = engine_options(o);
  for (std::size_t r = 0; r <= m; ++r) {
    if (o.r && *o.r != r) continue;
    report.object(Json{{"X", set.size()}, {"m", m}, {"n", o.n}, {"r", r},
                       {"count", big(count_rank(set, m, o.n, r, opts))}});
  }
  report.finish();
}

Matrix parse_matrix(const std::string& text, const FieldSpec& field) {
  std::vector<std::vector<Scalar>> rows;
  std::stringstream in(text);
  std::string row_text;
  while (std::getline(in, row_text, ';')) {
    std::vector<Scalar> row;
    std::stringstream cells(row_text);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(parse_scalar(cell, field));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail("--matrix is required, e.g. \"1,0;0,1\"");
  std::vector<Scalar> flat;
  for (const auto& row : rows) {
    if (row.size() != rows.size()) fail("--matrix must be square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return Matrix::from_entries(rows.size(), rows.size(), flat, field);
}

void run_energy(const Options& o, const FieldSpec& field) {
  const GroundSet set = generate(family_spec(o), field);
  const EngineOptions opts = engine_options(o);
  Json j{{"energy", o.kind}, {"X", set.size()}};
  if (o.kind == "N") {
    j["value"] = big(energy_N(set));
  } else if (o.kind == "T") {
    j["value"] = big(energy_T(set));
  } else if (o.kind == "S") {
    j["value"] = big(energy_S(set));
  } else if (o.kind == "Estar") {
    const bool brute = o.engine == "brute";
    j["engine"] = brute ? "brute" : "mu";
    j["value"] = big(brute ? energy_Estar_brute(set, opts) : energy_Estar_mu(set, opts));
  } else {
    const Matrix m = parse_matrix(o.matrix, field);
    j["k"] = m.rows();
    j["omega"] = parse_scalar(o.d, field).to_string();
    j["value"] = big(count_bilinear(m, set, set, parse_scalar(o.d, field), opts));
  }
  Report report(o.out, o.format);
  report.object(j);
  report.finish();
}

HyperplaneFamily read_planes(const std::string& path, std::size_t k, const FieldSpec& field) {
  std::ifstream in(path);
  if (!in) fail_io("cannot read planes file " + path);
  HyperplaneFamily fam(k, field);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::stringstream words(line);
    std::vector<Scalar> values;
    std::string w;
    while (words >> w) values.push_back(parse_scalar(w, field));
    if (values.empty()) continue;
    if (values.size() != k + 1) fail("plane line needs " + std::to_string(k + 1) + " values");
    Scalar offset = values.back();
    values.pop_back();
    fam.add(std::move(values), std::move(offset));
  }
  return fam;
}

void run_incidence(const Options& o, const FieldSpec& field) {
  const GroundSet set = generate(family_spec(o), field);
  const EngineOptions opts = engine_options(o);
  const Scalar d = parse_scalar(o.d, field);
  Json j{{"incidence", o.kind}, {"X", set.size()}};
  if (o.kind == "curves") {
    const CurveCounts c = curve_incidences_n3(set, opts);
    j["direct"] = big(c.direct);
    j["via_curves"] = big(c.via_curves);
  } else if (o.kind == "minors") {
    const MinorPlanes mp = planes_from_minors(set, d, opts);
    const PointGrid grid = make_grid(std::vector<GroundSet>(3, set));
    const BigCount weighted = weighted_incidences(grid, mp.family, opts);
    BigCount total = weighted;
    if (d.is_zero()) total += BigCount(static_cast<unsigned long>(mp.zero_bucket)) * grid.size();
    j["d"] = d.to_string();
    j["planes"] = mp.family.size();
    j["zero_bucket"] = mp.zero_bucket;
    j["weighted_incidences"] = big(weighted);
    j["det_count"] = big(total);
  } else {
    const std::size_t k = o.planes.empty() ? 3 : o.k;
    if (k < 1 || k > 4) fail("--k must be in 1..4");
    const PointGrid grid = make_grid(std::vector<GroundSet>(k, set));
    const HyperplaneFamily fam =
        o.planes.empty() ? planes_from_minors(set, d, opts).family
                         : read_planes(o.planes, k, field);
    j["k"] = k;
    j["planes"] = fam.size();
    j["incidences"] = big(incidences_brute(grid, fam, opts));
    j["weighted"] = big(weighted_incidences(grid, fam, opts));
    if (o.kind == "classify") {
      const std::size_t r = o.r ? *o.r : choose_r(grid, fam);
      const CellDecomposition cells = classify_incidences(grid, fam, r, opts);
      std::size_t worst_hit = 0;
      for (const Hyperplane& p : fam.planes()) worst_hit = std::max(worst_hit, cells_hit(p, cells));
      std::size_t bound = k;
      for (std::size_t i = 0; i + 1 < k; ++i) bound *= r;
      j["r"] = r;
      j["cells"] = cells.cell_count();
      j["sparse"] = big(cells.sparse);
      j["spanning"] = big(cells.spanning);
      j["degenerate"] = big(cells.degenerate);
      j["max_cells_hit"] = worst_hit;
      j["cells_hit_bound"] = bound;
      j["worst_flat_mass"] = cells.worst_flat_mass;
      j["worst_plane_mass"] = cells.worst_plane_mass;
      j["planes_skipped"] = cells.planes_skipped;
    }
  }
  Report report(o.out, o.format);
  report.object(j);
  report.finish();
}

void run_fit(const Options& o) {
  std::ifstream file;
  if (!o.input.empty()) {
    file.open(o.input);
    if (!file) fail_io("cannot read rows file " + o.input);
  }
  std::istream& in = o.input.empty() ? std::cin : file;
  std::vector<ScanRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(row_from_json(line));
  }
  const ExponentFit fit = fit_exponent(rows);
  Json j{{"slope", fit.slope},
         {"intercept", fit.intercept},
         {"residual_stderr", fit.residual_stderr},
         {"points_used", fit.points_used},
         {"warnings", fit.warnings}};
  Report report(o.out, o.format);
  report.object(j);
  report.finish();
}

void add_shared(CLI::App* sub, Options& o) {
  sub->add_option("--field", o.field, "rational | fp:<p>");
  sub->add_option("--set", o.set_path, "ground-set file, one scalar per line");
  sub->add_option("--family", o.family, "interval | ap | gp | random | explicit");
  sub->add_option("--size", o.size, "ground-set size");
  sub->add_option("--start", o.start, "ap start");
  sub->add_option("--step", o.step, "ap step");
  sub->add_option("--ratio", o.ratio, "gp ratio");
  sub->add_option("--lo", o.lo, "random family lower bound");
  sub->add_option("--hi", o.hi, "random family upper bound");
  sub->add_option("--seed", o.seed, "random family seed");
  sub->add_option("--n", o.n, "matrix dimension");
  sub->add_option("--d", o.d, "determinant (or omega for bilinear)");
  sub->add_option("--engine", o.engine, "brute | rowblock | conv");
  sub->add_option("--threads", o.threads, "worker threads (overrides DETLAB_THREADS)");
  sub->add_option("--budget", o.budget, "maximum enumeration steps");
  sub->add_option("--out", o.out, "output file (default stdout)");
  sub->add_option("--format", o.format, "jsonl | csv")->check(CLI::IsMember({"jsonl", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact determinant, energy and incidence counts over finite scalar sets"};
  app.require_subcommand(1);
  Options o;

  CLI::App* count = app.add_subcommand("count", "number of n x n matrices with a given determinant");
  add_shared(count, o);
  count->add_option("--dmode", o.dmode, "fixed | zero | supnonzero | supall");
  count->add_option("--cache", o.cache, "result cache file");

  CLI::App* spectrum = app.add_subcommand("spectrum", "full determinant spectrum");
  add_shared(spectrum, o);

  CLI::App* rank = app.add_subcommand("rank", "counts of m x n matrices by rank");
  add_shared(rank, o);
  rank->add_option("--m", o.m, "row count (default n)");
  rank->add_option("--r", o.r, "single rank to report");

  CLI::App* energy = app.add_subcommand("energy", "additive energies");
  add_shared(energy, o);
  energy->add_option("kind", o.kind, "N | T | S | Estar | bilinear")
      ->required()
      ->check(CLI::IsMember({"N", "T", "S", "Estar", "bilinear"}));
  energy->add_option("--matrix", o.matrix, "bilinear form, rows separated by ';'");

  CLI::App* incidence = app.add_subcommand("incidence", "point-hyperplane incidences on X^k");
  add_shared(incidence, o);
  incidence->add_option("kind", o.kind, "brute | classify | minors | curves")
      ->required()
      ->check(CLI::IsMember({"brute", "classify", "minors", "curves"}));
  incidence->add_option("--k", o.k, "grid dimension when --planes is given");
  incidence->add_option("--planes", o.planes, "planes file: a1 .. ak b per line");
  incidence->add_option("--r", o.r, "cells per axis (default chosen from the sizes)");

  CLI::App* scan = app.add_subcommand("scan", "family scan across set sizes");
  add_shared(scan, o);
  scan->add_option("--sizes", o.sizes, "e.g. 2..5 or 4,6,8")->required();
  scan->add_option("--dmode", o.dmode, "fixed | zero | supnonzero | supall");
  scan->add_option("--cache", o.cache, "result cache file");

  CLI::App* fit = app.add_subcommand("fit", "log-log exponent fit of scan rows");
  fit->add_option("rows", o.input, "JSONL rows file (default stdin)");
  fit->add_option("--out", o.out, "output file (default stdout)");
  fit->add_option("--format", o.format, "jsonl | csv")->check(CLI::IsMember({"jsonl", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const FieldSpec field = FieldSpec::parse(o.field);
    if (count->parsed()) {
      run_count(o, field);
    } else if (spectrum->parsed()) {
      run_spectrum(o, field);
    } else if (rank->parsed()) {
      run_rank(o, field);
    } else if (energy->parsed()) {
      run_energy(o, field);
    } else if (incidence->parsed()) {
      run_incidence(o, field);
    } else if (scan->parsed()) {
      emit_scan(o, field, parse_sizes(o.sizes));
    } else if (fit->parsed()) {
      run_fit(o);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::kPrecondition: return 2;
      case ErrorKind::kBudget: return 3;
      case ErrorKind::kIo: return 4;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
