#include "fsat/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fsat/error.hpp"
#include "fsat/rng.hpp"

#ifndef FSAT_VERSION
#define FSAT_VERSION "0.0.0"
#endif

namespace fsat {

namespace fs = std::filesystem;
using nlohmann::json;

std::string tool_version() { return FSAT_VERSION; }

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::ParseError, std::string("results: bad ") + what + " '" + s + "'");
  }
  return v;
}

SaturationEstimator parse_estimator(const std::string& s) {
  if (s == "ipr") return SaturationEstimator::Ipr;
  if (s == "time-average") return SaturationEstimator::TimeAverage;
  if (s == "random-state-sum") return SaturationEstimator::RandomStateSum;
  throw Error(ErrorKind::ParseError, "results: unknown estimator '" + s + "'");
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

std::string delta_file_name(std::size_t index) {
  std::ostringstream os;
  os << "delta_" << std::setw(3) << std::setfill('0') << index << ".csv";
  return os.str();
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << r.ensemble << ',' << r.dim << ',' << r.seed << ',' << shortest(r.delta) << ','
        << to_string(r.estimator) << ',' << shortest(r.f_inf_mean) << ',' << shortest(r.f_inf_stderr)
        << ',' << r.n_eigenstates << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw Error(ErrorKind::ParseError, "results: missing or unexpected header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 8) throw Error(ErrorKind::ParseError, "results: expected 8 columns in '" + line + "'");
    ResultRow r;
    r.ensemble = f[0];
    r.dim = parse_number<Index>(f[1], "N");
    r.seed = parse_number<std::uint64_t>(f[2], "seed");
    r.delta = parse_number<double>(f[3], "delta");
    r.estimator = parse_estimator(f[4]);
    r.f_inf_mean = parse_number<double>(f[5], "f_inf_mean");
    r.f_inf_stderr = parse_number<double>(f[6], "f_inf_stderr");
    r.n_eigenstates = parse_number<Index>(f[7], "n_eigenstates");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_results_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return read_results_csv(in);
}

UnitaryOperator build_map(const ExperimentConfig& config, std::uint64_t seed) {
  switch (config.ensemble) {
    case Ensemble::CUE: return sample_cue(config.dim, seed);
    case Ensemble::COE: return make_coe(sample_cue(config.dim, seed));
    case Ensemble::QKT: return kicked_top({*config.j, config.k});
    case Ensemble::QKTOdd: {
      const UnitaryOperator full = kicked_top({*config.j, config.k});
      const OddSubspace odd = odd_subspace(*config.j);
      return restrict_to_odd_subspace(full, odd);
    }
  }
  throw Error(ErrorKind::SemanticError, "build_map: unknown ensemble");
}

std::vector<Index> select_eigenstates(const ExperimentConfig& config) {
  std::vector<Index> all(static_cast<std::size_t>(config.dim));
  std::iota(all.begin(), all.end(), Index{0});
  if (config.eigenstates.all) return all;
  // Partial Fisher-Yates.
  Rng rng(config.eigenstates.seed, /*stream=*/0x4549474eULL);
  for (Index i = 0; i < config.eigenstates.count; ++i) {
    std::uniform_int_distribution<Index> pick(i, config.dim - 1);
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
  }
  all.resize(static_cast<std::size_t>(config.eigenstates.count));
  std::sort(all.begin(), all.end());
  return all;
}

SaturationCurve curve_from_rows(const std::vector<ResultRow>& rows, SaturationEstimator estimator,
                                double lambda_sq, std::optional<std::uint64_t> seed) {
  std::map<double, std::vector<double>> by_delta;
  SaturationCurve c;
  c.lambda_sq = lambda_sq;
  for (const auto& r : rows) {
    if (r.estimator != estimator || (seed && r.seed != *seed)) continue;
    by_delta[r.delta].push_back(r.f_inf_mean);
    c.ensemble = r.ensemble;
    c.dim = r.dim;
  }
  for (const auto& [d, v] : by_delta) {
    c.deltas.push_back(d);
    c.f_inf.push_back(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()));
  }
  return c;
}

namespace {

struct CellOutput {
  std::vector<ResultRow> rows;
  std::optional<CellArtifacts> artifacts;
};

CellOutput compute_cell(const ExperimentConfig& config, const UnitaryOperator& map,
                        const SpectralDecomposition& spectrum, std::uint64_t seed, double delta,
                        const std::vector<Index>& states, bool keep_artifacts) {
  const UnitaryOperator up = perturbation_unitary(config.perturbation_spec(delta));
  const SpectralDecomposition perturbed = spectral_decompose(perturbed_map(up, map));
  const OverlapMatrix ov = overlap_matrix(spectrum, perturbed);

  CellOutput out;
  const auto n_states = static_cast<Index>(states.size());
  for (SaturationEstimator est : config.estimators()) {
    std::vector<double> values;
    values.reserve(states.size());
    if (est == SaturationEstimator::Ipr) {
      for (Index m : states) values.push_back(saturation_ipr(ov, m).value);
    } else {
      for (const auto& e : time_average_all_eigenstates(ov, config.window, states)) values.push_back(e.value);
    }
    const auto [mean, se] = mean_and_stderr(values);
    out.rows.push_back({std::string(to_string(config.ensemble)), config.dim, seed, delta, est, mean, se, n_states});
  }
  if (keep_artifacts) {
    CellArtifacts a;
    a.delta = delta;
    a.series = averaged_eigenstate_fidelity(ov, config.series_length, states);
    a.ldos = ldos(ov, std::nullopt, config.bins);
    out.artifacts = std::move(a);
  }
  return out;
}

CsvProvenance provenance_for(const ExperimentConfig& config, double delta, std::uint64_t seed,
                             std::string method) {
  return {std::string(to_string(config.ensemble)), config.dim, delta, seed, std::move(method)};
}

void write_artifacts(const ExperimentConfig& config, const fs::path& dir, std::size_t delta_index,
                     std::uint64_t seed, const CellArtifacts& a) {
  fs::create_directories(dir / "series");
  fs::create_directories(dir / "ldos");
  {
    std::ofstream out(dir / "series" / delta_file_name(delta_index));
    write_series_csv(out, a.series, provenance_for(config, a.delta, seed, "spectral, eigenstate-averaged"));
    if (!out) throw Error(ErrorKind::IoError, "cannot write series table");
  }
  {
    std::ofstream out(dir / "ldos" / delta_file_name(delta_index));
    write_ldos_csv(out, a.ldos, provenance_for(config, a.delta, seed, "ldos, eigenstate-averaged"));
    if (!out) throw Error(ErrorKind::IoError, "cannot write ldos table");
  }
}

void write_manifest(const fs::path& dir, const ExperimentConfig& config, bool complete) {
  json j{{"config_hash", config.hash()},
         {"config", config.canonical_text()},
         {"tool_version", tool_version()},
         {"complete", complete},
         {"timestamp", utc_timestamp()}};
  std::ofstream out(dir / "manifest.json");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "cannot write manifest.json");
}

json fits_json(const ExperimentResult& r, const ExperimentConfig* config) {
  json fits = json::array();
  for (const auto& f : r.fits) {
    json entry = json::parse(to_json(f.fit));
    entry["name"] = f.name;
    fits.push_back(std::move(entry));
  }
  json j;
  j["provenance"] = {{"config_hash", r.config_hash},
                     {"tool_version", r.tool_version},
                     {"timestamp", r.timestamp}};
  if (config) j["provenance"]["config"] = config->canonical_text();
  j["ensemble"] = r.ensemble;
  j["N"] = r.dim;
  j["beta"] = r.beta;
  j["lambda_sq"] = r.lambda_sq;
  j["fgr_window"] = r.fgr_window ? json::array({r.fgr_window->lo, r.fgr_window->hi}) : json(nullptr);
  j["seed_constants"] = r.seed_constants;
  if (!r.seed_constants.empty()) {
    const double n = static_cast<double>(r.seed_constants.size());
    const double mean = std::accumulate(r.seed_constants.begin(), r.seed_constants.end(), 0.0) / n;
    double ss = 0.0;
    for (double c : r.seed_constants) ss += (c - mean) * (c - mean);
    j["C_mean"] = mean;
    j["C_std"] = r.seed_constants.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  j["ratio"] = r.ratio ? json(*r.ratio) : json(nullptr);
  j["floor_ratio"] = r.floor_ratio ? json(*r.floor_ratio) : json(nullptr);
  j["fits"] = std::move(fits);
  j["notes"] = r.notes;
  return j;
}

void write_outputs(const fs::path& dir, const ExperimentConfig& config, const ExperimentResult& r) {
  {
    std::ofstream out(dir / "results.csv");
    write_results_csv(out, r.rows);
    if (!out) throw Error(ErrorKind::IoError, "cannot write results.csv");
  }
  std::ofstream out(dir / "fits.json");
  out << fits_json(r, &config).dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "cannot write fits.json");
}

// Sort key: config seed order, then delta order, then estimator order.
void sort_rows(std::vector<ResultRow>& rows, const ExperimentConfig& config) {
  auto seed_rank = [&](std::uint64_t s) {
    return std::find(config.seeds.begin(), config.seeds.end(), s) - config.seeds.begin();
  };
  auto est_rank = [](SaturationEstimator e) { return static_cast<int>(e == SaturationEstimator::TimeAverage); };
  std::stable_sort(rows.begin(), rows.end(), [&](const ResultRow& a, const ResultRow& b) {
    const auto ka = std::make_tuple(seed_rank(a.seed), a.delta, est_rank(a.estimator));
    const auto kb = std::make_tuple(seed_rank(b.seed), b.delta, est_rank(b.estimator));
    return ka < kb;
  });
}

}  // namespace

void summarize(const ExperimentConfig& config, ExperimentResult& r) {
  r.ensemble = std::string(to_string(config.ensemble));
  r.dim = config.dim;
  r.beta = beta_of(config.ensemble);
  r.lambda_sq = perturbation_generator_variance(config.perturbation_spec(0.0));
  r.fits.clear();
  r.notes.clear();
  r.seed_constants.clear();
  r.seed_curves.clear();
  r.ratio.reset();
  r.floor_ratio.reset();

  const SaturationEstimator primary = config.estimator == EstimatorChoice::TimeAverage
                                          ? SaturationEstimator::TimeAverage
                                          : SaturationEstimator::Ipr;
  r.mean_curve = curve_from_rows(r.rows, primary, r.lambda_sq);
  if (r.mean_curve.deltas.empty()) return;
  r.mean_curve.ensemble = r.ensemble;
  r.mean_curve.dim = r.dim;
  for (auto s : config.seeds) r.seed_curves.push_back(curve_from_rows(r.rows, primary, r.lambda_sq, s));

  r.fgr_window = config.fit_window ? config.fit_window : fgr_window(r.mean_curve, r.beta);
  if (r.fgr_window) {
    try {
      r.fits.push_back({"power_law", fit_power_law(r.mean_curve, r.fgr_window->lo, r.fgr_window->hi)});
    } catch (const Error& e) {
      r.notes.push_back(std::string("power_law skipped: ") + e.what());
    }
    for (const auto& c : r.seed_curves) {
      try {
        r.seed_constants.push_back(pinned_constant(c, r.fgr_window->lo, r.fgr_window->hi));
      } catch (const Error& e) {
        r.notes.push_back(std::string("seed constant skipped: ") + e.what());
      }
    }
  } else {
    r.notes.push_back("no grid point satisfies the golden-rule window conditions");
  }

  r.floor_ratio = r.mean_curve.f_inf.back() / strong_perturbation_floor(r.beta, r.dim);

  for (auto& a : r.artifacts) {
    const std::string tag = "[delta=" + shortest(a.delta) + "]";
    const auto it = std::find(r.mean_curve.deltas.begin(), r.mean_curve.deltas.end(), a.delta);
    if (it != r.mean_curve.deltas.end()) {
      const double f_inf = r.mean_curve.f_inf[static_cast<std::size_t>(it - r.mean_curve.deltas.begin())];
      try {
        r.fits.push_back({"exponential_decay" + tag, fit_exponential_decay(a.series, default_fit_floor(f_inf))});
      } catch (const Error& e) {
        r.notes.push_back("exponential_decay" + tag + " skipped: " + e.what());
      }
    }
    if (a.delta > 0.0) {
      try {
        FitResult f = fit_lorentzian(a.ldos);
        a.ldos.fitted_width = f.params.at("width");
        r.fits.push_back({"lorentzian" + tag, std::move(f)});
      } catch (const Error& e) {
        r.notes.push_back("lorentzian" + tag + " skipped: " + e.what());
      }
    }
  }

  if (config.ratio_reference) {
    try {
      const auto ref_rows = read_results_csv(*config.ratio_reference);
      SaturationCurve ref = curve_from_rows(ref_rows, primary, r.lambda_sq);
      const DeltaWindow w = r.fgr_window.value_or(DeltaWindow{r.mean_curve.deltas.front(), r.mean_curve.deltas.back()});
      r.ratio = ensemble_ratio(r.mean_curve, ref, w.lo, w.hi);
    } catch (const Error& e) {
      r.notes.push_back(std::string("ratio skipped: ") + e.what());
    }
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const fs::path dir = options.output_dir.value_or(config.output_dir);
  const int workers = std::max(1, options.workers > 0 ? options.workers : config.workers);
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  ExperimentResult result;
  result.config_hash = config.hash();
  result.tool_version = tool_version();
  result.timestamp = utc_timestamp();

  // Cells already on disk (resume).
  std::map<std::pair<std::uint64_t, double>, std::vector<ResultRow>> done;
  std::map<double, CellArtifacts> done_artifacts;
  if (options.write_files) {
    if (fs::exists(dir / "manifest.json") || fs::exists(dir / "results.csv")) {
      if (!options.resume) {
        throw Error(ErrorKind::IoError, "output directory " + dir.string() +
                                            " already holds a run; pass --resume or choose another directory");
      }
      std::ifstream in(dir / "manifest.json");
      json manifest;
      try {
        in >> manifest;
      } catch (const json::exception&) {
        throw Error(ErrorKind::IoError, "cannot read manifest.json in " + dir.string());
      }
      if (manifest.value("config_hash", std::string()) != result.config_hash) {
        throw Error(ErrorKind::IoError, "refusing to resume: config hash differs from the existing run");
      }
      if (fs::exists(dir / "results.csv")) {
        for (auto& row : read_results_csv(dir / "results.csv")) done[{row.seed, row.delta}].push_back(row);
      }
      for (std::size_t i = 0; i < config.deltas.size(); ++i) {
        const fs::path sp = dir / "series" / delta_file_name(i);
        const fs::path lp = dir / "ldos" / delta_file_name(i);
        if (fs::exists(sp) && fs::exists(lp)) {
          done_artifacts[config.deltas[i]] = {config.deltas[i], read_series_csv(sp), read_ldos_csv(lp)};
        }
      }
      // A cell of the first seed needs its artifacts too.
      for (double d : config.deltas) {
        if (!done_artifacts.contains(d)) done.erase({config.seeds.front(), d});
      }
      log("resuming: " + std::to_string(done.size()) + " cells already complete");
    }
    fs::create_directories(dir);
    write_manifest(dir, config, false);
  }

  const std::vector<Index> states = select_eigenstates(config);

  struct Task {
    std::size_t seed_index;
    std::size_t delta_index;
  };
  std::vector<Task> tasks;
  std::vector<bool> seed_needed(config.seeds.size(), false);
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    for (std::size_t d = 0; d < config.deltas.size(); ++d) {
      if (!done.contains({config.seeds[s], config.deltas[d]})) {
        tasks.push_back({s, d});
        seed_needed[s] = true;
      }
    }
  }

  std::vector<std::optional<UnitaryOperator>> maps(config.seeds.size());
  std::vector<std::optional<SpectralDecomposition>> spectra(config.seeds.size());
  std::vector<std::optional<CellOutput>> outputs(tasks.size());
  std::mutex sink;
  std::exception_ptr failure;
  std::atomic<bool> abort{false};

  auto run_pool = [&](std::size_t count, auto&& job) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (!abort) {
        const std::size_t i = next++;
        if (i >= count) return;
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(sink);
          if (!failure) failure = std::current_exception();
          abort = true;
        }
      }
    };
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  };

  auto with_context = [&](std::uint64_t seed, std::optional<double> delta, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      std::ostringstream os;
      os << "seed=" << seed;
      if (delta) os << " delta=" << shortest(*delta);
      os << ": " << e.what();
      throw Error(e.kind(), os.str());
    }
  };

  run_pool(config.seeds.size(), [&](std::size_t s) {
    if (!seed_needed[s]) return;
    with_context(config.seeds[s], std::nullopt, [&] {
      maps[s].emplace(build_map(config, config.seeds[s]));
      spectra[s].emplace(spectral_decompose(*maps[s]));
    });
    std::lock_guard lock(sink);
    log("decomposed map for seed " + std::to_string(config.seeds[s]));
  });

  if (!failure) {
    run_pool(tasks.size(), [&](std::size_t i) {
      const Task t = tasks[i];
      const std::uint64_t seed = config.seeds[t.seed_index];
      const double delta = config.deltas[t.delta_index];
      CellOutput out;
      with_context(seed, delta, [&] {
        out = compute_cell(config, *maps[t.seed_index], *spectra[t.seed_index], seed, delta, states,
                           t.seed_index == 0);
      });
      std::lock_guard lock(sink);
      if (out.artifacts && options.write_files) write_artifacts(config, dir, t.delta_index, seed, *out.artifacts);
      outputs[i] = std::move(out);
      log("cell seed=" + std::to_string(seed) + " delta=" + shortest(delta) + " done");
    });
  }

  for (auto& [key, rows] : done) {
    for (auto& row : rows) result.rows.push_back(row);
  }
  std::map<double, CellArtifacts> artifacts = std::move(done_artifacts);
  for (auto& o : outputs) {
    if (!o) continue;
    for (auto& row : o->rows) result.rows.push_back(row);
    if (o->artifacts) artifacts[o->artifacts->delta] = std::move(*o->artifacts);
  }
  sort_rows(result.rows, config);
  for (auto& [d, a] : artifacts) result.artifacts.push_back(std::move(a));

  if (failure) {
    if (options.write_files) {
      std::ofstream out(dir / "results.csv");
      write_results_csv(out, result.rows);
    }
    std::rethrow_exception(failure);
  }

  summarize(config, result);
  if (options.write_files) {
    write_outputs(dir, config, result);
    write_manifest(dir, config, true);
  }
  return result;
}

FidelitySeries read_series_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  FidelitySeries s;
  s.initial_state.kind = InitialState::Kind::Eigenstate;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "n,F") throw Error(ErrorKind::ParseError, path.string() + ": expected header n,F");
      header = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 2) throw Error(ErrorKind::ParseError, path.string() + ": bad row");
    s.values.push_back(parse_number<double>(f[1], "F"));
  }
  return s;
}

LdosHistogram read_ldos_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<double> centers;
  LdosHistogram h;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "bin_center,weight") {
        throw Error(ErrorKind::ParseError, path.string() + ": expected header bin_center,weight");
      }
      header = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 2) throw Error(ErrorKind::ParseError, path.string() + ": bad row");
    centers.push_back(parse_number<double>(f[0], "bin_center"));
    h.weights.push_back(parse_number<double>(f[1], "weight"));
  }
  if (centers.size() < 2) throw Error(ErrorKind::ParseError, path.string() + ": too few bins");
  const double width = (centers.back() - centers.front()) / static_cast<double>(centers.size() - 1);
  for (double c : centers) h.bin_edges.push_back(c - 0.5 * width);
  h.bin_edges.push_back(centers.back() + 0.5 * width);
  // Tables written by this tool span [-pi, pi] exactly; undo the text round trip.
  const double pi = std::numbers::pi;
  const auto bins = static_cast<double>(centers.size());
  if (std::abs(h.bin_edges.front() + pi) < 1e-9 && std::abs(h.bin_edges.back() - pi) < 1e-9) {
    for (std::size_t k = 0; k < h.bin_edges.size(); ++k) h.bin_edges[k] = -pi + 2.0 * pi * static_cast<double>(k) / bins;
  }
  return h;
}

ExperimentResult load_result(const fs::path& results_csv) {
  ExperimentResult r;
  r.rows = read_results_csv(results_csv);
  if (r.rows.empty()) throw Error(ErrorKind::SemanticError, "result file holds no rows");
  const fs::path dir = results_csv.parent_path();
  r.ensemble = r.rows.front().ensemble;
  r.dim = r.rows.front().dim;
  r.beta = r.ensemble == "CUE" ? 2 : 1;

  SaturationEstimator primary = SaturationEstimator::Ipr;
  if (std::none_of(r.rows.begin(), r.rows.end(), [](const ResultRow& row) { return row.estimator == SaturationEstimator::Ipr; })) {
    primary = SaturationEstimator::TimeAverage;
  }

  std::map<std::string, double> widths;
  if (fs::exists(dir / "fits.json")) {
    std::ifstream in(dir / "fits.json");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ParseError, std::string("fits.json: ") + e.what());
    }
    r.beta = j.value("beta", r.beta);
    r.lambda_sq = j.value("lambda_sq", 0.0);
    if (j.contains("fgr_window") && j["fgr_window"].is_array()) {
      r.fgr_window = DeltaWindow{j["fgr_window"][0].get<double>(), j["fgr_window"][1].get<double>()};
    }
    if (j.contains("seed_constants")) r.seed_constants = j["seed_constants"].get<std::vector<double>>();
    if (j.contains("provenance")) {
      r.config_hash = j["provenance"].value("config_hash", std::string());
      r.tool_version = j["provenance"].value("tool_version", std::string());
      r.timestamp = j["provenance"].value("timestamp", std::string());
    }
    const json fit_list = j.value("fits", json::array());
    for (const auto& f : fit_list) {
      FitResult fit;
      const std::string model = f.value("model", std::string());
      fit.model = model == "lorentzian" ? FitModel::Lorentzian
                  : model == "exponential-decay" ? FitModel::ExponentialDecay
                                                 : FitModel::PowerLaw;
      const json params = f.value("params", json::object());
      for (const auto& [k, v] : params.items()) fit.params[k] = v.get<double>();
      fit.residual = f.value("residual", 0.0);
      fit.window = f.value("window", std::string());
      const std::string name = f.value("name", std::string());
      if (fit.model == FitModel::Lorentzian) widths[name] = fit.params["width"];
      r.fits.push_back({name, std::move(fit)});
    }
  }
  r.mean_curve = curve_from_rows(r.rows, primary, r.lambda_sq);

  if (fs::exists(dir / "series")) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir / "series")) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& sp : files) {
      const fs::path lp = dir / "ldos" / sp.filename();
      if (!fs::exists(lp)) continue;
      CellArtifacts a;
      a.series = read_series_csv(sp);
      a.ldos = read_ldos_csv(lp);
      // delta from the provenance header
      std::ifstream in(sp);
      std::string line;
      while (std::getline(in, line) && line.starts_with("#")) {
        if (line.starts_with("# delta=")) a.delta = parse_number<double>(line.substr(8), "delta");
      }
      const auto it = widths.find("lorentzian[delta=" + shortest(a.delta) + "]");
      if (it != widths.end()) a.ldos.fitted_width = it->second;
      r.artifacts.push_back(std::move(a));
    }
  }
  return r;
}

}  // namespace fsat
