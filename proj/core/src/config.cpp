#include "fsat/config.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "fsat/error.hpp"

namespace fsat {

std::string_view to_string(Ensemble e) noexcept {
  switch (e) {
    case Ensemble::CUE: return "CUE";
    case Ensemble::COE: return "COE";
    case Ensemble::QKT: return "QKT";
    case Ensemble::QKTOdd: return "QKT-oe";
  }
  return "unknown";
}

int beta_of(Ensemble e) noexcept { return e == Ensemble::CUE ? 2 : 1; }

std::string_view to_string(EstimatorChoice e) noexcept {
  switch (e) {
    case EstimatorChoice::Ipr: return "ipr";
    case EstimatorChoice::TimeAverage: return "time-average";
    case EstimatorChoice::Both: return "both";
  }
  return "unknown";
}

Index odd_subspace_dim(Spin j) noexcept {
  if (!j.is_integer()) return 0;
  // Basis states |j, m> with odd m pick up exp(-i pi m) = -1.
  const int jj = j.twice() / 2;
  Index count = 0;
  for (int m = -jj; m <= jj; ++m) count += (m % 2 != 0) ? 1 : 0;
  return count;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

[[noreturn]] void parse_error(int line, std::string_view field, std::string_view what) {
  std::ostringstream os;
  os << "line " << line << ", field '" << field << "': " << what;
  throw Error(ErrorKind::ParseError, os.str());
}

[[noreturn]] void semantic_error(std::string_view what) {
  throw Error(ErrorKind::SemanticError, std::string(what));
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const Entry& e, std::string_view field, std::string_view token) {
  const std::string t = trim(token);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
    parse_error(e.line, field, "expected a real number, got '" + t + "'");
  }
  return v;
}

std::uint64_t parse_uint(const Entry& e, std::string_view field, std::string_view token) {
  const std::string t = trim(token);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    parse_error(e.line, field, "expected a non-negative integer, got '" + t + "'");
  }
  return v;
}

std::vector<std::string> parse_list(const Entry& e, std::string_view field) {
  const std::string& v = e.value;
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
    parse_error(e.line, field, "expected a list like [a, b, c]");
  }
  std::vector<std::string> items;
  const std::string inner = v.substr(1, v.size() - 2);
  if (trim(inner).empty()) return items;
  std::size_t pos = 0;
  while (true) {
    const auto comma = inner.find(',', pos);
    items.push_back(trim(inner.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
    if (items.back().empty()) parse_error(e.line, field, "empty list element");
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return items;
}

std::map<std::string, Entry> tokenize(std::string_view text) {
  static const std::set<std::string> known{
      "ensemble", "dim",     "j",           "k",           "perturbation", "deltas",
      "seeds",    "eigenstates", "window",  "estimator",   "bins",         "output_dir",
      "fit_window", "series_length", "ratio_reference", "workers"};
  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) parse_error(line, body, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!known.contains(key)) parse_error(line, key, "unknown field");
    if (value.empty()) parse_error(line, key, "missing value");
    if (entries.contains(key)) parse_error(line, key, "duplicate field");
    entries.emplace(key, Entry{value, line});
  }
  return entries;
}

bool is_power_of_two(Index n) { return n > 0 && std::has_single_bit(static_cast<std::uint64_t>(n)); }

}  // namespace

ExperimentConfig validate_config(std::string_view text) {
  const auto entries = tokenize(text);
  auto find = [&](const std::string& key) -> const Entry* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  ExperimentConfig c;

  const Entry* ens = find("ensemble");
  if (!ens) semantic_error("field 'ensemble' is required");
  if (ens->value == "CUE") c.ensemble = Ensemble::CUE;
  else if (ens->value == "COE") c.ensemble = Ensemble::COE;
  else if (ens->value == "QKT") c.ensemble = Ensemble::QKT;
  else if (ens->value == "QKT-oe") c.ensemble = Ensemble::QKTOdd;
  else parse_error(ens->line, "ensemble", "expected CUE, COE, QKT or QKT-oe");

  std::optional<Index> dim;
  if (const Entry* e = find("dim")) {
    const auto v = parse_uint(*e, "dim", e->value);
    if (v < 2 || v > 4096) parse_error(e->line, "dim", "must lie in [2, 4096]");
    dim = static_cast<Index>(v);
  }
  if (const Entry* e = find("j")) {
    try {
      c.j = Spin::from_value(parse_real(*e, "j", e->value));
    } catch (const Error& err) {
      parse_error(e->line, "j", err.what());
    }
  }
  if (const Entry* e = find("k")) c.k = parse_real(*e, "k", e->value);

  const bool kicked = c.ensemble == Ensemble::QKT || c.ensemble == Ensemble::QKTOdd;
  c.perturbation = c.ensemble == Ensemble::QKT ? PerturbationForm::SpinJz : PerturbationForm::QubitCollectiveZ;
  if (const Entry* e = find("perturbation")) {
    if (e->value == "qubit") c.perturbation = PerturbationForm::QubitCollectiveZ;
    else if (e->value == "spin") c.perturbation = PerturbationForm::SpinJz;
    else parse_error(e->line, "perturbation", "expected 'qubit' or 'spin'");
  }

  switch (c.ensemble) {
    case Ensemble::CUE:
    case Ensemble::COE:
      if (!dim) semantic_error("field 'dim' is required for CUE and COE");
      if (c.j) semantic_error("field 'j' only applies to the kicked top");
      c.dim = *dim;
      break;
    case Ensemble::QKT:
      if (!dim && !c.j) semantic_error("QKT needs 'dim' or 'j'");
      if (!c.j) c.j = Spin::from_dim(*dim);
      if (dim && c.j->dim() != *dim) semantic_error("QKT: dim must equal 2j + 1");
      c.dim = c.j->dim();
      break;
    case Ensemble::QKTOdd:
      if (!dim && !c.j) semantic_error("QKT-oe needs 'dim' or 'j'");
      // The odd subspace is quoted as having dimension j.
      if (!c.j) c.j = Spin::from_twice(static_cast<int>(2 * *dim));
      c.dim = odd_subspace_dim(*c.j);
      if (c.dim == 0) semantic_error("QKT-oe: half-integer j has no subspace odd under the pi rotation");
      if (dim && c.dim != *dim) {
        std::ostringstream os;
        os << "QKT-oe: odd subspace of j = " << c.j->value() << " has dimension " << c.dim
           << ", not " << *dim;
        semantic_error(os.str());
      }
      if (c.perturbation == PerturbationForm::SpinJz) {
        semantic_error("QKT-oe: J_z maps the odd subspace onto the even one; use perturbation = qubit");
      }
      break;
  }
  if (!kicked && find("k")) semantic_error("field 'k' only applies to the kicked top");
  if (c.perturbation == PerturbationForm::QubitCollectiveZ && !is_power_of_two(c.dim)) {
    std::ostringstream os;
    os << "qubit perturbation needs a power-of-two dimension, got " << c.dim;
    semantic_error(os.str());
  }

  const Entry* deltas = find("deltas");
  if (!deltas) semantic_error("field 'deltas' is required");
  for (const auto& t : parse_list(*deltas, "deltas")) c.deltas.push_back(parse_real(*deltas, "deltas", t));
  if (c.deltas.empty()) semantic_error("'deltas' must not be empty");
  for (std::size_t i = 0; i < c.deltas.size(); ++i) {
    if (c.deltas[i] < 0.0) semantic_error("'deltas' must be non-negative");
    if (i > 0 && !(c.deltas[i] > c.deltas[i - 1])) semantic_error("'deltas' must be strictly increasing");
  }

  const Entry* seeds = find("seeds");
  if (!seeds) semantic_error("field 'seeds' is required");
  for (const auto& t : parse_list(*seeds, "seeds")) c.seeds.push_back(parse_uint(*seeds, "seeds", t));
  if (c.seeds.empty()) semantic_error("at least one seed is required");
  if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
    semantic_error("'seeds' must not repeat");
  }

  if (const Entry* e = find("eigenstates")) {
    if (e->value == "all") {
      c.eigenstates.all = true;
    } else if (e->value.starts_with("sample(") && e->value.back() == ')') {
      const std::string inner = e->value.substr(7, e->value.size() - 8);
      const auto comma = inner.find(',');
      if (comma == std::string::npos) parse_error(e->line, "eigenstates", "expected sample(count, seed)");
      c.eigenstates.all = false;
      c.eigenstates.count = static_cast<Index>(parse_uint(*e, "eigenstates", inner.substr(0, comma)));
      c.eigenstates.seed = parse_uint(*e, "eigenstates", inner.substr(comma + 1));
      if (c.eigenstates.count < 1 || c.eigenstates.count > c.dim) {
        semantic_error("eigenstate sample size must lie in [1, dim]");
      }
    } else {
      parse_error(e->line, "eigenstates", "expected 'all' or sample(count, seed)");
    }
  }

  if (const Entry* e = find("window")) {
    const auto items = parse_list(*e, "window");
    if (items.size() != 2) parse_error(e->line, "window", "expected [start, count]");
    c.window.start = static_cast<Index>(parse_uint(*e, "window", items[0]));
    c.window.count = static_cast<Index>(parse_uint(*e, "window", items[1]));
    if (c.window.count < 1) semantic_error("window count must be positive");
  }

  if (const Entry* e = find("estimator")) {
    if (e->value == "ipr") c.estimator = EstimatorChoice::Ipr;
    else if (e->value == "time-average") c.estimator = EstimatorChoice::TimeAverage;
    else if (e->value == "both") c.estimator = EstimatorChoice::Both;
    else parse_error(e->line, "estimator", "expected ipr, time-average or both");
  }

  if (const Entry* e = find("bins")) {
    c.bins = static_cast<int>(parse_uint(*e, "bins", e->value));
    if (c.bins < 8) semantic_error("'bins' must be at least 8");
  }
  if (const Entry* e = find("output_dir")) c.output_dir = e->value;
  if (const Entry* e = find("fit_window")) {
    const auto items = parse_list(*e, "fit_window");
    if (items.size() != 2) parse_error(e->line, "fit_window", "expected [delta_min, delta_max]");
    DeltaWindow w{parse_real(*e, "fit_window", items[0]), parse_real(*e, "fit_window", items[1])};
    if (!(w.lo < w.hi)) semantic_error("fit_window must satisfy delta_min < delta_max");
    c.fit_window = w;
  }
  if (const Entry* e = find("series_length")) {
    c.series_length = static_cast<Index>(parse_uint(*e, "series_length", e->value));
    if (c.series_length < 1) semantic_error("'series_length' must be positive");
  }
  if (const Entry* e = find("ratio_reference")) c.ratio_reference = e->value;
  if (const Entry* e = find("workers")) {
    c.workers = static_cast<int>(parse_uint(*e, "workers", e->value));
    if (c.workers < 1) semantic_error("'workers' must be positive");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return validate_config(ss.str());
}

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <class Seq, class F>
std::string list_text(const Seq& items, F&& fmt) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + fmt(items[i]);
  return out + "]";
}

}  // namespace

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream os;
  os << "ensemble = " << to_string(ensemble) << "\n";
  os << "dim = " << dim << "\n";
  if (j) os << "j = " << shortest(j->value()) << "\n";
  if (ensemble == Ensemble::QKT || ensemble == Ensemble::QKTOdd) os << "k = " << shortest(k) << "\n";
  os << "perturbation = " << (perturbation == PerturbationForm::SpinJz ? "spin" : "qubit") << "\n";
  os << "deltas = " << list_text(deltas, shortest) << "\n";
  os << "seeds = " << list_text(seeds, [](std::uint64_t v) { return std::to_string(v); }) << "\n";
  os << "eigenstates = ";
  if (eigenstates.all) os << "all";
  else os << "sample(" << eigenstates.count << ", " << eigenstates.seed << ")";
  os << "\nwindow = [" << window.start << ", " << window.count << "]\n";
  os << "estimator = " << to_string(estimator) << "\n";
  os << "bins = " << bins << "\n";
  if (fit_window) os << "fit_window = [" << shortest(fit_window->lo) << ", " << shortest(fit_window->hi) << "]\n";
  os << "series_length = " << series_length << "\n";
  if (ratio_reference) os << "ratio_reference = " << ratio_reference->string() << "\n";
  return os.str();
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical_text()); }

PerturbationSpec ExperimentConfig::perturbation_spec(double delta) const {
  if (perturbation == PerturbationForm::SpinJz) return PerturbationSpec::spin(Spin::from_dim(dim), delta);
  return PerturbationSpec::qubit(std::countr_zero(static_cast<std::uint64_t>(dim)), delta);
}

std::vector<SaturationEstimator> ExperimentConfig::estimators() const {
  switch (estimator) {
    case EstimatorChoice::Ipr: return {SaturationEstimator::Ipr};
    case EstimatorChoice::TimeAverage: return {SaturationEstimator::TimeAverage};
    case EstimatorChoice::Both: return {SaturationEstimator::Ipr, SaturationEstimator::TimeAverage};
  }
  return {};
}

}  // namespace fsat
