#include "updrs/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "updrs/errors.hpp"
#include "updrs/numeric.hpp"

namespace updrs {

namespace {

enum Column : std::size_t {
  kSubject, kAge, kSex, kTestTime, kMotor, kTotal,
  kJitterPct, kJitterAbs, kJitterRap, kJitterPpq5, kJitterDdp,
  kShimmer, kShimmerDb, kShimmerApq3, kShimmerApq5, kShimmerApq11, kShimmerDda,
  kNhr, kHnr, kRpde, kDfa, kPpe,
  kColumnCount
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_real(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc{} && ptr == cell.data() + cell.size() && std::isfinite(out);
}

bool is_integral(double v) { return std::floor(v) == v; }

Record to_record(const std::array<double, kColumnCount>& v, std::size_t row) {
  const auto& names = csv_columns();
  for (const auto c : {kSubject, kAge, kSex}) {
    if (!is_integral(v[c])) {
      std::ostringstream cell;
      cell << v[c];
      throw ParseError(row, names[c], cell.str());
    }
  }
  Record r;
  r.subject_id = static_cast<int>(v[kSubject]);
  r.age = static_cast<int>(v[kAge]);
  r.sex = static_cast<int>(v[kSex]);
  if (r.sex != 0 && r.sex != 1) {
    throw RangeError("row " + std::to_string(row) + ": sex must be 0 or 1, got " +
                     std::to_string(r.sex));
  }
  r.test_time = v[kTestTime];
  r.motor_updrs = v[kMotor];
  if (r.motor_updrs < 0.0 || r.motor_updrs > 108.0) {
    std::ostringstream msg;
    msg << "row " << row << ": motor_UPDRS " << r.motor_updrs << " outside [0,108]";
    throw RangeError(msg.str());
  }
  r.total_updrs = v[kTotal];
  r.jitter_pct = v[kJitterPct];
  r.jitter_abs = v[kJitterAbs];
  r.jitter_rap = v[kJitterRap];
  r.jitter_ppq5 = v[kJitterPpq5];
  r.jitter_ddp = v[kJitterDdp];
  r.shimmer = v[kShimmer];
  r.shimmer_db = v[kShimmerDb];
  r.shimmer_apq3 = v[kShimmerApq3];
  r.shimmer_apq5 = v[kShimmerApq5];
  r.shimmer_apq11 = v[kShimmerApq11];
  r.shimmer_dda = v[kShimmerDda];
  r.nhr = v[kNhr];
  r.hnr = v[kHnr];
  r.rpde = v[kRpde];
  r.dfa = v[kDfa];
  r.ppe = v[kPpe];
  return r;
}

}  // namespace

const std::array<std::string, 22>& csv_columns() {
  static const std::array<std::string, 22> names = {
      "subject#",     "age",          "sex",          "test_time",     "motor_UPDRS", "total_UPDRS",
      "Jitter(%)",    "Jitter(Abs)",  "Jitter:RAP",   "Jitter:PPQ5",   "Jitter:DDP",  "Shimmer",
      "Shimmer(dB)",  "Shimmer:APQ3", "Shimmer:APQ5", "Shimmer:APQ11", "Shimmer:DDA", "NHR",
      "HNR",          "RPDE",         "DFA",          "PPE"};
  return names;
}

const std::array<std::string, kCanonicalFeatureCount>& canonical_feature_names() {
  static const std::array<std::string, kCanonicalFeatureCount> names = {
      "age",         "sex",          "Jitter(%)",    "Jitter(Abs)",   "Jitter:RAP",  "Jitter:PPQ5",
      "Jitter:DDP",  "Shimmer",      "Shimmer(dB)",  "Shimmer:APQ3",  "Shimmer:APQ5", "Shimmer:APQ11",
      "Shimmer:DDA", "NHR",          "HNR",          "RPDE",          "DFA",          "PPE"};
  return names;
}

std::array<double, kCanonicalFeatureCount> feature_vector(const Record& r) {
  return {static_cast<double>(r.age), static_cast<double>(r.sex),
          r.jitter_pct,  r.jitter_abs,   r.jitter_rap,   r.jitter_ppq5,   r.jitter_ddp,
          r.shimmer,     r.shimmer_db,   r.shimmer_apq3, r.shimmer_apq5,  r.shimmer_apq11,
          r.shimmer_dda, r.nhr,          r.hnr,          r.rpde,          r.dfa,
          r.ppe};
}

// ---------------------------------------------------------------------------
// TabularProblem

TabularProblem::TabularProblem(std::vector<double> features, std::size_t feature_count,
                               std::vector<double> target, std::vector<std::string> feature_names,
                               std::vector<RowKey> row_keys)
    : features_(std::move(features)),
      feature_count_(feature_count),
      target_(std::move(target)),
      names_(std::move(feature_names)),
      keys_(std::move(row_keys)) {
  if (target_.empty()) throw EmptyInput("problem has no rows");
  if (feature_count_ == 0) throw EmptyInput("problem has no feature columns");
  if (features_.size() != target_.size() * feature_count_) {
    throw DimensionMismatch("feature matrix has " + std::to_string(features_.size()) +
                            " cells, expected " + std::to_string(target_.size()) + " x " +
                            std::to_string(feature_count_));
  }
  if (names_.size() != feature_count_) {
    throw DimensionMismatch("expected " + std::to_string(feature_count_) + " feature names, got " +
                            std::to_string(names_.size()));
  }
  std::set<std::string> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) throw DataError("duplicate feature name '" + name + "'");
  }
  for (double v : features_) {
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
  }
  for (double v : target_) {
    if (!std::isfinite(v)) throw DataError("non-finite target value");
  }
  if (keys_.empty()) {
    keys_.resize(target_.size());
    for (std::size_t i = 0; i < keys_.size(); ++i) keys_[i].test_time = static_cast<double>(i);
  } else if (keys_.size() != target_.size()) {
    throw DimensionMismatch("row key count does not match row count");
  }
}

TabularProblem TabularProblem::from_rows(const std::vector<std::vector<double>>& rows,
                                         std::vector<double> target,
                                         std::vector<std::string> feature_names) {
  if (rows.empty()) throw EmptyInput("problem has no rows");
  const std::size_t f = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * f);
  for (const auto& r : rows) {
    if (r.size() != f) throw DimensionMismatch("ragged feature rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  if (feature_names.empty()) {
    for (std::size_t j = 0; j < f; ++j) feature_names.push_back("x" + std::to_string(j));
  }
  return TabularProblem(std::move(flat), f, std::move(target), std::move(feature_names));
}

std::vector<double> TabularProblem::column(std::size_t j) const {
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < rows(); ++i) out[i] = at(i, j);
  return out;
}

TabularProblem TabularProblem::subset(std::span<const std::size_t> indices) const {
  std::vector<double> features;
  features.reserve(indices.size() * feature_count_);
  std::vector<double> target;
  target.reserve(indices.size());
  std::vector<RowKey> keys;
  keys.reserve(indices.size());
  for (const std::size_t i : indices) {
    const auto r = row(i);
    features.insert(features.end(), r.begin(), r.end());
    target.push_back(target_[i]);
    keys.push_back(keys_[i]);
  }
  return TabularProblem(std::move(features), feature_count_, std::move(target), names_,
                        std::move(keys));
}

TabularProblem TabularProblem::with_targets(std::vector<double> target) const {
  if (target.size() != rows()) throw LengthMismatch("replacement target has wrong length");
  return TabularProblem(features_, feature_count_, std::move(target), names_, keys_);
}

// ---------------------------------------------------------------------------
// Loading

std::vector<Record> parse_csv(std::string_view text, const std::string& source) {
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    const auto nl = text.find('\n', pos);
    line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    return true;
  };

  std::string_view header;
  if (!next_line(header) || trim(header).empty()) {
    throw SchemaMismatch("<header>", source + " has no header line");
  }

  const auto& expected = csv_columns();
  std::map<std::string, std::size_t, std::less<>> expected_index;
  for (std::size_t c = 0; c < expected.size(); ++c) expected_index.emplace(expected[c], c);

  // position in file -> canonical column
  const auto header_cells = split_commas(header);
  std::vector<std::size_t> slot(header_cells.size());
  std::vector<bool> present(kColumnCount, false);
  for (std::size_t i = 0; i < header_cells.size(); ++i) {
    const auto it = expected_index.find(header_cells[i]);
    if (it == expected_index.end()) {
      throw SchemaMismatch(std::string(header_cells[i]), "unexpected column in " + source);
    }
    if (present[it->second]) {
      throw SchemaMismatch(it->first, "column appears twice in " + source);
    }
    present[it->second] = true;
    slot[i] = it->second;
  }
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    if (!present[c]) throw SchemaMismatch(expected[c], "column missing from " + source);
  }

  std::vector<Record> records;
  std::string_view line;
  std::size_t row = 0;
  std::array<double, kColumnCount> values{};
  while (next_line(line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    for (std::size_t i = 0; i < slot.size(); ++i) {
      const std::size_t c = slot[i];
      if (i >= cells.size()) throw ParseError(row, expected[c], "");
      if (!parse_real(cells[i], values[c])) throw ParseError(row, expected[c], std::string(cells[i]));
    }
    if (cells.size() > slot.size()) {
      throw ParseError(row, "<extra>", std::string(cells[slot.size()]));
    }
    records.push_back(to_record(values, row));
    ++row;
  }
  return records;
}

std::vector<Record> load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), path.string());
}

// ---------------------------------------------------------------------------
// Transforms

TabularProblem select_features(std::span<const Record> records) {
  if (records.empty()) throw EmptyInput("select_features: no records");
  std::vector<double> features;
  features.reserve(records.size() * kCanonicalFeatureCount);
  std::vector<double> target;
  target.reserve(records.size());
  std::vector<RowKey> keys;
  keys.reserve(records.size());
  for (const auto& r : records) {
    const auto fv = feature_vector(r);
    features.insert(features.end(), fv.begin(), fv.end());
    target.push_back(r.motor_updrs);
    keys.push_back({r.subject_id, r.test_time});
  }
  const auto& names = canonical_feature_names();
  return TabularProblem(std::move(features), kCanonicalFeatureCount, std::move(target),
                        std::vector<std::string>(names.begin(), names.end()), std::move(keys));
}

TabularProblem whole_updrs_subset(const TabularProblem& problem) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < problem.rows(); ++i) {
    const double y = problem.target(i);
    if (std::abs(y - std::round(y)) <= kWholeNumberTolerance) keep.push_back(i);
  }
  if (keep.empty()) throw EmptySubset("no row has a whole-number target");
  return problem.subset(keep);
}

const char* to_string(SeverityClass c) noexcept {
  switch (c) {
    case SeverityClass::Mild: return "Mild";
    case SeverityClass::Moderate: return "Moderate";
    case SeverityClass::Severe: return "Severe";
  }
  return "?";
}

SeverityClass discretize_severity(double motor_updrs) {
  if (!(motor_updrs >= 0.0 && motor_updrs <= 108.0)) {
    std::ostringstream msg;
    msg << "motor UPDRS " << motor_updrs << " outside [0,108]";
    throw RangeError(msg.str());
  }
  if (motor_updrs < 33.0) return SeverityClass::Mild;
  if (motor_updrs < 59.0) return SeverityClass::Moderate;
  return SeverityClass::Severe;
}

SeverityCounts severity_counts(const TabularProblem& problem) {
  SeverityCounts out;
  for (const double y : problem.targets()) {
    ++out.counts[static_cast<std::size_t>(discretize_severity(y))];
  }
  return out;
}

std::vector<Bag> make_bags(std::span<const Record> records) {
  if (records.empty()) throw EmptyInput("make_bags: no records");
  std::map<std::pair<int, int>, std::vector<Record>> groups;
  for (const auto& r : records) {
    const int step = static_cast<int>(std::floor(r.test_time));
    groups[{r.subject_id, step}].push_back(r);
  }
  std::vector<Bag> bags;
  bags.reserve(groups.size());
  for (auto& [key, members] : groups) {
    Bag bag;
    bag.subject_id = key.first;
    bag.time_step = key.second;
    CompensatedSum s;
    double lo = members.front().motor_updrs, hi = lo;
    for (const auto& m : members) {
      s.add(m.motor_updrs);
      lo = std::min(lo, m.motor_updrs);
      hi = std::max(hi, m.motor_updrs);
    }
    bag.bag_target = std::clamp(s.value() / static_cast<double>(members.size()), lo, hi);
    bag.members = std::move(members);
    bags.push_back(std::move(bag));
  }
  return bags;
}

TabularProblem propositionalize(std::span<const Bag> bags) {
  if (bags.empty()) throw EmptyInput("propositionalize: no bags");
  std::vector<double> features;
  features.reserve(bags.size() * kCanonicalFeatureCount);
  std::vector<double> target;
  std::vector<RowKey> keys;
  for (const auto& bag : bags) {
    if (bag.members.empty()) throw EmptyInput("propositionalize: bag without members");
    std::array<CompensatedSum, kCanonicalFeatureCount> sums;
    for (const auto& m : bag.members) {
      const auto fv = feature_vector(m);
      for (std::size_t j = 0; j < kCanonicalFeatureCount; ++j) sums[j].add(fv[j]);
    }
    const double n = static_cast<double>(bag.members.size());
    for (const auto& s : sums) features.push_back(s.value() / n);
    target.push_back(bag.bag_target);
    keys.push_back({bag.subject_id, static_cast<double>(bag.time_step)});
  }
  const auto& names = canonical_feature_names();
  return TabularProblem(std::move(features), kCanonicalFeatureCount, std::move(target),
                        std::vector<std::string>(names.begin(), names.end()), std::move(keys));
}

}  // namespace updrs
