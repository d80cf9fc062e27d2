#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace updrs {

/// One voice-recording row of the telemonitoring file.
struct Record {
  int subject_id = 0;
  int age = 0;
  int sex = 0;  // 0 male, 1 female
  double test_time = 0.0;
  double motor_updrs = 0.0;
  double total_updrs = 0.0;
  double jitter_pct = 0.0;
  double jitter_abs = 0.0;
  double jitter_rap = 0.0;
  double jitter_ppq5 = 0.0;
  double jitter_ddp = 0.0;
  double shimmer = 0.0;
  double shimmer_db = 0.0;
  double shimmer_apq3 = 0.0;
  double shimmer_apq5 = 0.0;
  double shimmer_apq11 = 0.0;
  double shimmer_dda = 0.0;
  double nhr = 0.0;
  double hnr = 0.0;
  double rpde = 0.0;
  double dfa = 0.0;
  double ppe = 0.0;
};

inline constexpr std::size_t kCanonicalFeatureCount = 18;

/// The 22 header names of the telemonitoring CSV, in file order.
const std::array<std::string, 22>& csv_columns();

/// Names of the 18 model features in matrix column order: age, sex, the five
/// jitter measures, the six shimmer measures, NHR, HNR, RPDE, DFA, PPE.
const std::array<std::string, kCanonicalFeatureCount>& canonical_feature_names();

/// The 18 model features of a record, in canonical column order.
std::array<double, kCanonicalFeatureCount> feature_vector(const Record& r);

/// Provenance of a problem row.
struct RowKey {
  int subject_id = 0;
  double test_time = 0.0;

  friend bool operator==(const RowKey&, const RowKey&) = default;
};

/// Immutable feature matrix (row-major) with its target vector.
class TabularProblem {
 public:
  /// Validates shape, finiteness and name uniqueness. `row_keys` may be empty,
  /// in which case rows are keyed (0, row index).
  TabularProblem(std::vector<double> features, std::size_t feature_count,
                 std::vector<double> target, std::vector<std::string> feature_names,
                 std::vector<RowKey> row_keys = {});

  /// Convenience for small hand-written problems; names default to x0, x1, ...
  static TabularProblem from_rows(const std::vector<std::vector<double>>& rows,
                                  std::vector<double> target,
                                  std::vector<std::string> feature_names = {});

  std::size_t rows() const noexcept { return target_.size(); }
  std::size_t features() const noexcept { return feature_count_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {features_.data() + i * feature_count_, feature_count_};
  }
  double at(std::size_t i, std::size_t j) const noexcept {
    return features_[i * feature_count_ + j];
  }
  double target(std::size_t i) const noexcept { return target_[i]; }
  std::span<const double> targets() const noexcept { return target_; }
  std::span<const double> matrix() const noexcept { return features_; }

  std::vector<double> column(std::size_t j) const;

  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  const std::vector<RowKey>& row_keys() const noexcept { return keys_; }

  /// Rows in the given order (indices may repeat, as in a bootstrap sample).
  TabularProblem subset(std::span<const std::size_t> indices) const;

  /// Same features and keys with a replacement target vector.
  TabularProblem with_targets(std::vector<double> target) const;

 private:
  std::vector<double> features_;
  std::size_t feature_count_;
  std::vector<double> target_;
  std::vector<std::string> names_;
  std::vector<RowKey> keys_;
};

enum class SeverityClass { Mild = 0, Moderate = 1, Severe = 2 };

inline constexpr std::size_t kSeverityClassCount = 3;

const char* to_string(SeverityClass c) noexcept;

struct SeverityCounts {
  std::array<std::size_t, kSeverityClassCount> counts{};

  std::size_t operator[](SeverityClass c) const noexcept {
    return counts[static_cast<std::size_t>(c)];
  }
  std::size_t total() const noexcept { return counts[0] + counts[1] + counts[2]; }
};

/// One subject's recordings from a single day.
struct Bag {
  int subject_id = 0;
  int time_step = 0;
  std::vector<Record> members;
  double bag_target = 0.0;
};

/// Reads the comma-separated telemonitoring file. Throws MissingFile,
/// SchemaMismatch, ParseError or RangeError.
std::vector<Record> load_csv(const std::filesystem::path& path);

/// Same parser over in-memory text; `source` names the input in messages.
std::vector<Record> parse_csv(std::string_view text, const std::string& source = "<memory>");

/// The 18-feature, motor-UPDRS-target problem. Throws EmptyInput.
TabularProblem select_features(std::span<const Record> records);

/// Rows whose target is a whole number (within 1e-6). Throws EmptySubset.
TabularProblem whole_updrs_subset(const TabularProblem& problem);

inline constexpr double kWholeNumberTolerance = 1e-6;

/// Half-open bins [0,33) mild, [33,59) moderate, [59,108] severe.
SeverityClass discretize_severity(double motor_updrs);

SeverityCounts severity_counts(const TabularProblem& problem);

/// Groups by (subject, floor(test_time)), sorted by that key.
std::vector<Bag> make_bags(std::span<const Record> records);

/// One row per bag holding per-feature means over its members.
TabularProblem propositionalize(std::span<const Bag> bags);

}  // namespace updrs
