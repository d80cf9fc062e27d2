#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "synthetic.hpp"
#include "updrs/data.hpp"
#include "updrs/errors.hpp"

using namespace updrs;

namespace {

const std::string kHeader =
    "subject#,age,sex,test_time,motor_UPDRS,total_UPDRS,Jitter(%),Jitter(Abs),Jitter:RAP,"
    "Jitter:PPQ5,Jitter:DDP,Shimmer,Shimmer(dB),Shimmer:APQ3,Shimmer:APQ5,Shimmer:APQ11,"
    "Shimmer:DDA,NHR,HNR,RPDE,DFA,PPE";

std::string row(int subject, double time, double motor, double feature = 0.5) {
  std::ostringstream out;
  out << subject << ",60,0," << time << ',' << motor << ',' << motor + 5;
  for (int j = 0; j < 16; ++j) out << ',' << feature + 0.01 * j;
  return out.str();
}

TabularProblem targets_only(std::vector<double> y) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < y.size(); ++i) rows.push_back({static_cast<double>(i)});
  return TabularProblem::from_rows(rows, std::move(y));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("load_csv reports a missing file") {
  CHECK_THROWS_AS(load_csv("/nonexistent/parkinsons.data"), MissingFile);
}

TEST_CASE("header without PPE is rejected naming the column") {
  std::string header = kHeader.substr(0, kHeader.rfind(','));
  try {
    parse_csv(header + "\n");
    FAIL("expected SchemaMismatch");
  } catch (const SchemaMismatch& e) {
    CHECK(e.column() == "PPE");
  }
}

TEST_CASE("parse errors carry row and column") {
  const std::string text = kHeader + "\n" + row(1, 0.5, 20) + "\n" + "1,60,0,1.5,20,25,abc" +
                           row(1, 0, 0).substr(row(1, 0, 0).find(',', 20)) + "\n";
  try {
    parse_csv(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 1);
    CHECK(e.column() == "Jitter(%)");
  }
}

TEST_CASE("motor UPDRS outside [0,108] is a range error") {
  CHECK_THROWS_AS(parse_csv(kHeader + "\n" + row(1, 0.5, 109) + "\n"), RangeError);
  CHECK_THROWS_AS(parse_csv(kHeader + "\n" + row(1, 0.5, -1) + "\n"), RangeError);
}

TEST_CASE("select_features keeps 18 columns in canonical order") {
  const auto records = parse_csv(kHeader + "\n" + row(3, 1.25, 20) + "\n");
  const auto p = select_features(records);
  CHECK(p.rows() == 1);
  CHECK(p.features() == 18);
  const auto& names = p.feature_names();
  CHECK(names.front() == "age");
  CHECK(names.back() == "PPE");
  CHECK(std::find(names.begin(), names.end(), "test_time") == names.end());
  CHECK(std::find(names.begin(), names.end(), "total_UPDRS") == names.end());
  CHECK(p.row_keys()[0].subject_id == 3);
  CHECK(p.row_keys()[0].test_time == doctest::Approx(1.25));
  CHECK_THROWS_AS(select_features(std::vector<Record>{}), EmptyInput);
}

TEST_CASE("round trip from CSV cells to matrix is lossless") {
  const std::string text = testsupport::synthetic_csv({6, 3, 2, 11});
  const auto problem = select_features(parse_csv(text));
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  const auto header = split_line(line);
  std::map<std::string, std::size_t> at;
  for (std::size_t j = 0; j < header.size(); ++j) at[header[j]] = j;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    const auto cells = split_line(line);
    for (std::size_t j = 0; j < problem.features(); ++j) {
      CHECK(problem.at(i, j) == std::stod(cells[at[problem.feature_names()[j]]]));
    }
    CHECK(problem.target(i) == std::stod(cells[at["motor_UPDRS"]]));
    ++i;
  }
  CHECK(i == problem.rows());
}

TEST_CASE("whole_updrs_subset uses a 1e-6 tolerance") {
  const auto p = targets_only({25.0, 25.3, 30.000000049});
  const auto s = whole_updrs_subset(p);
  REQUIRE(s.rows() == 2);
  CHECK(s.target(0) == 25.0);
  CHECK(s.at(0, 0) == 0.0);
  CHECK(s.at(1, 0) == 2.0);

  const auto all = targets_only({1, 2, 3});
  CHECK(whole_updrs_subset(all).rows() == 3);
  CHECK_THROWS_AS(whole_updrs_subset(targets_only({0.5, 1.5})), EmptySubset);
}

TEST_CASE("severity bins") {
  CHECK(discretize_severity(15) == SeverityClass::Mild);
  CHECK(discretize_severity(32.4) == SeverityClass::Mild);
  CHECK(discretize_severity(0) == SeverityClass::Mild);
  CHECK(discretize_severity(33) == SeverityClass::Moderate);
  CHECK(discretize_severity(58.99) == SeverityClass::Moderate);
  CHECK(discretize_severity(59) == SeverityClass::Severe);
  CHECK(discretize_severity(108) == SeverityClass::Severe);
  CHECK_THROWS_AS(discretize_severity(-0.1), RangeError);
  CHECK_THROWS_AS(discretize_severity(108.1), RangeError);
}

TEST_CASE("severity is monotone and counts sum to N") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 108.0);
  std::vector<double> y;
  for (int i = 0; i < 2000; ++i) y.push_back(u(rng));
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    CHECK(discretize_severity(sorted[i - 1]) <= discretize_severity(sorted[i]));
  }
  const auto counts = severity_counts(targets_only(y));
  CHECK(counts.total() == y.size());
  CHECK(severity_counts(targets_only({40})).counts == std::array<std::size_t, 3>{0, 1, 0});
}

TEST_CASE("make_bags groups by subject and day") {
  const auto records = parse_csv(kHeader + "\n" + row(1, 0.2, 20, 1.0) + "\n" + row(1, 0.7, 20, 3.0) +
                                 "\n" + row(1, 7.1, 20) + "\n");
  const auto bags = make_bags(records);
  REQUIRE(bags.size() == 2);
  CHECK(bags[0].time_step == 0);
  CHECK(bags[1].time_step == 7);
  CHECK(bags[0].bag_target == 20.0);
  CHECK(bags[0].members.size() == 2);

  const auto p = propositionalize(bags);
  CHECK(p.rows() == 2);
  CHECK(p.features() == 18);
  CHECK(p.at(0, 2) == doctest::Approx(2.0));  // Jitter(%) means of {1, 3}
  CHECK_THROWS_AS(make_bags(std::vector<Record>{}), EmptyInput);
  CHECK_THROWS_AS(propositionalize(std::vector<Bag>{}), EmptyInput);
}

TEST_CASE("single-member bag reproduces the record") {
  const auto records = parse_csv(kHeader + "\n" + row(4, 2.5, 11.5, 0.3) + "\n");
  const auto p = propositionalize(make_bags(records));
  const auto v = feature_vector(records[0]);
  for (std::size_t j = 0; j < 18; ++j) CHECK(p.at(0, j) == v[j]);
  CHECK(p.target(0) == 11.5);
}

TEST_CASE("bags partition the records") {
  const auto records = parse_csv(testsupport::synthetic_csv({10, 8, 5, 5}));
  const auto bags = make_bags(records);
  std::set<std::pair<int, int>> keys;
  for (const auto& r : records) keys.insert({r.subject_id, static_cast<int>(std::floor(r.test_time))});
  CHECK(bags.size() == keys.size());
  std::size_t members = 0;
  for (std::size_t b = 0; b < bags.size(); ++b) {
    members += bags[b].members.size();
    double lo = 1e9, hi = -1e9;
    for (const auto& m : bags[b].members) {
      CHECK(m.subject_id == bags[b].subject_id);
      CHECK(static_cast<int>(std::floor(m.test_time)) == bags[b].time_step);
      lo = std::min(lo, m.motor_updrs);
      hi = std::max(hi, m.motor_updrs);
    }
    CHECK(bags[b].bag_target >= lo);
    CHECK(bags[b].bag_target <= hi);
    if (b > 0) {
      CHECK(std::pair(bags[b - 1].subject_id, bags[b - 1].time_step) <
            std::pair(bags[b].subject_id, bags[b].time_step));
    }
  }
  CHECK(members == records.size());
  CHECK(propositionalize(bags).rows() == keys.size());
}

TEST_CASE("TabularProblem validation") {
  CHECK_THROWS_AS(TabularProblem({1.0, 2.0, 3.0}, 2, {1.0}, {"a", "b"}), DimensionMismatch);
  CHECK_THROWS_AS(TabularProblem({1.0, NAN}, 2, {1.0}, {"a", "b"}), DataError);
  CHECK_THROWS_AS(TabularProblem({1.0, 2.0}, 2, {1.0}, {"a", "a"}), DataError);
}

TEST_CASE("whitespace around fields and blank lines are tolerated") {
  std::string text = kHeader + "\n" + row(1, 0.5, 20) + "\n\n";
  std::string spaced;
  for (char c : text) {
    spaced += c;
    if (c == ',') spaced += ' ';
  }
  CHECK(parse_csv(spaced).size() == 1);
}
