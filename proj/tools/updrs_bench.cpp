// Command-line driver for the telemonitoring experiments.
//
// Exit codes: 0 success, 1 data error, 2 configuration or usage error.

#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "updrs/data.hpp"
#include "updrs/errors.hpp"
#include "updrs/harness.hpp"
#include "updrs/parallel.hpp"

namespace {

struct Options {
  std::string data = "data/parkinsons_updrs.data";
  updrs::Seed seed = updrs::kDefaultSeed;
  std::size_t folds = updrs::kDefaultFolds;
  std::string format = "md";
  std::size_t threads = 0;
  bool no_timing = false;
  std::string method;
  std::string dump_model;
};

void emit(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

void emit_rows(const Options& o, const std::vector<updrs::EvalReport>& rows, const std::string& title) {
  const updrs::RenderOptions render{!o.no_timing};
  if (o.format == "json") {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back(updrs::to_json(r, render));
    emit(arr);
  } else {
    std::cout << updrs::render_markdown(rows, title, render);
  }
}

int run_load(const Options& o, const std::vector<updrs::Record>& records) {
  const auto problem = updrs::select_features(records);
  std::set<int> subjects;
  for (const auto& r : records) subjects.insert(r.subject_id);
  const auto counts = updrs::severity_counts(problem);
  const auto bags = updrs::make_bags(records);
  if (o.format == "json") {
    emit({{"records", records.size()},
          {"subjects", subjects.size()},
          {"features", problem.features()},
          {"severity", {{"Mild", counts.counts[0]}, {"Moderate", counts.counts[1]}, {"Severe", counts.counts[2]}}},
          {"bags", bags.size()}});
  } else {
    std::cout << "records:  " << records.size() << "\n"
              << "subjects: " << subjects.size() << "\n"
              << "features: " << problem.features() << "\n"
              << "severity: Mild " << counts.counts[0] << ", Moderate " << counts.counts[1]
              << ", Severe " << counts.counts[2] << "\n"
              << "bags:     " << bags.size() << "\n";
  }
  return 0;
}

int dispatch(const std::string& command, const Options& o) {
  const auto records = updrs::load_csv(o.data);
  const auto problem = updrs::select_features(records);
  const updrs::RenderOptions render{!o.no_timing};

  if (command == "load") return run_load(o, records);
  if (command == "table2") {
    const auto report = updrs::run_table2(problem);
    if (o.format == "json") emit(updrs::to_json(report));
    else std::cout << updrs::render_markdown(report);
    return 0;
  }
  if (command == "table3") {
    emit_rows(o, updrs::run_table3(problem, o.seed, o.folds), "Single learners, motor UPDRS");
    return 0;
  }
  if (command == "table4") {
    emit_rows(o, updrs::run_table4(problem, o.seed, o.folds), "Ensembles, motor UPDRS");
    return 0;
  }
  if (command == "verify") {
    emit_rows(o, {updrs::run_verification(problem, o.seed, o.folds)}, "Whole-number motor UPDRS subset");
    return 0;
  }
  if (command == "mil") {
    emit_rows(o, {updrs::run_mil(records, o.seed, o.folds)}, "Subject-day bags");
    return 0;
  }
  if (command == "classify") {
    const auto report = updrs::run_classification(problem, o.seed, o.folds);
    if (o.format == "json") emit(updrs::to_json(report, render));
    else std::cout << updrs::render_markdown(report, render);
    return 0;
  }
  if (command == "run") {
    const auto learner = updrs::make_preset(o.method);
    emit_rows(o, {updrs::cross_validate(problem, *learner, o.folds, o.seed)}, learner->name());
    if (!o.dump_model.empty()) {
      const auto model = learner->fit(problem, o.seed);
      std::ofstream out(o.dump_model);
      if (!out) throw updrs::InvalidParams("cannot write '" + o.dump_model + "'");
      model->describe(out);
    }
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motor UPDRS regression benchmarks on voice telemonitoring data"};
  app.require_subcommand(1, 1);
  Options o;

  std::string method_list;
  for (const auto name : updrs::preset_names()) {
    method_list += (method_list.empty() ? "" : ", ") + std::string(name);
  }

  const auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--data", o.data, "Telemonitoring CSV")->capture_default_str();
    sub->add_option("--seed", o.seed, "Fold and learner seed")->capture_default_str();
    sub->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"md", "json"}))
        ->capture_default_str();
    sub->add_option("--threads", o.threads, "Worker threads (0 = hardware)");
    sub->add_flag("--no-timing", o.no_timing, "Omit wall-clock times from the output");
  };

  add_common(app.add_subcommand("load", "Summarize the data file"));
  add_common(app.add_subcommand("table2", "Rank features by correlation with motor UPDRS"));
  add_common(app.add_subcommand("table3", "Cross-validate the single learners"));
  add_common(app.add_subcommand("table4", "Cross-validate the ensembles"));
  add_common(app.add_subcommand("verify", "M5P on the whole-number-target subset"));
  add_common(app.add_subcommand("classify", "k-NN severity classification"));
  add_common(app.add_subcommand("mil", "M5P on subject-day bags"));
  auto* run = app.add_subcommand("run", "Cross-validate one method");
  add_common(run);
  run->add_option("--method", o.method, "One of: " + method_list)->required();
  run->add_option("--dump-model", o.dump_model, "Write the full-data model here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (o.threads > 0) updrs::set_thread_count(o.threads);
    return dispatch(app.get_subcommands().front()->get_name(), o);
  } catch (const updrs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.category() == updrs::ErrorCategory::Data ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
