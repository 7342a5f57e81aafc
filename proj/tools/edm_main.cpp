// edm: command-line driver for the educational data-mining toolkit.
//
//   edm related          marks -> rules.csv + related.csv
//   edm classify train   classification.csv -> tree.dot + tree.json
//   edm classify predict classification.csv + tree.json -> predictions.csv
//   edm cluster          clustering.csv -> clusters.csv + clusters_summary.json
//   edm synth            synth spec -> marks/classification/clustering CSVs + ground_truth.json
//
// Exit codes: 0 success, 1 internal error, 2 input or configuration error.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edm/edm.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

struct RunConfig {
  std::string marks;
  std::string passes;
  std::string catalog;
  int pass_mark = edm::kDefaultPassMark;
  std::optional<double> minconf;
  std::string pass_scope = "all";
  double gamma = edm::correlate::kDefaultGamma;
  int min_n = static_cast<int>(edm::correlate::kDefaultMinN);

  std::string class_data;
  std::string attributes = "dept,attendance";
  std::string tree;
  int good_min = 400;
  int average_min = 300;

  std::string cluster_data;
  double eps = 0.1;
  int min_pts = 4;
  bool no_normalize = false;

  std::string spec;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw edm::Error(edm::ErrorCode::Io, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw edm::Error(edm::ErrorCode::InvalidArgument, std::string(flag) + " is required");
}

std::set<std::string> parse_attributes(const std::string& list) {
  std::set<std::string> out;
  for (const auto& name : edm::csv::split(list)) {
    if (name.empty()) continue;
    if (!edm::id3::student_attribute_names().count(name)) {
      throw edm::Error(edm::ErrorCode::UnknownAttribute, "unknown attribute '" + name + "' (expected dept, attendance, marks)");
    }
    out.insert(name);
  }
  return out;
}

edm::DiscretizationPolicy policy_of(const RunConfig& cfg) {
  edm::DiscretizationPolicy p{cfg.good_min, cfg.average_min};
  p.validate();
  return p;
}

int cmd_related(const RunConfig& cfg) {
  require(cfg.marks, "--marks");
  edm::correlate::RelatedOptions opts;
  opts.gamma = cfg.gamma;
  if (cfg.min_n < 3) throw edm::Error(edm::ErrorCode::InvalidArgument, "--min-n must be at least 3");
  opts.min_n = static_cast<std::size_t>(cfg.min_n);
  opts.minconf_override = cfg.minconf;
  if (cfg.pass_scope == "all") {
    opts.scope = edm::assoc::PassRateScope::AllStudents;
  } else if (cfg.pass_scope == "enrolled") {
    opts.scope = edm::assoc::PassRateScope::Enrolled;
  } else {
    throw edm::Error(edm::ErrorCode::InvalidArgument, "--pass-scope must be 'all' or 'enrolled'");
  }
  opts.validate();

  std::cout << "related: gamma=" << opts.gamma << " min_n=" << opts.min_n << " pass_mark=" << cfg.pass_mark
            << " pass_scope=" << cfg.pass_scope << '\n';

  const auto ds = cfg.catalog.empty() ? edm::load_marks(cfg.marks) : edm::load_marks(cfg.marks, edm::load_catalog(cfg.catalog));
  const auto pt = cfg.passes.empty() ? edm::derive_pass_table(ds, cfg.pass_mark) : edm::load_passes(cfg.passes, ds.catalog());
  std::cout << "related: " << ds.student_count() << " students, " << ds.catalog().size() << " subjects, "
            << ds.record_count() << " marks" << (cfg.passes.empty() ? "" : " (pass table from " + cfg.passes + ")") << '\n';

  const auto analysis = edm::correlate::analyze_related(ds, pt, ds.catalog(), opts);
  std::cout << "related: minconf=" << edm::csv::fixed6(analysis.candidates.minconf)
            << (analysis.candidates.minconf_overridden ? " (override from --minconf)" : " (average pass rate)") << '\n';

  std::size_t strong = 0;
  std::size_t skipped = 0;
  for (const auto& r : analysis.reports) {
    strong += r.strong ? 1 : 0;
    skipped += r.skip != edm::correlate::SkipReason::None ? 1 : 0;
  }
  std::cout << "related: " << analysis.candidates.rules.size() << " rules, " << analysis.candidates.pairs.size()
            << " candidate pairs, " << strong << " strong, " << skipped << " skipped\n";

  const fs::path out(cfg.out_dir);
  edm::csv::write_all_atomic({{out / "rules.csv", edm::assoc::write_rules(analysis.candidates.rules)},
                              {out / "related.csv", edm::correlate::write_related(analysis.reports)}});
  return kExitOk;
}

int cmd_classify_train(const RunConfig& cfg) {
  require(cfg.class_data, "--class-data");
  const auto policy = policy_of(cfg);
  const auto attributes = parse_attributes(cfg.attributes);
  std::cout << "classify train: attributes=" << cfg.attributes << " good_min=" << policy.good_min
            << " average_min=" << policy.average_min << '\n';

  const auto rows = edm::load_classification(cfg.class_data, policy);
  if (rows.empty()) throw edm::Error(edm::ErrorCode::EmptyTrainingSet, cfg.class_data + " has no rows");
  const auto examples = edm::id3::student_examples(rows);
  for (const auto& g : edm::id3::gain_table(examples, attributes)) {
    std::cout << "classify train: gain(" << g.attribute << ")=" << edm::csv::fixed6(g.gain) << '\n';
  }
  edm::id3::TreeModel model{attributes, edm::id3::id3_train(examples, attributes)};

  std::size_t correct = 0;
  for (const auto& e : examples) correct += edm::id3::predict(model.root, e.attributes) == e.label ? 1 : 0;
  std::cout << "classify train: " << rows.size() << " rows, " << edm::id3::node_count(model.root) << " nodes, depth "
            << edm::id3::depth(model.root) << ", training accuracy " << correct << "/" << rows.size() << '\n';

  const fs::path out(cfg.out_dir);
  edm::csv::write_all_atomic({{out / "tree.dot", edm::id3::export_dot(model.root)},
                              {out / "tree.json", edm::id3::tree_to_json(model)}});
  return kExitOk;
}

int cmd_classify_predict(const RunConfig& cfg) {
  require(cfg.class_data, "--class-data");
  const fs::path out(cfg.out_dir);
  const std::string tree_path = cfg.tree.empty() ? (out / "tree.json").string() : cfg.tree;
  const auto policy = policy_of(cfg);
  std::cout << "classify predict: tree=" << tree_path << " good_min=" << policy.good_min
            << " average_min=" << policy.average_min << '\n';

  const auto model = edm::id3::tree_from_json(read_text(tree_path));
  for (const auto& a : model.attributes) {
    if (!edm::id3::student_attribute_names().count(a)) {
      throw edm::Error(edm::ErrorCode::InconsistentSchema, "tree uses attribute '" + a + "' which " + cfg.class_data + " does not provide");
    }
  }
  const auto rows = edm::load_classification(cfg.class_data, policy);

  std::ostringstream os;
  os << "stud_id,predicted_performance\n";
  for (const auto& r : rows) os << r.stud_id << ',' << edm::id3::predict(model.root, edm::id3::student_attributes(r)) << '\n';
  std::cout << "classify predict: " << rows.size() << " predictions\n";
  edm::csv::write_all_atomic({{out / "predictions.csv", os.str()}});
  return kExitOk;
}

int cmd_cluster(const RunConfig& cfg) {
  require(cfg.cluster_data, "--cluster-data");
  if (cfg.min_pts < 1) throw edm::Error(edm::ErrorCode::InvalidArgument, "--min-pts must be >= 1");
  edm::dbscan::Params params{cfg.eps, static_cast<std::size_t>(cfg.min_pts), !cfg.no_normalize};
  params.validate();
  std::cout << "cluster: eps=" << params.eps << " min_pts=" << params.min_pts
            << " normalize=" << (params.normalize ? "on" : "off") << '\n';

  const auto rows = edm::load_clustering(cfg.cluster_data);
  std::vector<edm::dbscan::Point> points;
  points.reserve(rows.size());
  for (const auto& r : rows) points.push_back({r.stud_id, {r.attendance_pct, r.marks}});
  const auto assignment = edm::dbscan::dbscan(points, params);
  const auto clusters = edm::dbscan::summarize(points, assignment);
  const auto noise = edm::dbscan::noise_count(assignment);

  nlohmann::ordered_json summary;
  summary["params"] = {{"eps", params.eps}, {"min_pts", params.min_pts}, {"normalize", params.normalize}};
  summary["points"] = points.size();
  summary["cluster_count"] = assignment.cluster_count;
  summary["noise_count"] = noise;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : clusters) {
    nlohmann::ordered_json cj;
    cj["cluster"] = c.cluster_id;
    cj["size"] = c.size;
    cj["core"] = c.core_count;
    cj["border"] = c.size - c.core_count;
    cj["centroid"] = {{"attendance", c.centroid[0]}, {"marks", c.centroid[1]}};
    arr.push_back(std::move(cj));
  }
  summary["clusters"] = std::move(arr);
  std::cout << "cluster: " << points.size() << " points, " << assignment.cluster_count << " clusters, " << noise << " noise\n";

  const fs::path out(cfg.out_dir);
  edm::csv::write_all_atomic({{out / "clusters.csv", edm::dbscan::write_clusters(points, assignment)},
                              {out / "clusters_summary.json", summary.dump(2) + "\n"}});
  return kExitOk;
}

int cmd_synth(const RunConfig& cfg) {
  const auto spec = cfg.spec.empty() ? edm::synth::default_spec() : edm::synth::spec_from_json(read_text(cfg.spec));
  std::cout << "synth: seed=" << cfg.seed << " spec=" << (cfg.spec.empty() ? "<built-in>" : cfg.spec) << '\n';
  const auto cohort = edm::synth::generate_synthetic_cohort(spec, cfg.seed);
  std::cout << "synth: " << cohort.marks.student_count() << " students x " << cohort.marks.catalog().size() << " subjects, "
            << cohort.classification.size() << " classification rows, " << cohort.clustering.size() << " clustering rows\n";

  const fs::path out(cfg.out_dir);
  edm::csv::write_all_atomic({{out / "marks.csv", edm::write_marks(cohort.marks)},
                              {out / "classification.csv", edm::write_classification(cohort.classification)},
                              {out / "clustering.csv", edm::write_clustering(cohort.clustering)},
                              {out / "ground_truth.json", edm::synth::ground_truth_json(cohort.truth)}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"edm - association rules, correlation, ID3 and DBSCAN over student records"};
  app.set_config("--config", "", "Read options from a TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--marks", cfg.marks, "marks.csv (student_id,subject_id,marks)");
  app.add_option("--passes", cfg.passes, "optional passes.csv (student_id,subject_id,passed) overriding --pass-mark");
  app.add_option("--catalog", cfg.catalog, "optional catalog CSV (subject_id,title,max_marks)");
  app.add_option("--pass-mark", cfg.pass_mark, "marks at or above this count as a pass")->capture_default_str();
  app.add_option("--minconf", cfg.minconf, "fixed minimum confidence instead of the average pass rate");
  app.add_option("--pass-scope", cfg.pass_scope, "pass-rate denominator: all | enrolled")->capture_default_str();
  app.add_option("--gamma", cfg.gamma, "correlation threshold for a strong relationship")->capture_default_str();
  app.add_option("--min-n", cfg.min_n, "minimum number of shared students per pair")->capture_default_str();
  app.add_option("--class-data", cfg.class_data, "classification.csv (stud_id,dept,attendance,marks)");
  app.add_option("--attributes", cfg.attributes, "comma-separated ID3 attributes")->capture_default_str();
  app.add_option("--tree", cfg.tree, "tree.json for prediction (default: <out-dir>/tree.json)");
  app.add_option("--good-min", cfg.good_min, "lowest total marks labelled GOOD")->capture_default_str();
  app.add_option("--average-min", cfg.average_min, "lowest total marks labelled AVERAGE")->capture_default_str();
  app.add_option("--cluster-data", cfg.cluster_data, "clustering.csv (stud_id,attendance,marks)");
  app.add_option("--eps", cfg.eps, "DBSCAN neighbourhood radius")->capture_default_str();
  app.add_option("--min-pts", cfg.min_pts, "DBSCAN core threshold (point itself included)")->capture_default_str();
  app.add_flag("--no-normalize", cfg.no_normalize, "cluster on raw attendance/marks instead of min-max scaled values");
  app.add_option("--spec", cfg.spec, "synthetic cohort spec (JSON); built-in default when omitted");
  app.add_option("--seed", cfg.seed, "RNG seed for synth")->capture_default_str();
  app.add_option("--out-dir", cfg.out_dir, "directory for output files")->capture_default_str();

  auto* related = app.add_subcommand("related", "mine candidate subject pairs and test their correlation");
  auto* classify = app.add_subcommand("classify", "ID3 decision tree over dept/attendance");
  classify->require_subcommand(1);
  classify->fallthrough();
  auto* train = classify->add_subcommand("train", "learn tree.dot and tree.json");
  auto* predict = classify->add_subcommand("predict", "write predictions.csv from tree.json");
  train->fallthrough();
  predict->fallthrough();
  auto* cluster = app.add_subcommand("cluster", "DBSCAN over attendance and marks");
  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic cohort");
  for (auto* sub : {related, cluster, synth}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*related) return cmd_related(cfg);
    if (*train) return cmd_classify_train(cfg);
    if (*predict) return cmd_classify_predict(cfg);
    if (*cluster) return cmd_cluster(cfg);
    if (*synth) return cmd_synth(cfg);
  } catch (const edm::Error& e) {
    std::cerr << "edm: " << e.what() << '\n';
    return e.code() == edm::ErrorCode::Io && std::string(e.what()).find("cannot write") != std::string::npos ? kExitInternal
                                                                                                              : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "edm: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
