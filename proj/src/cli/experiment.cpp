#include "ltn/cli/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "ltn/data/encoding.hpp"
#include "ltn/data/kdd.hpp"
#include "ltn/data/split.hpp"
#include "ltn/data/synth.hpp"
#include "ltn/data/table.hpp"
#include "ltn/error.hpp"
#include "ltn/kb/kb.hpp"
#include "ltn/logic/similarity.hpp"
#include "ltn/metrics/metrics.hpp"
#include "ltn/nn/mlp.hpp"
#include "ltn/parser/parser.hpp"

namespace fs = std::filesystem;

namespace ltn {

namespace {

const std::vector<std::string> kBeamOnlyKeys{"k", "distance", "minkowski_p", "validation_data", "validation_n"};
const std::vector<std::string> kDerivedKeys{"feature_checksum", "rows", "rows_train", "rows_test", "labels"};

std::string trim(std::string s) {
  auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

template <class T>
T parse_value(const std::string& key, const std::string& value) {
  T out{};
  const auto* first = value.data();
  const auto* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || value.empty()) {
    throw Error("config key '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string number_text(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string path_text(const fs::path& p) { return p.empty() ? "" : fs::absolute(p).lexically_normal().string(); }

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool is_ltn(ExperimentKind k) { return k != ExperimentKind::KddDnn; }
bool is_kdd(ExperimentKind k) { return k == ExperimentKind::KddMultilabelLtn || k == ExperimentKind::KddDnn; }

// Protocol and flag values in the order of the protocol/flag table.
const std::vector<std::string>& protocol_vocabulary() {
  static const std::vector<std::string> v{"tcp", "icmp", "udp"};
  return v;
}
const std::vector<std::string>& flag_vocabulary() {
  static const std::vector<std::string> v{"SF", "S1", "REJ", "S2", "S0", "S3", "RSTO", "RSTR", "RSTOS0", "OTH", "SH"};
  return v;
}

// Label names become identifiers in axiom files.
std::string identifier(const std::string& s, bool lower) {
  std::string out;
  for (unsigned char c : s) {
    const char m = std::isalnum(c) ? static_cast<char>(lower ? std::tolower(c) : c) : '_';
    out += m;
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "c_" + out;
  return out;
}

struct Prepared {
  EncodingSpec spec;
  Encoded data;
  std::vector<std::string> labels;
  TaskKind task = TaskKind::MultiLabel;
  std::size_t rows = 0;
};

SynthKind default_synth(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ProtocolKb: return SynthKind::ProtocolFlags;
    case ExperimentKind::KddMultilabelLtn:
    case ExperimentKind::KddDnn: return SynthKind::AttackCategories;
    case ExperimentKind::CicSinglelabel: return SynthKind::ThreeClass;
    case ExperimentKind::BeamRegression: return SynthKind::BeamRfs;
  }
  return SynthKind::AttackCategories;
}

std::string default_label_column(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ProtocolKb: return "";
    case ExperimentKind::KddMultilabelLtn:
    case ExperimentKind::KddDnn: return "label";
    case ExperimentKind::CicSinglelabel: return "Label";
    case ExperimentKind::BeamRegression: return "position";
  }
  return "";
}

DatasetTable load_source(const ExperimentConfig& cfg, const fs::path& data, std::size_t n, std::uint64_t seed) {
  if (!data.empty()) return load_table(data, Schema::load(cfg.schema));
  const SynthKind kind = cfg.synth.empty() ? default_synth(cfg.experiment) : synth_kind_from_string(cfg.synth);
  return synth_generate(kind, n, seed);
}

DatasetTable preprocess(const ExperimentConfig& cfg, DatasetTable table, const std::string& label_column) {
  table = clean(table);
  if (is_kdd(cfg.experiment)) table = group_kdd_labels(table, label_column);
  if (table.size() == 0) throw DataError("no rows left after cleaning");
  return table;
}

Prepared prepare(const ExperimentConfig& cfg) {
  const std::string label_column = cfg.label_column.empty() ? default_label_column(cfg.experiment) : cfg.label_column;
  DatasetTable table = preprocess(cfg, load_source(cfg, cfg.data, cfg.synth_n, cfg.data_seed), label_column);

  FitOptions fit;
  fit.label_column = label_column;
  fit.feature_columns = cfg.features;
  Prepared p;
  switch (cfg.experiment) {
    case ExperimentKind::ProtocolKb:
      if (fit.feature_columns.empty()) fit.feature_columns = {"protocol_type", "flag"};
      fit.vocabularies["protocol_type"] = protocol_vocabulary();
      fit.vocabularies["flag"] = flag_vocabulary();
      fit.label_column.clear();
      p.task = TaskKind::MultiLabel;
      break;
    case ExperimentKind::KddMultilabelLtn:
    case ExperimentKind::KddDnn:
      fit.label_scheme = LabelScheme::MultiLabel;
      fit.vocabularies[label_column] = kdd_categories();
      p.task = TaskKind::MultiLabel;
      break;
    case ExperimentKind::CicSinglelabel:
      fit.label_scheme = LabelScheme::SingleLabel;
      p.task = TaskKind::SingleLabel;
      break;
    case ExperimentKind::BeamRegression:
      fit.label_scheme = LabelScheme::Regression;
      p.task = TaskKind::Regression;
      break;
  }
  p.spec = fit_encoding(table, fit);
  p.data = encode(table, p.spec);
  p.rows = table.size();
  if (cfg.experiment == ExperimentKind::ProtocolKb) {
    // inputs and labels are the same 14 protocol/flag indicators
    p.data.y = p.data.x;
    for (const auto& f : p.spec.features) {
      if (!f.categorical) throw DataError("protocol-kb features must be categorical, '" + f.column + "' is numeric");
      for (const auto& v : f.vocabulary) p.labels.push_back(identifier(v, true));
    }
  } else {
    for (const auto& l : p.spec.labels) p.labels.push_back(identifier(l, false));
  }
  std::set<std::string> unique(p.labels.begin(), p.labels.end());
  if (unique.size() != p.labels.size()) throw DataError("label names collide after conversion to identifiers");
  return p;
}

ParseOptions parse_options(const std::vector<std::string>& labels) {
  ParseOptions o;
  o.constants.insert(labels.begin(), labels.end());
  return o;
}

KnowledgeBase make_kb(const ExperimentConfig& cfg, const Prepared& p) {
  KnowledgeBase kb;
  kb.quantifier_config = {cfg.p_train, cfg.p_forall_query, cfg.p_exists_query};
  kb.axiom_aggregation_p = cfg.axiom_p;
  MlpSpec spec;
  spec.input_dim = p.data.x.dim(1);
  spec.hidden_dims = cfg.hidden;
  spec.hidden_activation = Activation::Elu;
  spec.seed = cfg.seed;
  if (p.task == TaskKind::Regression) {
    spec.output_dim = 1;
    spec.output_activation = Activation::Identity;
    kb.grounding.add_mlp_function("f", spec);
    kb.grounding.add_predicate("Sim", std::make_shared<SimilarityPredicate>(distance_from_string(cfg.distance),
                                                                            cfg.minkowski_p));
  } else {
    spec.output_dim = p.labels.size();
    spec.output_activation = p.task == TaskKind::SingleLabel ? Activation::Softmax : Activation::Sigmoid;
    kb.grounding.add_mlp_predicate("P", spec, p.labels);
  }
  for (auto& a : load_axiom_file(cfg.axioms, parse_options(p.labels))) kb.add_axiom(a.name, a.formula);
  if (kb.axioms.empty()) throw LogicError("axiom file " + cfg.axioms.string() + " has no axioms");
  return kb;
}

std::vector<Axiom> load_queries(const ExperimentConfig& cfg, const Prepared& p) {
  std::vector<Axiom> out;
  if (cfg.queries.empty()) return out;
  for (auto& q : load_axiom_file(cfg.queries, parse_options(p.labels))) out.push_back({q.name, q.formula});
  return out;
}

TaskSpec make_task(const Prepared& p) {
  TaskSpec t;
  t.kind = p.task;
  t.labels = p.labels;
  t.model = p.task == TaskKind::Regression ? "f" : "P";
  return t;
}

TrainConfig train_config(const ExperimentConfig& cfg, std::vector<Axiom> queries) {
  TrainConfig t;
  t.epochs = cfg.epochs;
  t.batch_size = cfg.batch_size;
  t.learning_rate = cfg.learning_rate;
  t.seed = cfg.seed;
  t.queries = std::move(queries);
  return t;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_echo(const ExperimentConfig& cfg, const fs::path& path, const std::map<std::string, std::string>& derived) {
  std::string text = cfg.to_text();
  for (const auto& [k, v] : derived) text += k + "=" + v + "\n";
  write_text(path, text);
}

void add_plots(RunArtifacts& art, const fs::path& metrics, const fs::path& out_dir, const std::string& prefix) {
  auto files = emit_plot_data(metrics, out_dir, prefix);
  art.plot_files.insert(art.plot_files.end(), files.begin(), files.end());
}

void write_dnn_metrics(const std::vector<DnnRecord>& records, const fs::path& path) {
  std::string text = "epoch,loss_train,loss_test,acc_train,acc_test\n";
  for (const auto& r : records) {
    text += std::to_string(r.epoch) + "," + format_fixed6(r.loss_train) + "," + format_fixed6(r.loss_test) + "," +
            format_fixed6(r.acc_train) + "," + format_fixed6(r.acc_test) + "\n";
  }
  write_text(path, text);
}

RunArtifacts run_classification(const ExperimentConfig& cfg, const Prepared& p) {
  RunArtifacts art;
  art.feature_checksum = array_checksum(p.data.x);
  const auto idx = split(p.rows, cfg.test_fraction, cfg.seed);
  const Dataset all{p.data.x, p.data.y};
  const Dataset train_set = all.subset(idx.train);
  const Dataset test_set = all.subset(idx.test);
  const fs::path metrics = cfg.output_dir / "metrics.csv";
  const fs::path plots = cfg.output_dir / "plots";

  std::map<std::string, std::string> derived{{"feature_checksum", hex(art.feature_checksum)},
                                             {"rows", std::to_string(p.rows)},
                                             {"rows_train", std::to_string(idx.train.size())},
                                             {"rows_test", std::to_string(idx.test.size())},
                                             {"labels", join(p.labels)}};

  if (cfg.experiment == ExperimentKind::KddDnn) {
    MlpSpec spec;
    spec.input_dim = p.data.x.dim(1);
    spec.hidden_dims = cfg.hidden;
    spec.output_dim = p.labels.size();
    spec.hidden_activation = Activation::Relu;
    spec.output_activation = Activation::Softmax;
    spec.seed = cfg.seed;
    Mlp model("dnn", spec);
    ParameterStore store;
    model.register_params(store);
    DnnTrainConfig dc{cfg.epochs, cfg.batch_size, cfg.learning_rate, cfg.seed};
    const auto records = train_dnn(model, store, train_set.x, train_set.y, test_set.x, test_set.y, dc);
    write_dnn_metrics(records, metrics);
    store.save(cfg.output_dir / "params.txt");
    art.other_files.push_back(cfg.output_dir / "params.txt");

    if (!cfg.compare_run.empty()) {
      const auto other = read_key_values(cfg.compare_run / "config.echo");
      auto it = other.find("feature_checksum");
      if (it == other.end() || it->second != hex(art.feature_checksum)) {
        throw DataError("feature matrix differs from the compared run in " + cfg.compare_run.string());
      }
      const MetricsLog ltn_log = read_metrics_csv(cfg.compare_run / "metrics.csv");
      std::string text = "epoch,ltn_acc_train,ltn_acc_test,dnn_acc_train,dnn_acc_test\n";
      const auto n = std::min(ltn_log.records().size(), records.size());
      for (std::size_t e = 0; e < n; ++e) {
        const auto& l = ltn_log.records()[e];
        const auto& d = records[e];
        text += std::to_string(d.epoch) + "," + format_fixed6(l.acc_train) + "," + format_fixed6(l.acc_test) + "," +
                format_fixed6(d.acc_train) + "," + format_fixed6(d.acc_test) + "\n";
      }
      write_text(cfg.output_dir / "comparison.csv", text);
      art.other_files.push_back(cfg.output_dir / "comparison.csv");
    }
  } else {
    KnowledgeBase kb = make_kb(cfg, p);
    const MetricsLog log = train(kb, make_task(p), train_set, test_set, train_config(cfg, load_queries(cfg, p)));
    write_metrics_csv(log, metrics);
    kb.grounding.params.save(cfg.output_dir / "params.txt");
    art.other_files.push_back(cfg.output_dir / "params.txt");
  }
  art.metrics_csvs.push_back(metrics);
  add_plots(art, metrics, plots, "");
  art.config_echo = cfg.output_dir / "config.echo";
  write_echo(cfg, art.config_echo, derived);
  return art;
}

RunArtifacts run_regression(const ExperimentConfig& cfg, const Prepared& p) {
  RunArtifacts art;
  art.feature_checksum = array_checksum(p.data.x);

  const std::string label_column = cfg.label_column.empty() ? default_label_column(cfg.experiment) : cfg.label_column;
  DatasetTable vtable = preprocess(cfg, load_source(cfg, cfg.validation_data, cfg.validation_n, cfg.data_seed + 1000),
                                   label_column);
  const Encoded validation = encode(vtable, p.spec);
  const std::vector<double> y_val(validation.y.data().begin(), validation.y.data().end());

  const Dataset all{p.data.x, p.data.y};
  const FoldPlan plan = kfold(p.rows, cfg.k, cfg.seed);
  const TaskSpec task = make_task(p);
  std::string summary = "fold,rows_train,rows_test,rmse_test,rmse_validation\n";
  for (std::size_t f = 0; f < plan.k; ++f) {
    const auto train_idx = plan.train_indices(f);
    const Dataset train_set = all.subset(train_idx);
    const Dataset test_set = all.subset(plan.folds[f]);
    KnowledgeBase kb = make_kb(cfg, p);
    const MetricsLog log = train(kb, task, train_set, test_set, train_config(cfg, load_queries(cfg, p)));

    const std::string stem = "fold" + std::to_string(f + 1);
    const fs::path metrics = cfg.output_dir / (stem + "_metrics.csv");
    write_metrics_csv(log, metrics);
    art.metrics_csvs.push_back(metrics);
    add_plots(art, metrics, cfg.output_dir / "plots", stem + "_");

    const Array pred_test = predict(kb.grounding, task, test_set.x);
    const Array pred_val = predict(kb.grounding, task, validation.x);
    const double rmse_test = rmse(pred_test.data(), test_set.y.data());
    const double rmse_val = rmse(pred_val.data(), validation.y.data());
    art.test_rmse.push_back(rmse_test);
    art.validation_rmse.push_back(rmse_val);
    art.validation_predictions.emplace_back(pred_val.data().begin(), pred_val.data().end());

    const fs::path predictions = cfg.output_dir / (stem + "_predictions.csv");
    write_prediction_csv(y_val, art.validation_predictions.back(), predictions);
    art.prediction_csvs.push_back(predictions);
    kb.grounding.params.save(cfg.output_dir / (stem + "_params.txt"));
    art.other_files.push_back(cfg.output_dir / (stem + "_params.txt"));

    summary += std::to_string(f + 1) + "," + std::to_string(train_idx.size()) + "," +
               std::to_string(plan.folds[f].size()) + "," + format_fixed6(rmse_test) + "," + format_fixed6(rmse_val) +
               "\n";
  }
  write_text(cfg.output_dir / "folds.csv", summary);
  art.other_files.push_back(cfg.output_dir / "folds.csv");
  art.config_echo = cfg.output_dir / "config.echo";
  write_echo(cfg, art.config_echo,
             {{"feature_checksum", hex(art.feature_checksum)},
              {"rows", std::to_string(p.rows)},
              {"rows_validation", std::to_string(vtable.size())}});
  return art;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ProtocolKb: return "protocol-kb";
    case ExperimentKind::KddMultilabelLtn: return "kdd-multilabel-ltn";
    case ExperimentKind::KddDnn: return "kdd-dnn";
    case ExperimentKind::CicSinglelabel: return "cic-singlelabel";
    case ExperimentKind::BeamRegression: return "beam-regression";
  }
  return "?";
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"protocol-kb", "kdd-multilabel-ltn", "kdd-dnn", "cic-singlelabel",
                                              "beam-regression"};
  return names;
}

ExperimentKind experiment_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::ProtocolKb, ExperimentKind::KddMultilabelLtn, ExperimentKind::KddDnn,
                 ExperimentKind::CicSinglelabel, ExperimentKind::BeamRegression}) {
    if (to_string(k) == s) return k;
  }
  throw Error("unknown experiment '" + s + "' (valid: " + join(experiment_names()) + ")");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "experiment", "data",       "schema",         "synth",          "synth_n",       "data_seed",
      "label_column", "features", "test_fraction",  "validation_data", "validation_n", "axioms",
      "queries",    "epochs",     "batch_size",     "learning_rate",  "seed",          "hidden",
      "p_train",    "p_forall_query", "p_exists_query", "axiom_p",    "k",             "distance",
      "minkowski_p", "compare_run", "output_dir"};
  return keys;
}

void ExperimentConfig::set(const std::string& key, const std::string& raw, const fs::path& base) {
  const std::string value = trim(raw);
  auto path = [&]() -> fs::path {
    if (value.empty()) return {};
    fs::path p(value);
    return p.is_absolute() || base.empty() ? p : (base / p).lexically_normal();
  };
  if (key == "experiment") experiment = experiment_from_string(value);
  else if (key == "data") data = path();
  else if (key == "schema") schema = path();
  else if (key == "synth") synth = value;
  else if (key == "synth_n") synth_n = parse_value<std::size_t>(key, value);
  else if (key == "data_seed") data_seed = parse_value<std::uint64_t>(key, value);
  else if (key == "label_column") label_column = value;
  else if (key == "features") features = split_list(value);
  else if (key == "test_fraction") test_fraction = parse_value<double>(key, value);
  else if (key == "validation_data") validation_data = path();
  else if (key == "validation_n") validation_n = parse_value<std::size_t>(key, value);
  else if (key == "axioms") axioms = path();
  else if (key == "queries") queries = path();
  else if (key == "epochs") epochs = parse_value<std::size_t>(key, value);
  else if (key == "batch_size") batch_size = parse_value<std::size_t>(key, value);
  else if (key == "learning_rate") learning_rate = parse_value<double>(key, value);
  else if (key == "seed") seed = parse_value<std::uint64_t>(key, value);
  else if (key == "hidden") {
    hidden.clear();
    for (const auto& item : split_list(value)) hidden.push_back(parse_value<std::size_t>(key, item));
  }
  else if (key == "p_train") p_train = parse_value<double>(key, value);
  else if (key == "p_forall_query") p_forall_query = parse_value<double>(key, value);
  else if (key == "p_exists_query") p_exists_query = parse_value<double>(key, value);
  else if (key == "axiom_p") axiom_p = parse_value<double>(key, value);
  else if (key == "k") k = parse_value<std::size_t>(key, value);
  else if (key == "distance") distance = value;
  else if (key == "minkowski_p") minkowski_p = parse_value<double>(key, value);
  else if (key == "compare_run") compare_run = path();
  else if (key == "output_dir") output_dir = path();
  else if (std::find(kDerivedKeys.begin(), kDerivedKeys.end(), key) != kDerivedKeys.end() ||
           key == "rows_validation") {
    // echo-file outputs, not inputs
  } else {
    throw Error("unknown config key '" + key + "'");
  }
}

void ExperimentConfig::validate() const {
  if (batch_size == 0) throw Error("batch_size must be at least 1");
  if (!(learning_rate > 0)) throw Error("learning_rate must be positive");
  if (!(test_fraction > 0 && test_fraction < 1)) throw Error("test_fraction must lie in (0, 1)");
  if (hidden.empty()) throw Error("hidden needs at least one layer width");
  QuantifierConfig{p_train, p_forall_query, p_exists_query}.validate();
  if (!(axiom_p >= 1)) throw Error("axiom_p must be at least 1");
  if (!data.empty() && schema.empty()) throw Error("data needs a schema file");
  if (!synth.empty()) synth_kind_from_string(synth);
  if (is_ltn(experiment) && axioms.empty()) throw Error(to_string(experiment) + " needs an axioms file");
  if (!compare_run.empty() && experiment != ExperimentKind::KddDnn) {
    throw Error("compare_run applies only to kdd-dnn");
  }
  if (experiment == ExperimentKind::BeamRegression) {
    if (k < 2) throw Error("k must be at least 2");
    const auto d = distance_from_string(distance);
    if (d == Distance::Minkowski && !(minkowski_p >= 1)) throw Error("minkowski_p must be at least 1");
    if (!validation_data.empty() && data.empty()) throw Error("validation_data needs data and schema");
  }
}

std::string ExperimentConfig::to_text() const {
  std::string hidden_text;
  for (std::size_t i = 0; i < hidden.size(); ++i) hidden_text += (i ? "," : "") + std::to_string(hidden[i]);
  const bool beam = experiment == ExperimentKind::BeamRegression;
  const std::string label = label_column.empty() ? default_label_column(experiment) : label_column;
  std::vector<std::pair<std::string, std::string>> kv{
      {"experiment", to_string(experiment)},
      {"data", path_text(data)},
      {"schema", path_text(schema)},
      {"synth", data.empty() ? (synth.empty() ? to_string(default_synth(experiment)) : synth) : ""},
      {"synth_n", std::to_string(synth_n)},
      {"data_seed", std::to_string(data_seed)},
      {"label_column", label},
      {"features", join(features)},
      {"test_fraction", number_text(test_fraction)},
      {"axioms", path_text(axioms)},
      {"queries", path_text(queries)},
      {"epochs", std::to_string(epochs)},
      {"batch_size", std::to_string(batch_size)},
      {"learning_rate", number_text(learning_rate)},
      {"seed", std::to_string(seed)},
      {"hidden", hidden_text},
      {"p_train", number_text(p_train)},
      {"p_forall_query", number_text(p_forall_query)},
      {"p_exists_query", number_text(p_exists_query)},
      {"axiom_p", number_text(axiom_p)},
  };
  if (beam) {
    kv.insert(kv.end(), {{"validation_data", path_text(validation_data)},
                         {"validation_n", std::to_string(validation_n)},
                         {"k", std::to_string(k)},
                         {"distance", distance},
                         {"minkowski_p", number_text(minkowski_p)}});
  }
  if (!compare_run.empty()) kv.emplace_back("compare_run", path_text(compare_run));
  kv.emplace_back("output_dir", path_text(output_dir));
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void load_config_file(ExperimentConfig& config, const fs::path& path) {
  const auto base = fs::absolute(path).parent_path();
  const auto kv = read_key_values(path);
  // the experiment first, so later checks see it
  if (auto it = kv.find("experiment"); it != kv.end()) config.set("experiment", it->second, base);
  for (const auto& [k, v] : kv) {
    if (k == "experiment") continue;
    config.set(k, v, base);
  }
}

std::vector<fs::path> RunArtifacts::all_files() const {
  std::vector<fs::path> out = metrics_csvs;
  out.insert(out.end(), prediction_csvs.begin(), prediction_csvs.end());
  out.push_back(config_echo);
  out.insert(out.end(), plot_files.begin(), plot_files.end());
  out.insert(out.end(), other_files.begin(), other_files.end());
  return out;
}

RunArtifacts run_experiment(const ExperimentConfig& config) {
  config.validate();
  fs::create_directories(config.output_dir);
  const Prepared p = prepare(config);
  return config.experiment == ExperimentKind::BeamRegression ? run_regression(config, p)
                                                             : run_classification(config, p);
}

std::vector<fs::path> emit_plot_data(const fs::path& metrics_csv, const fs::path& out_dir, const std::string& prefix) {
  std::ifstream in(metrics_csv);
  if (!in) throw Error("cannot read " + metrics_csv.string());
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw Error(metrics_csv.string() + ": empty metrics file");
  const auto header = split_list(line);
  if (header.size() < 2 || header[0] != "epoch") {
    throw Error(metrics_csv.string() + ": header must start with 'epoch' and name at least one metric");
  }
  std::vector<std::string> series(header.size() - 1);
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(trim(f));
    if (fields.size() != header.size()) {
      throw Error(metrics_csv.string() + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(header.size()) + " fields");
    }
    for (const auto& v : fields) {
      char* end = nullptr;
      std::strtod(v.c_str(), &end);
      if (v.empty() || end != v.c_str() + v.size()) {
        throw Error(metrics_csv.string() + ":" + std::to_string(line_no) + ": '" + v + "' is not a number");
      }
    }
    for (std::size_t c = 1; c < fields.size(); ++c) series[c - 1] += fields[0] + "," + fields[c] + "\n";
    ++rows;
  }
  if (rows == 0) throw Error(metrics_csv.string() + ": no metric rows");
  fs::create_directories(out_dir);
  std::vector<fs::path> out;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const fs::path path = out_dir / (prefix + header[c] + ".csv");
    write_text(path, "epoch," + header[c] + "\n" + series[c - 1]);
    out.push_back(path);
  }
  return out;
}

}  // namespace ltn
