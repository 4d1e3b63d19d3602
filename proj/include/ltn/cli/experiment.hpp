#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ltn {

enum class ExperimentKind { ProtocolKb, KddMultilabelLtn, KddDnn, CicSinglelabel, BeamRegression };

std::string to_string(ExperimentKind k);
/// Throws Error listing the valid names.
ExperimentKind experiment_from_string(const std::string& s);
const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::KddMultilabelLtn;

  // data: a CSV with its schema, or a synthetic generator
  std::filesystem::path data;
  std::filesystem::path schema;
  std::string synth;  // empty means the experiment's default generator
  std::size_t synth_n = 2000;
  std::uint64_t data_seed = 1;
  std::string label_column;            // empty: experiment default
  std::vector<std::string> features;   // empty: experiment default
  double test_fraction = 0.2;

  // beam-regression validation set: CSV, or synthetic rows
  std::filesystem::path validation_data;
  std::size_t validation_n = 90;

  std::filesystem::path axioms;
  std::filesystem::path queries;

  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  double learning_rate = 0.001;
  std::uint64_t seed = 1;
  std::vector<std::size_t> hidden = {64, 64};
  double p_train = 2.0;
  double p_forall_query = 4.0;
  double p_exists_query = 6.0;
  double axiom_p = 2.0;

  std::size_t k = 2;
  std::string distance = "euclidean";
  double minkowski_p = 2.0;

  /// kdd-dnn: directory of a kdd-multilabel-ltn run to compare against
  std::filesystem::path compare_run;

  std::filesystem::path output_dir = "out";

  /// Sets one field from its key=value form. Relative paths are taken
  /// relative to `base`. Throws Error on unknown keys or bad values.
  void set(const std::string& key, const std::string& value, const std::filesystem::path& base = {});
  /// Checks experiment-specific requirements.
  void validate() const;
  /// Every key with its resolved value, one key=value per line.
  std::string to_text() const;
};

/// Reads flat key=value lines ("#" comments) on top of `config`.
void load_config_file(ExperimentConfig& config, const std::filesystem::path& path);

/// Keys that ExperimentConfig::set accepts.
const std::vector<std::string>& config_keys();

struct RunArtifacts {
  std::vector<std::filesystem::path> metrics_csvs;     // one per training run (fold)
  std::vector<std::filesystem::path> prediction_csvs;  // regression: one per fold
  std::filesystem::path config_echo;
  std::vector<std::filesystem::path> plot_files;
  std::vector<std::filesystem::path> other_files;
  std::uint64_t feature_checksum = 0;
  /// regression: validation-set predictions per fold, in validation row order
  std::vector<std::vector<double>> validation_predictions;
  std::vector<double> validation_rmse;
  std::vector<double> test_rmse;

  std::vector<std::filesystem::path> all_files() const;
};

RunArtifacts run_experiment(const ExperimentConfig& config);

/// Writes one file "<prefix><column>.csv" with header "epoch,<column>"
/// per non-epoch column of a metrics CSV, copying the value text as is.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& metrics_csv,
                                                  const std::filesystem::path& out_dir,
                                                  const std::string& prefix = "");

/// Reads a key=value echo file into a map (comments skipped).
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

}  // namespace ltn
