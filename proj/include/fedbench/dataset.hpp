#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fedbench::data {

// One party's local view: sample ids, feature matrix, optional labels.
struct DatasetPartition {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> features;  // row-major, ids.size() rows
  std::optional<std::vector<double>> labels;
  std::vector<std::string> feature_names;

  size_t sample_count() const { return ids.size(); }
  size_t feature_count() const { return feature_names.size(); }
  bool has_labels() const { return labels.has_value(); }
  // Throws InvalidDatasetError on ragged rows, duplicate ids, or a
  // feature_names/width mismatch.
  void validate() const;
};

enum class FeatureScaling {
  None,
  Standardize,  // zero mean, unit variance per column
  UnitNorm,     // zero mean, unit l2 norm per column (var 1/N); keeps
                // sum-form gradients well-conditioned at plain step sizes
};

struct SyntheticSpec {
  size_t n_samples = 0;
  size_t n_features_a = 0;
  size_t n_features_b = 0;
  std::vector<double> true_weights;  // length n_features_a + n_features_b
  double noise_sigma = 0.0;
  uint64_t seed = 0;
  FeatureScaling scaling = FeatureScaling::UnitNorm;
  // Rows held by only one side, to give entity alignment something to do.
  size_t extra_rows_a = 0;
  size_t extra_rows_b = 0;
};

// Labeled pooled dataset: y = X w + noise, features scaled per spec.
DatasetPartition generate_pooled(const SyntheticSpec& spec);

// Vertical pair: A holds the first n_features_a columns without labels,
// B the rest plus labels. Row order is shuffled independently per side
// and extra_rows_* non-overlapping rows are mixed in.
std::pair<DatasetPartition, DatasetPartition> generate(const SyntheticSpec& spec);

enum class SplitScheme { Iid, LabelSkew };

std::vector<DatasetPartition> partition_horizontal(const DatasetPartition& dataset, size_t k,
                                                   SplitScheme scheme, uint64_t seed);

// A keeps the listed column indices (labels dropped), B the complement
// plus the labels.
std::pair<DatasetPartition, DatasetPartition> partition_vertical(
    const DatasetPartition& dataset, const std::vector<size_t>& a_columns);

enum class PartitionClass { Horizontal, Vertical, Transfer, Mixed };
const char* partition_class_name(PartitionClass c);

PartitionClass classify_partition(const std::vector<DatasetPartition>& parts);

// CSV with a header row; first column "id", optional last column "label".
void write_csv(const DatasetPartition& dataset, const std::string& path);
DatasetPartition read_csv(const std::string& path);

// Deterministic row split; second element holds ceil(test_fraction * N).
std::pair<DatasetPartition, DatasetPartition> train_test_split(const DatasetPartition& dataset,
                                                               double test_fraction,
                                                               uint64_t seed);

DatasetPartition select_rows(const DatasetPartition& dataset, const std::vector<size_t>& rows);

}  // namespace fedbench::data
