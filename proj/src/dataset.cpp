#include "fedbench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "fedbench/errors.hpp"
#include "fedbench/rng.hpp"

namespace fedbench::data {

void DatasetPartition::validate() const {
  if (features.size() != ids.size())
    throw InvalidDatasetError("row count does not match id count");
  if (labels && labels->size() != ids.size())
    throw InvalidDatasetError("label count does not match id count");
  for (const auto& row : features)
    if (row.size() != feature_names.size())
      throw InvalidDatasetError("ragged feature row");
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (id.empty()) throw InvalidDatasetError("empty sample id");
    if (!seen.insert(id).second) throw InvalidDatasetError("duplicate sample id '" + id + "'");
  }
}

namespace {

void scale_columns(std::vector<std::vector<double>>& rows, FeatureScaling scaling) {
  if (scaling == FeatureScaling::None || rows.empty()) return;
  size_t cols = rows[0].size();
  auto n = static_cast<double>(rows.size());
  for (size_t j = 0; j < cols; ++j) {
    double mean = 0;
    for (const auto& r : rows) mean += r[j];
    mean /= n;
    double sq = 0;
    for (const auto& r : rows) sq += (r[j] - mean) * (r[j] - mean);
    double denom = scaling == FeatureScaling::Standardize ? std::sqrt(sq / n) : std::sqrt(sq);
    if (denom == 0) denom = 1;
    for (auto& r : rows) r[j] = (r[j] - mean) / denom;
  }
}

std::string row_id(size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "user-%08zu", i);
  return buf;
}

}  // namespace

DatasetPartition generate_pooled(const SyntheticSpec& spec) {
  size_t n_features = spec.n_features_a + spec.n_features_b;
  if (n_features == 0) throw InvalidParameterError("synthetic spec needs at least one feature");
  if (!spec.true_weights.empty() && spec.true_weights.size() != n_features)
    throw InvalidParameterError("true_weights length must match the feature count");
  if (spec.noise_sigma < 0) throw InvalidParameterError("noise_sigma must be nonnegative");

  std::vector<double> weights = spec.true_weights;
  if (weights.empty()) weights.assign(n_features, 1.0);

  size_t total_rows = spec.n_samples + spec.extra_rows_a + spec.extra_rows_b;
  std::mt19937_64 gen(mix_seed(spec.seed));
  std::normal_distribution<double> normal(0.0, 1.0);

  DatasetPartition out;
  out.ids.reserve(total_rows);
  out.features.reserve(total_rows);
  for (size_t j = 0; j < n_features; ++j) {
    std::string prefix = j < spec.n_features_a ? "a" : "b";
    size_t local = j < spec.n_features_a ? j : j - spec.n_features_a;
    out.feature_names.push_back(prefix + std::to_string(local));
  }
  for (size_t i = 0; i < total_rows; ++i) {
    out.ids.push_back(row_id(i));
    std::vector<double> row(n_features);
    for (auto& v : row) v = normal(gen);
    out.features.push_back(std::move(row));
  }
  scale_columns(out.features, spec.scaling);

  std::vector<double> y(total_rows, 0.0);
  for (size_t i = 0; i < total_rows; ++i) {
    for (size_t j = 0; j < n_features; ++j) y[i] += weights[j] * out.features[i][j];
    if (spec.noise_sigma > 0) y[i] += spec.noise_sigma * normal(gen);
  }
  out.labels = std::move(y);
  out.validate();
  return out;
}

DatasetPartition select_rows(const DatasetPartition& dataset, const std::vector<size_t>& rows) {
  DatasetPartition out;
  out.feature_names = dataset.feature_names;
  if (dataset.labels) out.labels.emplace();
  for (size_t i : rows) {
    if (i >= dataset.sample_count()) throw InvalidParameterError("row index out of range");
    out.ids.push_back(dataset.ids[i]);
    out.features.push_back(dataset.features[i]);
    if (dataset.labels) out.labels->push_back((*dataset.labels)[i]);
  }
  return out;
}

std::pair<DatasetPartition, DatasetPartition> generate(const SyntheticSpec& spec) {
  DatasetPartition pooled = generate_pooled(spec);

  std::vector<size_t> a_cols(spec.n_features_a);
  std::iota(a_cols.begin(), a_cols.end(), 0);
  auto [part_a, part_b] = partition_vertical(pooled, a_cols);

  size_t common = spec.n_samples;
  std::vector<size_t> rows_a(common), rows_b(common);
  std::iota(rows_a.begin(), rows_a.end(), 0);
  std::iota(rows_b.begin(), rows_b.end(), 0);
  for (size_t i = 0; i < spec.extra_rows_a; ++i) rows_a.push_back(common + i);
  for (size_t i = 0; i < spec.extra_rows_b; ++i) rows_b.push_back(common + spec.extra_rows_a + i);

  std::mt19937_64 shuffler_a(derive_seed(spec.seed, 0xa11));
  std::mt19937_64 shuffler_b(derive_seed(spec.seed, 0xb22));
  std::shuffle(rows_a.begin(), rows_a.end(), shuffler_a);
  std::shuffle(rows_b.begin(), rows_b.end(), shuffler_b);

  return {select_rows(part_a, rows_a), select_rows(part_b, rows_b)};
}

std::vector<DatasetPartition> partition_horizontal(const DatasetPartition& dataset, size_t k,
                                                   SplitScheme scheme, uint64_t seed) {
  dataset.validate();
  if (k < 1) throw InvalidParameterError("horizontal split needs k >= 1");
  if (k > dataset.sample_count())
    throw InvalidParameterError("cannot split " + std::to_string(dataset.sample_count()) +
                                " rows into " + std::to_string(k) + " parts");

  std::vector<size_t> order(dataset.sample_count());
  std::iota(order.begin(), order.end(), 0);
  if (scheme == SplitScheme::Iid) {
    std::mt19937_64 gen(mix_seed(seed));
    std::shuffle(order.begin(), order.end(), gen);
  } else {
    if (!dataset.labels) throw InvalidDatasetError("label-skew split requires labels");
    std::stable_sort(order.begin(), order.end(), [&](size_t lhs, size_t rhs) {
      return (*dataset.labels)[lhs] < (*dataset.labels)[rhs];
    });
  }

  std::vector<DatasetPartition> parts;
  size_t n = order.size();
  size_t base = n / k, rem = n % k;
  size_t cursor = 0;
  for (size_t part = 0; part < k; ++part) {
    size_t take = base + (part < rem ? 1 : 0);
    std::vector<size_t> rows(order.begin() + cursor, order.begin() + cursor + take);
    cursor += take;
    parts.push_back(select_rows(dataset, rows));
  }
  return parts;
}

std::pair<DatasetPartition, DatasetPartition> partition_vertical(
    const DatasetPartition& dataset, const std::vector<size_t>& a_columns) {
  dataset.validate();
  if (!dataset.labels) throw InvalidDatasetError("vertical split requires a labeled dataset");
  std::set<size_t> a_set(a_columns.begin(), a_columns.end());
  for (size_t c : a_set)
    if (c >= dataset.feature_count()) throw InvalidParameterError("split column out of range");
  if (a_set.empty() || a_set.size() >= dataset.feature_count())
    throw InvalidParameterError("vertical split must leave both sides at least one feature");

  DatasetPartition a, b;
  a.ids = b.ids = dataset.ids;
  b.labels = dataset.labels;
  for (size_t j = 0; j < dataset.feature_count(); ++j)
    (a_set.count(j) ? a : b).feature_names.push_back(dataset.feature_names[j]);
  for (const auto& row : dataset.features) {
    std::vector<double> ra, rb;
    for (size_t j = 0; j < row.size(); ++j) (a_set.count(j) ? ra : rb).push_back(row[j]);
    a.features.push_back(std::move(ra));
    b.features.push_back(std::move(rb));
  }
  return {std::move(a), std::move(b)};
}

const char* partition_class_name(PartitionClass c) {
  switch (c) {
    case PartitionClass::Horizontal: return "horizontal";
    case PartitionClass::Vertical: return "vertical";
    case PartitionClass::Transfer: return "transfer";
    case PartitionClass::Mixed: return "mixed";
  }
  return "?";
}

PartitionClass classify_partition(const std::vector<DatasetPartition>& parts) {
  if (parts.size() < 2) throw InvalidParameterError("classification needs at least two parts");
  for (const auto& p : parts) p.validate();

  bool same_schema = true, disjoint_schema = true;
  bool same_ids = true, disjoint_ids = true;
  for (size_t i = 0; i < parts.size(); ++i) {
    for (size_t j = i + 1; j < parts.size(); ++j) {
      const auto& pi = parts[i];
      const auto& pj = parts[j];
      if (pi.feature_names != pj.feature_names) same_schema = false;
      std::set<std::string> fi(pi.feature_names.begin(), pi.feature_names.end());
      for (const auto& name : pj.feature_names)
        if (fi.count(name)) disjoint_schema = false;

      std::set<std::string> ids_i(pi.ids.begin(), pi.ids.end());
      std::set<std::string> ids_j(pj.ids.begin(), pj.ids.end());
      if (ids_i != ids_j) same_ids = false;
      for (const auto& id : ids_j)
        if (ids_i.count(id)) disjoint_ids = false;
    }
  }

  if (same_schema && disjoint_ids) return PartitionClass::Horizontal;
  if (same_ids && disjoint_schema) return PartitionClass::Vertical;
  if (disjoint_ids && disjoint_schema) return PartitionClass::Transfer;
  return PartitionClass::Mixed;
}

void write_csv(const DatasetPartition& dataset, const std::string& path) {
  dataset.validate();
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "id";
  for (const auto& name : dataset.feature_names) out << "," << name;
  if (dataset.labels) out << ",label";
  out << "\n";
  char buf[64];
  for (size_t i = 0; i < dataset.sample_count(); ++i) {
    out << dataset.ids[i];
    for (double v : dataset.features[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << "," << buf;
    }
    if (dataset.labels) {
      std::snprintf(buf, sizeof(buf), "%.17g", (*dataset.labels)[i]);
      out << "," << buf;
    }
    out << "\n";
  }
}

DatasetPartition read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InvalidDatasetError("empty csv: " + path);

  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(s);
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    return cells;
  };

  std::vector<std::string> header = split(line);
  if (header.empty() || header[0] != "id")
    throw InvalidDatasetError("csv must start with an 'id' column: " + path);
  bool labeled = !header.empty() && header.back() == "label";

  DatasetPartition out;
  out.feature_names.assign(header.begin() + 1, header.end() - (labeled ? 1 : 0));
  if (labeled) out.labels.emplace();
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells = split(line);
    if (cells.size() != header.size())
      throw InvalidDatasetError("csv row " + std::to_string(line_no) + " has " +
                                std::to_string(cells.size()) + " cells, expected " +
                                std::to_string(header.size()));
    out.ids.push_back(cells[0]);
    std::vector<double> row;
    for (size_t j = 1; j < cells.size() - (labeled ? 1 : 0); ++j)
      row.push_back(std::stod(cells[j]));
    out.features.push_back(std::move(row));
    if (labeled) out.labels->push_back(std::stod(cells.back()));
  }
  out.validate();
  return out;
}

std::pair<DatasetPartition, DatasetPartition> train_test_split(const DatasetPartition& dataset,
                                                               double test_fraction,
                                                               uint64_t seed) {
  if (test_fraction < 0 || test_fraction >= 1)
    throw InvalidParameterError("test_fraction must be in [0, 1)");
  std::vector<size_t> order(dataset.sample_count());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 gen(mix_seed(seed));
  std::shuffle(order.begin(), order.end(), gen);
  auto test_n = static_cast<size_t>(std::ceil(test_fraction * dataset.sample_count()));
  std::vector<size_t> test_rows(order.begin(), order.begin() + test_n);
  std::vector<size_t> train_rows(order.begin() + test_n, order.end());
  // keep row order stable within each side
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  return {select_rows(dataset, train_rows), select_rows(dataset, test_rows)};
}

}  // namespace fedbench::data
