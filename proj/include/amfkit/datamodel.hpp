/**
 * Copyright 2026 The amfkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "amfkit/numerics.hpp"

namespace amfkit {

/// Soft labels at or above this value count as AMF (positive) wherever a
/// binary class is needed: census, stratification, mining, confusion matrices.
inline constexpr double kHardLabelThreshold = 0.5;

inline int hard_label(double soft_label) { return soft_label >= kHardLabelThreshold ? 1 : 0; }

struct Sample {
  std::string id;
  std::string domain;
  double label = 0.0;  // AMF probability, mean of annotator votes
  std::vector<double> features;
  std::optional<Matrix> patch;
};

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t total() const { return positives + negatives; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

/// Immutable collection of samples sharing one feature dimension.
///
/// Domains are kept sorted; `domain_index` maps a sample's key to its
/// position in that order, which is also the domain head's output index.
class DatasetTable {
 public:
  DatasetTable() = default;
  /// Validates labels, feature dimension, finiteness and id uniqueness.
  /// `dim` is only consulted when `samples` is empty.
  explicit DatasetTable(std::vector<Sample> samples, std::size_t dim = 0);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::size_t dim() const { return dim_; }

  const std::vector<Sample>& samples() const { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

  const std::vector<std::string>& domains() const { return domains_; }
  std::size_t domain_index(const std::string& key) const;
  const std::map<std::string, ClassCounts>& census() const { return census_; }
  ClassCounts totals() const;

  std::vector<double> labels() const;
  std::vector<int> hard_labels() const;
  /// Row i holds sample i's features.
  Matrix feature_matrix() const;

  std::optional<std::size_t> find(const std::string& id) const;
  /// Sub-table of the given ids, in this table's order.
  DatasetTable subset(const std::vector<std::string>& ids) const;

 private:
  std::vector<Sample> samples_;
  std::size_t dim_ = 0;
  std::vector<std::string> domains_;
  std::map<std::string, ClassCounts> census_;
  std::map<std::string, std::size_t> id_index_;
};

std::map<std::string, ClassCounts> compute_census(const std::vector<Sample>& samples);

// --- files ------------------------------------------------------------------

/// Header `id,domain,label,f0..f{d-1}`. Errors carry the 1-based line number.
DatasetTable load_csv(const std::filesystem::path& path);
DatasetTable parse_csv(const std::string& text);
/// Shortest round-trip decimal formatting, so identical tables give identical bytes.
void save_csv(const DatasetTable& table, const std::filesystem::path& path);
std::string format_csv(const DatasetTable& table);

/// EMB1 little-endian container:
///   "EMB1" | u32 n | u32 d | n x {u32 id_len, id, u32 dom_len, dom, f32 label, d x f32}
/// Values are narrowed to f32 on save; load widens exactly.
DatasetTable load_embeddings_binary(const std::filesystem::path& path);
DatasetTable parse_embeddings_binary(const std::string& bytes);
void save_embeddings_binary(const DatasetTable& table, const std::filesystem::path& path);
std::string encode_embeddings_binary(const DatasetTable& table);

// --- splits -----------------------------------------------------------------

enum class SplitStrategy { kStratified, kLodo };

/// For stratified plans `monitor_ids` is the early-stopping holdout; for LODO
/// plans it is the held-out domain's evaluation set.
struct SplitPlan {
  std::vector<std::string> train_ids;
  std::vector<std::string> monitor_ids;
  SplitStrategy strategy = SplitStrategy::kStratified;
  std::string held_out_domain;  // LODO only
};

/// Per hard-label stratum, round(fraction * stratum size) samples go to the
/// monitor after an rng shuffle. Id lists follow table order.
SplitPlan stratified_split(const DatasetTable& table, double monitor_fraction, Rng& rng);

/// One plan per domain, in sorted domain order.
std::vector<SplitPlan> lodo_folds(const DatasetTable& table);

// --- synthetic data -----------------------------------------------------------

/// Gaussian (class, domain) clusters with three simulated annotators per
/// sample. Defaults: 10 domains, 12000 samples, 14.8% AMF overall,
/// per-domain prevalence between 7.4% and 25%.
struct SyntheticSpec {
  std::vector<std::size_t> domain_sizes{2500, 400, 960, 1280, 1600, 1200, 800, 1440, 1040, 780};
  std::vector<double> prevalence{0.074, 0.25, 0.125, 0.15, 0.125, 0.19, 0.24, 0.14, 0.18, 0.218};
  std::size_t feature_dim = 16;
  double separation = 3.0;    // distance between class means along axis 0
  double domain_shift = 1.5;  // norm of each domain's random offset
  double annotator_flip = 0.3;   // flip probability at the decision boundary
  double annotator_scale = 1.0;  // distance over which flip probability decays by 1/e
  std::size_t patch_size = 0;    // 0 disables patches

  std::size_t domain_count() const { return domain_sizes.size(); }
  /// Keys "d00", "d01", ...
  static std::string domain_key(std::size_t i);
  void validate() const;
};

DatasetTable generate_synthetic(const SyntheticSpec& spec, Rng& rng);

/// Plain-text census: per-domain counts and AMF fractions plus the pooled totals.
std::string format_census(const DatasetTable& table);

}  // namespace amfkit
