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

#include "amfkit/datamodel.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "amfkit/errors.hpp"
#include "amfkit/format.hpp"

namespace amfkit {

std::map<std::string, ClassCounts> compute_census(const std::vector<Sample>& samples) {
  std::map<std::string, ClassCounts> census;
  for (const auto& s : samples) {
    auto& counts = census[s.domain];
    if (hard_label(s.label) == 1)
      ++counts.positives;
    else
      ++counts.negatives;
  }
  return census;
}

DatasetTable::DatasetTable(std::vector<Sample> samples, std::size_t dim)
    : samples_(std::move(samples)), dim_(samples_.empty() ? dim : samples_.front().features.size()) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!(s.label >= 0.0 && s.label <= 1.0)) {
      throw ValidationError("sample '" + s.id + "': label " + format_real(s.label) + " outside [0,1]");
    }
    if (s.features.size() != dim_) {
      throw ValidationError("sample '" + s.id + "': feature dimension " +
                            std::to_string(s.features.size()) + ", expected " + std::to_string(dim_));
    }
    for (double f : s.features)
      if (!std::isfinite(f)) throw ValidationError("sample '" + s.id + "': non-finite feature");
    if (!id_index_.emplace(s.id, i).second) {
      throw ValidationError("duplicate sample id '" + s.id + "'");
    }
  }
  census_ = compute_census(samples_);
  for (const auto& [key, counts] : census_) domains_.push_back(key);
}

std::size_t DatasetTable::domain_index(const std::string& key) const {
  auto it = std::lower_bound(domains_.begin(), domains_.end(), key);
  if (it == domains_.end() || *it != key) throw ValidationError("unknown domain '" + key + "'");
  return static_cast<std::size_t>(it - domains_.begin());
}

ClassCounts DatasetTable::totals() const {
  ClassCounts t;
  for (const auto& [key, c] : census_) {
    t.positives += c.positives;
    t.negatives += c.negatives;
  }
  return t;
}

std::vector<double> DatasetTable::labels() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.label);
  return out;
}

std::vector<int> DatasetTable::hard_labels() const {
  std::vector<int> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(hard_label(s.label));
  return out;
}

Matrix DatasetTable::feature_matrix() const {
  Matrix m(samples_.size(), dim_);
  for (std::size_t i = 0; i < samples_.size(); ++i)
    std::copy(samples_[i].features.begin(), samples_[i].features.end(), m.row(i).begin());
  return m;
}

std::optional<std::size_t> DatasetTable::find(const std::string& id) const {
  auto it = id_index_.find(id);
  if (it == id_index_.end()) return std::nullopt;
  return it->second;
}

DatasetTable DatasetTable::subset(const std::vector<std::string>& ids) const {
  std::vector<std::size_t> idx;
  idx.reserve(ids.size());
  for (const auto& id : ids) {
    auto i = find(id);
    if (!i) throw ValidationError("subset: unknown sample id '" + id + "'");
    idx.push_back(*i);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  std::vector<Sample> picked;
  picked.reserve(idx.size());
  for (auto i : idx) picked.push_back(samples_[i]);
  return DatasetTable(std::move(picked), dim_);
}

// --- CSV ----------------------------------------------------------------------

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& field, std::size_t line_no, const std::string& column) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last || !std::isfinite(v)) {
    throw ValidationError("line " + std::to_string(line_no) + ": column '" + column +
                          "': not a number: '" + field + "'");
  }
  return v;
}

}  // namespace

DatasetTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) {
      header = split_commas(line);
      break;
    }
  }
  if (header.size() < 3 || header[0] != "id" || header[1] != "domain" || header[2] != "label") {
    throw ValidationError("line " + std::to_string(line_no) +
                          ": header must start with id,domain,label");
  }
  const std::size_t dim = header.size() - 3;
  for (std::size_t k = 0; k < dim; ++k) {
    if (header[3 + k] != "f" + std::to_string(k)) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected column 'f" +
                            std::to_string(k) + "', found '" + header[3 + k] + "'");
    }
  }
  std::vector<Sample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size()));
    }
    Sample s;
    s.id = fields[0];
    s.domain = fields[1];
    s.label = parse_number(fields[2], line_no, "label");
    if (s.label < 0.0 || s.label > 1.0) {
      throw ValidationError("line " + std::to_string(line_no) + ": label " + fields[2] +
                            " outside [0,1]");
    }
    s.features.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k)
      s.features.push_back(parse_number(fields[3 + k], line_no, header[3 + k]));
    samples.push_back(std::move(s));
  }
  return DatasetTable(std::move(samples), dim);
}

DatasetTable load_csv(const std::filesystem::path& path) {
  return parse_csv(read_file(path));
}

std::string format_csv(const DatasetTable& table) {
  std::string out = "id,domain,label";
  for (std::size_t k = 0; k < table.dim(); ++k) out += ",f" + std::to_string(k);
  out += '\n';
  for (const auto& s : table.samples()) {
    out += s.id;
    out += ',';
    out += s.domain;
    out += ',';
    out += format_real(s.label);
    for (double f : s.features) {
      out += ',';
      out += format_real(f);
    }
    out += '\n';
  }
  return out;
}

void save_csv(const DatasetTable& table, const std::filesystem::path& path) {
  write_file(path, format_csv(table));
}

// --- EMB1 ---------------------------------------------------------------------

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

class ByteReader {
 public:
  explicit ByteReader(const std::string& bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw ValidationError("EMB1: truncated file at byte " + std::to_string(pos_));
    }
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_embeddings_binary(const DatasetTable& table) {
  std::string out = "EMB1";
  put_u32(out, static_cast<std::uint32_t>(table.size()));
  put_u32(out, static_cast<std::uint32_t>(table.dim()));
  for (const auto& s : table.samples()) {
    put_u32(out, static_cast<std::uint32_t>(s.id.size()));
    out += s.id;
    put_u32(out, static_cast<std::uint32_t>(s.domain.size()));
    out += s.domain;
    put_f32(out, static_cast<float>(s.label));
    for (double f : s.features) put_f32(out, static_cast<float>(f));
  }
  return out;
}

DatasetTable parse_embeddings_binary(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "EMB1") != 0) {
    throw ValidationError("EMB1: bad magic");
  }
  ByteReader rd(bytes);
  rd.str(4);
  const std::uint32_t n = rd.u32();
  const std::uint32_t d = rd.u32();
  std::vector<Sample> samples;
  samples.reserve(std::min<std::size_t>(n, bytes.size() / 16 + 1));
  for (std::uint32_t i = 0; i < n; ++i) {
    Sample s;
    s.id = rd.str(rd.u32());
    s.domain = rd.str(rd.u32());
    const float label = rd.f32();
    if (!(label >= 0.0f && label <= 1.0f)) {
      throw ValidationError("EMB1: record " + std::to_string(i) + ": label outside [0,1]");
    }
    s.label = label;
    s.features.resize(d);
    for (std::uint32_t k = 0; k < d; ++k) s.features[k] = rd.f32();
    samples.push_back(std::move(s));
  }
  return DatasetTable(std::move(samples), d);
}

DatasetTable load_embeddings_binary(const std::filesystem::path& path) {
  return parse_embeddings_binary(read_file(path));
}

void save_embeddings_binary(const DatasetTable& table, const std::filesystem::path& path) {
  write_file(path, encode_embeddings_binary(table));
}

// --- splits -------------------------------------------------------------------

SplitPlan stratified_split(const DatasetTable& table, double monitor_fraction, Rng& rng) {
  if (!(monitor_fraction > 0.0 && monitor_fraction < 1.0)) {
    throw ValidationError("stratified_split: monitor_fraction must be in (0,1)");
  }
  std::vector<std::size_t> strata[2];
  for (std::size_t i = 0; i < table.size(); ++i) strata[hard_label(table[i].label)].push_back(i);

  std::vector<bool> to_monitor(table.size(), false);
  for (auto& stratum : strata) {
    rng.shuffle(stratum);
    const auto take = static_cast<std::size_t>(
        std::llround(monitor_fraction * static_cast<double>(stratum.size())));
    for (std::size_t k = 0; k < take && k < stratum.size(); ++k) to_monitor[stratum[k]] = true;
  }
  SplitPlan plan;
  plan.strategy = SplitStrategy::kStratified;
  for (std::size_t i = 0; i < table.size(); ++i)
    (to_monitor[i] ? plan.monitor_ids : plan.train_ids).push_back(table[i].id);
  return plan;
}

std::vector<SplitPlan> lodo_folds(const DatasetTable& table) {
  if (table.domains().size() < 2) {
    throw ValidationError("LODO needs at least two domains, found " +
                          std::to_string(table.domains().size()));
  }
  std::vector<SplitPlan> folds;
  for (const auto& held : table.domains()) {
    SplitPlan plan;
    plan.strategy = SplitStrategy::kLodo;
    plan.held_out_domain = held;
    for (const auto& s : table.samples())
      (s.domain == held ? plan.monitor_ids : plan.train_ids).push_back(s.id);
    folds.push_back(std::move(plan));
  }
  return folds;
}

// --- synthetic ----------------------------------------------------------------

std::string SyntheticSpec::domain_key(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "d%02zu", i);
  return buf;
}

void SyntheticSpec::validate() const {
  if (domain_sizes.empty()) throw ValidationError("synthetic: at least one domain required");
  if (prevalence.size() != domain_sizes.size()) {
    throw ValidationError("synthetic: prevalence has " + std::to_string(prevalence.size()) +
                          " entries for " + std::to_string(domain_sizes.size()) + " domains");
  }
  for (double p : prevalence)
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("synthetic: prevalence must lie in (0,1)");
  if (feature_dim == 0) throw ValidationError("synthetic: feature_dim must be positive");
  if (!(separation >= 0.0) || !(domain_shift >= 0.0))
    throw ValidationError("synthetic: separation and domain_shift must be non-negative");
  if (!(annotator_flip >= 0.0 && annotator_flip < 0.5))
    throw ValidationError("synthetic: annotator_flip must lie in [0,0.5)");
  if (!(annotator_scale > 0.0)) throw ValidationError("synthetic: annotator_scale must be positive");
}

namespace {

Matrix synthetic_patch(std::size_t size, int cls, double brightness, Rng& rng) {
  Matrix patch(size, size);
  const double centre = (static_cast<double>(size) - 1.0) / 2.0;
  const double sigma_r = static_cast<double>(size) / 6.0;
  // Positives get an elongated blob, negatives a round one.
  const double sigma_c = cls == 1 ? 2.0 * sigma_r : sigma_r;
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      const double dr = (static_cast<double>(r) - centre) / sigma_r;
      const double dc = (static_cast<double>(c) - centre) / sigma_c;
      patch(r, c) = brightness + std::exp(-0.5 * (dr * dr + dc * dc)) + 0.05 * rng.normal();
    }
  }
  return patch;
}

}  // namespace

DatasetTable generate_synthetic(const SyntheticSpec& spec, Rng& rng) {
  spec.validate();
  const std::size_t dim = spec.feature_dim;
  std::vector<Sample> samples;
  for (std::size_t dom = 0; dom < spec.domain_count(); ++dom) {
    std::vector<double> offset(dim);
    double norm = 0.0;
    for (auto& o : offset) {
      o = rng.normal();
      norm += o * o;
    }
    norm = std::sqrt(norm);
    for (auto& o : offset) o = norm > 0.0 ? o / norm * spec.domain_shift : 0.0;

    const std::size_t n = spec.domain_sizes[dom];
    const auto n_pos = static_cast<std::size_t>(std::llround(spec.prevalence[dom] * static_cast<double>(n)));
    std::vector<int> classes(n, 0);
    std::fill(classes.begin(), classes.begin() + static_cast<std::ptrdiff_t>(std::min(n_pos, n)), 1);
    rng.shuffle(classes);

    const std::string key = SyntheticSpec::domain_key(dom);
    for (std::size_t i = 0; i < n; ++i) {
      const int cls = classes[i];
      Sample s;
      char id_buf[32];
      std::snprintf(id_buf, sizeof id_buf, "%s_%05zu", key.c_str(), i);
      s.id = id_buf;
      s.domain = key;
      s.features.resize(dim);
      for (std::size_t k = 0; k < dim; ++k) s.features[k] = offset[k] + rng.normal();
      s.features[0] += (cls == 1 ? 0.5 : -0.5) * spec.separation;

      // Annotators vote independently, conditioned on the majority agreeing
      // with the latent class; disagreement is likelier near the boundary.
      const double distance = std::abs(s.features[0] - offset[0]);
      const double flip = spec.annotator_flip * std::exp(-distance / spec.annotator_scale);
      int votes_for_cls = 0;
      do {
        votes_for_cls = 0;
        for (int a = 0; a < 3; ++a) votes_for_cls += rng.uniform() < flip ? 0 : 1;
      } while (votes_for_cls < 2);
      const int positive_votes = cls == 1 ? votes_for_cls : 3 - votes_for_cls;
      s.label = static_cast<double>(positive_votes) / 3.0;

      if (spec.patch_size > 0) s.patch = synthetic_patch(spec.patch_size, cls, 0.1 * offset[0], rng);
      samples.push_back(std::move(s));
    }
  }
  return DatasetTable(std::move(samples), dim);
}

std::string format_census(const DatasetTable& table) {
  std::string out = "domain,n,amf,nmf,amf_fraction\n";
  auto line = [&](const std::string& name, const ClassCounts& c) {
    const double frac = c.total() > 0 ? static_cast<double>(c.positives) / static_cast<double>(c.total()) : 0.0;
    out += name + "," + std::to_string(c.total()) + "," + std::to_string(c.positives) + "," +
           std::to_string(c.negatives) + "," + format_fixed(frac, 4) + "\n";
  };
  for (const auto& [key, c] : table.census()) line(key, c);
  line("all", table.totals());
  return out;
}

}  // namespace amfkit
