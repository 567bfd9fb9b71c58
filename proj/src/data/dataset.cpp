#include "scgan/data/dataset.h"

#include "scgan/error.h"

namespace scgan::data {

const char* to_string(DataKind k) {
  return k == DataKind::sequence ? "sequence" : "static_vector";
}

const char* to_string(Partition p) {
  switch (p) {
    case Partition::train: return "train";
    case Partition::devel: return "devel";
    case Partition::test: return "test";
  }
  return "train";
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::original: return "original";
    case Provenance::synthetic: return "synthetic";
    case Provenance::smote: return "smote";
    case Provenance::transformed: return "transformed";
    case Provenance::replicated: return "replicated";
  }
  return "original";
}

DataKind data_kind_from_string(const std::string& s) {
  if (s == "static_vector") return DataKind::static_vector;
  if (s == "sequence") return DataKind::sequence;
  throw ValidationError("unknown data kind '" + s + "'");
}

Partition partition_from_string(const std::string& s) {
  if (s == "train") return Partition::train;
  if (s == "devel") return Partition::devel;
  if (s == "test") return Partition::test;
  throw ValidationError("unknown partition '" + s + "' (expected train, devel or test)");
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "original") return Provenance::original;
  if (s == "synthetic") return Provenance::synthetic;
  if (s == "smote") return Provenance::smote;
  if (s == "transformed") return Provenance::transformed;
  if (s == "replicated") return Provenance::replicated;
  throw ValidationError("unknown provenance '" + s + "'");
}

std::size_t Dataset::feature_dim() const {
  return records.empty() ? 0 : records.front().payload.cols();
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& r : records) {
    if (r.label < num_classes) ++counts[r.label];
  }
  return counts;
}

std::vector<std::size_t> Dataset::labels() const {
  std::vector<std::size_t> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

Dataset Dataset::subset(Partition p) const {
  Dataset out{kind, num_classes, {}};
  for (const auto& r : records) {
    if (r.partition == p) out.records.push_back(r);
  }
  return out;
}

void Dataset::validate() const {
  const std::size_t d = feature_dim();
  for (const auto& r : records) {
    require_dims(r.payload.cols() == d, "dataset: payload width " +
                                            std::to_string(r.payload.cols()) + " != " +
                                            std::to_string(d));
    if (kind == DataKind::static_vector) {
      require_dims(r.payload.rows() == 1, "dataset: static record with more than one row");
    }
    if (!r.payload.all_finite()) throw ValidationError("dataset: non-finite feature value");
    if (r.label >= num_classes) {
      throw ValidationError("dataset: label " + std::to_string(r.label) + " >= " +
                            std::to_string(num_classes) + " classes");
    }
  }
}

FeatureRecord make_static(std::vector<double> values, std::size_t label, Partition partition,
                          Provenance provenance) {
  const std::size_t d = values.size();
  return FeatureRecord{nn::Matrix(1, d, std::move(values)), label, partition, provenance, {}};
}

}  // namespace scgan::data
