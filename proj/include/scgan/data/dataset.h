#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "scgan/nn/tensor.h"

namespace scgan::data {

enum class DataKind { static_vector, sequence };
enum class Partition { train, devel, test };
enum class Provenance { original, synthetic, smote, transformed, replicated };

const char* to_string(DataKind k);
const char* to_string(Partition p);
const char* to_string(Provenance p);
DataKind data_kind_from_string(const std::string& s);
Partition partition_from_string(const std::string& s);
Provenance provenance_from_string(const std::string& s);

/// One example. Static vectors are stored as a 1 x d payload, sequences as
/// T x d.
struct FeatureRecord {
  nn::Matrix payload;
  std::size_t label = 0;
  Partition partition = Partition::train;
  Provenance provenance = Provenance::original;
  std::string source;  // recording the example came from

  std::span<const double> vector() const { return payload.values(); }
};

struct Dataset {
  DataKind kind = DataKind::static_vector;
  std::size_t num_classes = 0;
  std::vector<FeatureRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  /// Width of one frame (static: vector length).
  std::size_t feature_dim() const;
  std::vector<std::size_t> class_counts() const;
  std::vector<std::size_t> labels() const;
  Dataset subset(Partition p) const;
  /// Throws DimensionError if payload widths differ or static payloads are
  /// not single rows, ValidationError on labels >= num_classes.
  void validate() const;
};

/// Makes a static-vector record.
FeatureRecord make_static(std::vector<double> values, std::size_t label,
                          Partition partition = Partition::train,
                          Provenance provenance = Provenance::original);

}  // namespace scgan::data
