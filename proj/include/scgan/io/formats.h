#pragma once

// On-disk formats shared by the pipeline stages.
//   manifest CSV   file,label,partition
//   feature CSV    source,label,partition,provenance,f0..f{d-1}   (static vectors)
//   framed binary  "SCGFRAME" u64 count, then per frame: u64 meta length,
//                  JSON metadata, u64 rows, u64 cols, rows*cols little-endian f64
//   pool CSV       class,member,verdict,v0..                      (static vectors)
//   codebook CSV   "# method=kmeans size=S dim=d" then S rows of d values
// Numbers are written with 17 significant digits so they parse back exactly.

#include <filesystem>
#include <string>
#include <vector>

#include "scgan/audio/boaw.h"
#include "scgan/augment/pool.h"
#include "scgan/data/dataset.h"
#include "scgan/io/model_json.h"

namespace scgan::io {

struct ManifestRow {
  std::string file;
  std::string label;
  data::Partition partition = data::Partition::train;
};

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows);

/// Index of `label` in `class_names`, or the label itself if it is a
/// non-negative integer below class_names.size().
std::size_t class_index(const std::string& label, const std::vector<std::string>& class_names);

std::string format_double(double v);
std::vector<std::string> split_csv_line(const std::string& line);

void write_feature_csv(const std::filesystem::path& path, const data::Dataset& set);
data::Dataset read_feature_csv(const std::filesystem::path& path, std::size_t num_classes);

struct Frame {
  nn::Matrix payload;
  Json meta;
};
void write_frames(const std::filesystem::path& path, const std::vector<Frame>& frames);
std::vector<Frame> read_frames(const std::filesystem::path& path);

/// Sequence datasets in the framed container (metadata: label, partition,
/// provenance, source).
void write_sequence_dataset(const std::filesystem::path& path, const data::Dataset& set);
data::Dataset read_sequence_dataset(const std::filesystem::path& path, std::size_t num_classes);

/// Picks the format from the data kind (CSV for static, framed otherwise).
void write_dataset(const std::filesystem::path& path, const data::Dataset& set);
data::Dataset read_dataset(const std::filesystem::path& path, std::size_t num_classes);

void write_pool(const std::filesystem::path& path, const augment::SynthPool& pool);
augment::SynthPool read_pool(const std::filesystem::path& path, std::size_t num_classes);

void write_codebook(const std::filesystem::path& path, const audio::Codebook& cb);
audio::Codebook read_codebook(const std::filesystem::path& path);

}  // namespace scgan::io
