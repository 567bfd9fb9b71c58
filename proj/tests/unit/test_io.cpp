#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "doctest.h"
#include "scgan/error.h"
#include "scgan/io/formats.h"
#include "scgan/rng.h"

using namespace scgan;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("scgan_io_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::filesystem::path operator/(const char* name) const { return path / name; }
};

data::Dataset random_static(std::mt19937_64& rng) {
  data::Dataset s;
  s.num_classes = 3;
  std::normal_distribution<double> g(0.0, 1e3);
  for (int i = 0; i < 12; ++i) {
    auto r = data::make_static({g(rng), g(rng) * 1e-9, 1.0 / 3.0}, i % 3,
                               static_cast<data::Partition>(i % 3),
                               static_cast<data::Provenance>(i % 5));
    r.source = "rec" + std::to_string(i);
    s.records.push_back(std::move(r));
  }
  return s;
}

data::Dataset random_sequences(std::mt19937_64& rng) {
  data::Dataset s;
  s.kind = data::DataKind::sequence;
  s.num_classes = 2;
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    data::FeatureRecord r;
    r.payload = nn::Matrix(3 + i, 4);
    for (double& v : r.payload.values()) v = g(rng);
    r.label = i % 2;
    r.partition = data::Partition::devel;
    r.provenance = data::Provenance::synthetic;
    r.source = "seq" + std::to_string(i);
    s.records.push_back(std::move(r));
  }
  return s;
}

void check_same(const data::Dataset& a, const data::Dataset& b) {
  REQUIRE(a.size() == b.size());
  CHECK(a.kind == b.kind);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.records[i].payload == b.records[i].payload);
    CHECK(a.records[i].label == b.records[i].label);
    CHECK(a.records[i].partition == b.records[i].partition);
    CHECK(a.records[i].provenance == b.records[i].provenance);
    CHECK(a.records[i].source == b.records[i].source);
  }
}

}  // namespace

TEST_CASE("manifest and labels") {
  TempDir dir;
  const std::vector<io::ManifestRow> rows{{"a.wav", "V", data::Partition::train},
                                          {"sub/b.wav", "E", data::Partition::test}};
  io::write_manifest(dir / "m.csv", rows);
  const auto back = io::read_manifest(dir / "m.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[1].file == "sub/b.wav");
  CHECK(back[1].label == "E");
  CHECK(back[1].partition == data::Partition::test);

  const std::vector<std::string> names{"V", "O", "T", "E"};
  CHECK(io::class_index("T", names) == 2);
  CHECK(io::class_index("3", names) == 3);
  CHECK_THROWS_AS(io::class_index("X", names), ValidationError);
  CHECK_THROWS_AS(io::class_index("4", names), ValidationError);

  std::ofstream(dir / "bad.csv") << "file,label\nx.wav,V\n";
  CHECK_THROWS_AS(io::read_manifest(dir / "bad.csv"), ValidationError);
  CHECK(io::split_csv_line("a,,b") == std::vector<std::string>{"a", "", "b"});
}

TEST_CASE("numbers round-trip exactly") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::numeric_limits<double>::max()}) {
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("dataset files") {
  TempDir dir;
  auto rng = make_rng(31);
  const auto s = random_static(rng);
  io::write_dataset(dir / "s.csv", s);
  check_same(s, io::read_dataset(dir / "s.csv", 3));

  const auto q = random_sequences(rng);
  io::write_dataset(dir / "q.bin", q);
  check_same(q, io::read_dataset(dir / "q.bin", 2));

  // Labels beyond the class count are rejected on read.
  CHECK_THROWS_AS(io::read_dataset(dir / "s.csv", 2), ValidationError);

  std::ofstream(dir / "trunc.bin", std::ios::binary) << "SCGFRAME\x05";
  CHECK_THROWS_AS(io::read_frames(dir / "trunc.bin"), ValidationError);
  CHECK_THROWS_AS(io::read_dataset(dir / "missing.csv", 2), IoError);
}

TEST_CASE("pool and codebook files") {
  TempDir dir;
  augment::SynthPool pool;
  pool.num_classes = 2;
  pool.entries.push_back({nn::Matrix(1, 2, {0.25, -1.5}), 1, 3, augment::Verdict::kept});
  pool.entries.push_back({nn::Matrix(1, 2, {1e-17, 2.0}), 0, 0, augment::Verdict::rejected});
  io::write_pool(dir / "p.csv", pool);
  const auto back = io::read_pool(dir / "p.csv", 2);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.entries[i].payload == pool.entries[i].payload);
    CHECK(back.entries[i].cls == pool.entries[i].cls);
    CHECK(back.entries[i].member == pool.entries[i].member);
    CHECK(back.entries[i].verdict == pool.entries[i].verdict);
  }

  augment::SynthPool seq_pool;
  seq_pool.kind = data::DataKind::sequence;
  seq_pool.num_classes = 2;
  seq_pool.entries.push_back({nn::Matrix(2, 2, {1, 2, 3, 4}), 1, 0, augment::Verdict::unfiltered});
  io::write_pool(dir / "p.bin", seq_pool);
  const auto seq_back = io::read_pool(dir / "p.bin", 2);
  CHECK(seq_back.kind == data::DataKind::sequence);
  CHECK(seq_back.entries.at(0).payload == seq_pool.entries[0].payload);

  audio::Codebook cb;
  cb.method = audio::CodebookMethod::kmeans;
  cb.words = nn::Matrix(2, 3, {1, 2, 3, 0.1, 0.2, 0.3});
  io::write_codebook(dir / "cb.csv", cb);
  const auto cb2 = io::read_codebook(dir / "cb.csv");
  CHECK(cb2.words == cb.words);
  CHECK(cb2.method == cb.method);
}
