#include "scgan/io/formats.h"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "scgan/error.h"

namespace scgan::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ValidationError(where + ": bad number '" + s + "'");
  return v;
}

std::size_t parse_index(const std::string& s, const std::string& where) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ValidationError(where + ": bad integer '" + s + "'");
  return v;
}

void check_field(const std::string& s, const std::string& what) {
  if (s.find_first_of(",\n\r") != std::string::npos) {
    throw ValidationError(what + " may not contain commas or newlines: '" + s + "'");
  }
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in, const std::string& where) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ValidationError(where + ": truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

constexpr char kMagic[8] = {'S', 'C', 'G', 'F', 'R', 'A', 'M', 'E'};

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) !=
                                     std::vector<std::string>{"file", "label", "partition"}) {
    throw ValidationError(path.string() + ": manifest header must be file,label,partition");
  }
  std::vector<ManifestRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected 3 fields");
    }
    rows.push_back({f[0], f[1], data::partition_from_string(f[2])});
  }
  return rows;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows) {
  auto out = open_out(path);
  out << "file,label,partition\n";
  for (const auto& r : rows) {
    check_field(r.file, "file name");
    check_field(r.label, "label");
    out << r.file << ',' << r.label << ',' << data::to_string(r.partition) << '\n';
  }
}

std::size_t class_index(const std::string& label, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == label) return i;
  }
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), v);
  if (ec == std::errc() && ptr == label.data() + label.size() && v < names.size()) return v;
  throw ValidationError("unknown class label '" + label + "'");
}

void write_feature_csv(const std::filesystem::path& path, const data::Dataset& set) {
  if (set.kind != data::DataKind::static_vector) {
    throw ValidationError("feature CSV holds static vectors only");
  }
  auto out = open_out(path);
  out << "source,label,partition,provenance";
  for (std::size_t j = 0; j < set.feature_dim(); ++j) out << ",f" << j;
  out << '\n';
  for (const auto& r : set.records) {
    check_field(r.source, "source");
    out << r.source << ',' << r.label << ',' << data::to_string(r.partition) << ','
        << data::to_string(r.provenance);
    for (double v : r.payload.values()) out << ',' << format_double(v);
    out << '\n';
  }
}

data::Dataset read_feature_csv(const std::filesystem::path& path, std::size_t num_classes) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty feature file");
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "source" || header[1] != "label") {
    throw ValidationError(path.string() + ": not a feature CSV");
  }
  const std::size_t d = header.size() - 4;
  data::Dataset set{data::DataKind::static_vector, num_classes, {}};
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) throw ValidationError(where + ": wrong field count");
    std::vector<double> v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = parse_double(f[4 + j], where);
    auto rec = data::make_static(std::move(v), parse_index(f[1], where),
                                 data::partition_from_string(f[2]),
                                 data::provenance_from_string(f[3]));
    rec.source = f[0];
    set.records.push_back(std::move(rec));
  }
  set.validate();
  return set;
}

void write_frames(const std::filesystem::path& path, const std::vector<Frame>& frames) {
  auto out = open_out(path, true);
  out.write(kMagic, 8);
  put_u64(out, frames.size());
  for (const auto& f : frames) {
    const std::string meta = f.meta.dump();
    put_u64(out, meta.size());
    out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    put_u64(out, f.payload.rows());
    put_u64(out, f.payload.cols());
    for (double v : f.payload.values()) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      put_u64(out, bits);
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Frame> read_frames(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  const std::string where = path.string();
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw ValidationError(where + ": not a framed feature file");
  }
  const auto n = get_u64(in, where);
  std::vector<Frame> frames;
  for (std::uint64_t i = 0; i < n; ++i) {
    Frame f;
    const auto mlen = get_u64(in, where);
    if (mlen > (1u << 24)) throw ValidationError(where + ": corrupt frame header");
    std::string meta(mlen, '\0');
    if (!in.read(meta.data(), static_cast<std::streamsize>(mlen))) {
      throw ValidationError(where + ": truncated file");
    }
    try {
      f.meta = Json::parse(meta);
    } catch (const Json::parse_error& e) {
      throw ValidationError(where + ": bad frame metadata");
    }
    const auto rows = get_u64(in, where);
    const auto cols = get_u64(in, where);
    if (rows * cols > (1u << 28)) throw ValidationError(where + ": corrupt frame size");
    std::vector<double> vals(rows * cols);
    for (double& v : vals) {
      const auto bits = get_u64(in, where);
      std::memcpy(&v, &bits, 8);
    }
    f.payload = nn::Matrix(rows, cols, std::move(vals));
    frames.push_back(std::move(f));
  }
  return frames;
}

void write_sequence_dataset(const std::filesystem::path& path, const data::Dataset& set) {
  std::vector<Frame> frames;
  frames.reserve(set.size());
  for (const auto& r : set.records) {
    frames.push_back({r.payload,
                      {{"label", r.label},
                       {"partition", data::to_string(r.partition)},
                       {"provenance", data::to_string(r.provenance)},
                       {"source", r.source}}});
  }
  write_frames(path, frames);
}

data::Dataset read_sequence_dataset(const std::filesystem::path& path, std::size_t num_classes) {
  data::Dataset set{data::DataKind::sequence, num_classes, {}};
  for (auto& f : read_frames(path)) {
    try {
      set.records.push_back({std::move(f.payload), f.meta.at("label").get<std::size_t>(),
                             data::partition_from_string(f.meta.at("partition").get<std::string>()),
                             data::provenance_from_string(f.meta.at("provenance").get<std::string>()),
                             f.meta.value("source", std::string{})});
    } catch (const Json::exception& e) {
      throw ValidationError(path.string() + ": frame metadata: " + e.what());
    }
  }
  set.validate();
  return set;
}

void write_dataset(const std::filesystem::path& path, const data::Dataset& set) {
  if (set.kind == data::DataKind::static_vector) write_feature_csv(path, set);
  else write_sequence_dataset(path, set);
}

data::Dataset read_dataset(const std::filesystem::path& path, std::size_t num_classes) {
  auto in = open_in(path, true);
  char magic[8] = {};
  in.read(magic, 8);
  if (in.gcount() == 8 && std::memcmp(magic, kMagic, 8) == 0) {
    return read_sequence_dataset(path, num_classes);
  }
  return read_feature_csv(path, num_classes);
}

void write_pool(const std::filesystem::path& path, const augment::SynthPool& pool) {
  if (pool.kind == data::DataKind::sequence) {
    std::vector<Frame> frames;
    for (const auto& e : pool.entries) {
      frames.push_back({e.payload,
                        {{"class", e.cls},
                         {"member", e.member},
                         {"verdict", augment::to_string(e.verdict)}}});
    }
    write_frames(path, frames);
    return;
  }
  auto out = open_out(path);
  const std::size_t d = pool.entries.empty() ? 0 : pool.entries.front().payload.cols();
  out << "class,member,verdict";
  for (std::size_t j = 0; j < d; ++j) out << ",v" << j;
  out << '\n';
  for (const auto& e : pool.entries) {
    out << e.cls << ',' << e.member << ',' << augment::to_string(e.verdict);
    for (double v : e.payload.values()) out << ',' << format_double(v);
    out << '\n';
  }
}

augment::SynthPool read_pool(const std::filesystem::path& path, std::size_t num_classes) {
  augment::SynthPool pool;
  pool.num_classes = num_classes;
  {
    auto in = open_in(path, true);
    char magic[8] = {};
    in.read(magic, 8);
    if (in.gcount() == 8 && std::memcmp(magic, kMagic, 8) == 0) {
      pool.kind = data::DataKind::sequence;
      for (auto& f : read_frames(path)) {
        pool.entries.push_back({std::move(f.payload), f.meta.at("class").get<std::size_t>(),
                                f.meta.at("member").get<std::size_t>(),
                                augment::verdict_from_string(f.meta.at("verdict").get<std::string>())});
      }
      return pool;
    }
  }
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("class,member,verdict", 0) != 0) {
    throw ValidationError(path.string() + ": not a pool CSV");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    const auto f = split_csv_line(line);
    if (f.size() < 3) throw ValidationError(where + ": too few fields");
    std::vector<double> v;
    for (std::size_t j = 3; j < f.size(); ++j) v.push_back(parse_double(f[j], where));
    const std::size_t d = v.size();
    augment::PoolEntry e{nn::Matrix(1, d, std::move(v)), parse_index(f[0], where),
                         parse_index(f[1], where), augment::verdict_from_string(f[2])};
    if (e.cls >= num_classes) throw ValidationError(where + ": class out of range");
    pool.entries.push_back(std::move(e));
  }
  return pool;
}

void write_codebook(const std::filesystem::path& path, const audio::Codebook& cb) {
  auto out = open_out(path);
  out << "# method=" << audio::to_string(cb.method) << " size=" << cb.size()
      << " dim=" << cb.dim() << '\n';
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const auto r = cb.words.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << format_double(r[j]);
    out << '\n';
  }
}

audio::Codebook read_codebook(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw ValidationError(path.string() + ": missing codebook header line");
  }
  std::istringstream hs(line.substr(2));
  std::string tok, method = "kmeans";
  std::size_t size = 0, dim = 0;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "method") method = val;
    else if (key == "size") size = parse_index(val, path.string());
    else if (key == "dim") dim = parse_index(val, path.string());
  }
  audio::Codebook cb;
  cb.method = audio::codebook_method_from_string(method);
  std::vector<double> vals;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != dim) throw ValidationError(path.string() + ": codeword width mismatch");
    for (const auto& s : f) vals.push_back(parse_double(s, path.string()));
    ++rows;
  }
  if (rows != size || size == 0) throw ValidationError(path.string() + ": codeword count mismatch");
  cb.words = nn::Matrix(rows, dim, std::move(vals));
  return cb;
}

}  // namespace scgan::io
