#include "scgan/audio/wav.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "scgan/error.h"

namespace scgan::audio {

namespace {

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

}  // namespace

void AudioClip::validate() const {
  if (samples.empty()) throw ValidationError("audio clip is empty");
  if (sample_rate == 0) throw ValidationError("audio clip has zero sample rate");
  for (double v : samples) {
    if (!std::isfinite(v)) throw ValidationError("audio clip has non-finite samples");
  }
}

std::int16_t to_pcm16(double v) {
  const double s = std::round(v * 32768.0);
  return static_cast<std::int16_t>(std::clamp(s, -32768.0, 32767.0));
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw ValidationError(name + ": not a RIFF/WAVE file");
  }
  std::size_t pos = 12;
  bool have_fmt = false;
  AudioClip clip;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t size = le32(buf.data() + pos + 4);
    const unsigned char* body = buf.data() + pos + 8;
    const bool truncated = pos + 8 + size > buf.size();
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (truncated || size < 16) throw ValidationError(name + ": truncated fmt chunk");
      const auto format = le16(body);
      const auto channels = le16(body + 2);
      clip.sample_rate = le32(body + 4);
      const auto bits = le16(body + 14);
      if (format != 1 || bits != 16) {
        throw ValidationError(name + ": only 16-bit PCM is supported");
      }
      if (channels != 1) throw ValidationError(name + ": only mono audio is supported");
      have_fmt = true;
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      if (!have_fmt) throw ValidationError(name + ": data chunk before fmt chunk");
      if (truncated) throw ValidationError(name + ": truncated data chunk");
      clip.samples.resize(size / 2);
      for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        const auto raw = static_cast<std::int16_t>(le16(body + 2 * i));
        clip.samples[i] = static_cast<double>(raw) / 32768.0;
      }
      return clip;
    }
    pos += 8 + size + (size & 1u);
  }
  throw ValidationError(name + ": no data chunk");
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  const auto n = static_cast<std::uint32_t>(clip.samples.size());
  std::string s;
  s.reserve(44 + 2 * n);
  s += "RIFF";
  put32(s, 36 + 2 * n);
  s += "WAVEfmt ";
  put32(s, 16);
  put16(s, 1);
  put16(s, 1);
  put32(s, clip.sample_rate);
  put32(s, clip.sample_rate * 2);
  put16(s, 2);
  put16(s, 16);
  s += "data";
  put32(s, 2 * n);
  for (double v : clip.samples) put16(s, static_cast<std::uint16_t>(to_pcm16(v)));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace scgan::audio
