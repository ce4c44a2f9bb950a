#include "mme/audio.hpp"

#include "mme/errors.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <string>

namespace mme {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::string at(std::size_t offset) { return " (at byte offset " + std::to_string(offset) + ")"; }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n)
      throw FormatError(std::string("truncated ") + what + ": need " + std::to_string(n) +
                        " bytes, have " + std::to_string(remaining()) + at(pos_));
  }
  std::uint16_t u16() {
    need(2, "field");
    const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4, "field");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }
  std::string tag() {
    need(4, "chunk id");
    std::string t(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return t;
  }
  void skip(std::size_t n) {
    need(n, "chunk");
    pos_ += n;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct Format {
  std::uint16_t code = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

}  // namespace

AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.remaining() < 12) throw FormatError("file too short for a RIFF header" + at(0));
  if (r.tag() != "RIFF") throw FormatError("missing RIFF signature" + at(0));
  const std::uint32_t riff_size = r.u32();
  if (r.tag() != "WAVE") throw FormatError("RIFF form type is not WAVE" + at(8));
  const std::size_t riff_end = std::min<std::size_t>(bytes.size(), std::size_t{8} + riff_size);

  std::optional<Format> fmt;
  std::optional<std::span<const std::uint8_t>> data;
  std::size_t data_offset = 0;
  while (r.offset() + 8 <= riff_end && !data) {
    const std::size_t chunk_at = r.offset();
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    if (id == "fmt ") {
      if (size < 16) throw FormatError("fmt chunk shorter than 16 bytes" + at(chunk_at));
      r.need(size, "fmt chunk");
      Format f;
      f.code = r.u16();
      f.channels = r.u16();
      f.sample_rate = r.u32();
      r.u32();  // byte rate
      f.block_align = r.u16();
      f.bits = r.u16();
      std::size_t used = 16;
      if (f.code == kFormatExtensible) {
        if (size < 40) throw FormatError("extensible fmt chunk shorter than 40 bytes" + at(chunk_at));
        r.u16();  // cbSize
        r.u16();  // valid bits
        r.u32();  // channel mask
        f.code = r.u16();  // first two bytes of the subformat GUID
        r.skip(14);
        used = 40;
      }
      r.skip(size - used);
      if (size % 2) r.skip(std::min<std::size_t>(1, r.remaining()));
      fmt = f;
    } else if (id == "data") {
      if (!fmt) throw FormatError("data chunk before fmt chunk" + at(chunk_at));
      if (size > r.remaining())
        throw FormatError("data chunk declares " + std::to_string(size) + " bytes but only " +
                          std::to_string(r.remaining()) + " remain" + at(chunk_at));
      data_offset = r.offset();
      data = r.take(size);
    } else {
      r.skip(size);
      if (size % 2 && r.remaining()) r.skip(1);
    }
  }
  if (!fmt) throw FormatError("no fmt chunk" + at(r.offset()));
  if (!data) throw FormatError("no data chunk" + at(r.offset()));

  const Format& f = *fmt;
  if (f.channels == 0) throw FormatError("zero channels" + at(20));
  const bool pcm16 = f.code == kFormatPcm && f.bits == 16;
  const bool float64 = f.code == kFormatFloat && f.bits == 64;
  if (!pcm16 && !float64)
    throw FormatError("unsupported sample format (code " + std::to_string(f.code) + ", " +
                      std::to_string(f.bits) + " bits); need 16-bit PCM or 64-bit float" + at(20));
  const std::size_t width = f.bits / 8;
  if (f.block_align != width * f.channels)
    throw FormatError("block align " + std::to_string(f.block_align) + " inconsistent with " +
                      std::to_string(f.channels) + " channels" + at(32));
  if (data->size() % f.block_align != 0)
    throw FormatError("data chunk size " + std::to_string(data->size()) +
                      " is not a multiple of the block size" + at(data_offset));

  AudioClip clip;
  clip.sample_rate = f.sample_rate;
  clip.source_format = pcm16 ? SampleFormat::Pcm16 : SampleFormat::Float64;
  const std::size_t frames = data->size() / f.block_align;
  clip.channels.assign(f.channels, std::vector<double>(frames));
  const std::uint8_t* p = data->data();
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < f.channels; ++c) {
      if (pcm16) {
        const auto raw = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        clip.channels[c][i] = static_cast<double>(static_cast<std::int16_t>(raw));
      } else {
        std::uint64_t raw = 0;
        for (int k = 7; k >= 0; --k) raw = (raw << 8) | p[k];
        clip.channels[c][i] = std::bit_cast<double>(raw);
      }
      p += width;
    }
  }
  return clip;
}

std::vector<std::uint8_t> encode_wav(const AudioClip& clip, SampleFormat format) {
  const std::size_t channels = clip.channel_count();
  if (channels == 0 || channels > 0xFFFF) throw InvalidParameter("clip needs 1..65535 channels");
  const std::size_t frames = clip.frames_per_channel();
  for (const auto& ch : clip.channels)
    if (ch.size() != frames) throw InvalidParameter("channels have different lengths");

  const bool pcm16 = format == SampleFormat::Pcm16;
  if (pcm16) {
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t i = 0; i < frames; ++i) {
        const double v = clip.channels[c][i];
        if (v != std::nearbyint(v) || v < -32768.0 || v > 32767.0)
          throw PrecisionError("sample " + std::to_string(i) + " of channel " + std::to_string(c) +
                               " is not a 16-bit integer; write as float64 to keep it exact");
      }
    }
  }
  const std::size_t width = pcm16 ? 2 : 8;
  const std::size_t data_size = frames * channels * width;
  if (data_size > 0xFFFFFFFFull - 36) throw InvalidParameter("clip too large for RIFF");

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, static_cast<std::uint32_t>(36 + data_size));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, pcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, clip.sample_rate);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate * channels * width));
  put_u16(out, static_cast<std::uint16_t>(channels * width));
  put_u16(out, static_cast<std::uint16_t>(width * 8));
  put_tag(out, "data");
  put_u32(out, static_cast<std::uint32_t>(data_size));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = clip.channels[c][i];
      if (pcm16) {
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
      } else {
        const auto raw = std::bit_cast<std::uint64_t>(v);
        for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>((raw >> (8 * k)) & 0xFF));
      }
    }
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

AudioClip wav_read(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_wav(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void wav_write(const AudioClip& clip, const std::filesystem::path& path, SampleFormat format) {
  const auto bytes = encode_wav(clip, format);
  write_file(path, bytes);
}

FrameStream::FrameStream(std::vector<double> samples, std::size_t frame_dim)
    : frame_dim_(frame_dim) {
  if (frame_dim == 0) throw InvalidParameter("frame dimension must be >= 1");
  const std::size_t body = samples.size() / frame_dim * frame_dim;
  tail_.assign(samples.begin() + static_cast<std::ptrdiff_t>(body), samples.end());
  samples.resize(body);
  body_ = std::move(samples);
}

Eigen::Map<const Vector> FrameStream::frame(std::size_t k) const {
  return Eigen::Map<const Vector>(body_.data() + k * frame_dim_,
                                  static_cast<Eigen::Index>(frame_dim_));
}

void FrameStream::set_frame(std::size_t k, const Vector& v) {
  if (static_cast<std::size_t>(v.size()) != frame_dim_)
    throw InvalidParameter("frame dimension mismatch");
  std::memcpy(body_.data() + k * frame_dim_, v.data(), frame_dim_ * sizeof(double));
}

std::vector<double> FrameStream::samples() const {
  std::vector<double> out = body_;
  out.insert(out.end(), tail_.begin(), tail_.end());
  return out;
}

FramedClip frame(const AudioClip& clip, std::size_t frame_dim) {
  FramedClip out;
  out.sample_rate = clip.sample_rate;
  out.source_format = clip.source_format;
  for (const auto& ch : clip.channels) out.channels.emplace_back(ch, frame_dim);
  return out;
}

AudioClip deframe(const FramedClip& framed) {
  AudioClip clip;
  clip.sample_rate = framed.sample_rate;
  clip.source_format = framed.source_format;
  for (const auto& stream : framed.channels) clip.channels.push_back(stream.samples());
  return clip;
}

double integer_residual(const AudioClip& clip) {
  double worst = 0.0;
  for (const auto& ch : clip.channels)
    for (double v : ch) worst = std::max(worst, std::abs(v - std::nearbyint(v)));
  return worst;
}

std::size_t out_of_pcm16_range(const AudioClip& clip) {
  std::size_t n = 0;
  for (const auto& ch : clip.channels)
    for (double v : ch) n += (v < -32768.0 || v > 32767.0) ? 1 : 0;
  return n;
}

}  // namespace mme
