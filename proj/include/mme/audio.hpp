#pragma once

#include "mme/lattice.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mme {

enum class SampleFormat { Pcm16, Float64 };

// Deinterleaved audio in raw amplitude units (PCM16 samples stay integers in
// [-32768, 32767]; no normalisation).
struct AudioClip {
  std::vector<std::vector<double>> channels;
  std::uint32_t sample_rate = 44100;
  SampleFormat source_format = SampleFormat::Pcm16;

  std::size_t channel_count() const { return channels.size(); }
  std::size_t frames_per_channel() const { return channels.empty() ? 0 : channels[0].size(); }
};

// RIFF/WAVE codec. Reads format 1 (16-bit PCM) and format 3 (64-bit IEEE
// float), including WAVE_FORMAT_EXTENSIBLE wrappers of either; writes a
// canonical 44-byte header followed by the data chunk and nothing else.
AudioClip decode_wav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_wav(const AudioClip& clip, SampleFormat format);

AudioClip wav_read(const std::filesystem::path& path);
// Refuses (PrecisionError) to write PCM16 when a sample is not an integer in
// the 16-bit range.
void wav_write(const AudioClip& clip, const std::filesystem::path& path, SampleFormat format);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// Non-overlapping blocks of frame_dim consecutive samples of one channel,
// plus the leftover tail (shorter than one frame).
class FrameStream {
 public:
  FrameStream(std::vector<double> samples, std::size_t frame_dim);

  std::size_t frame_dim() const { return frame_dim_; }
  std::size_t frame_count() const { return body_.size() / frame_dim_; }
  const std::vector<double>& tail() const { return tail_; }

  Eigen::Map<const Vector> frame(std::size_t k) const;
  void set_frame(std::size_t k, const Vector& v);

  // Frames followed by the tail, i.e. the original sample sequence.
  std::vector<double> samples() const;

 private:
  std::size_t frame_dim_;
  std::vector<double> body_;
  std::vector<double> tail_;
};

struct FramedClip {
  std::vector<FrameStream> channels;
  std::uint32_t sample_rate = 44100;
  SampleFormat source_format = SampleFormat::Pcm16;
};

FramedClip frame(const AudioClip& clip, std::size_t frame_dim);
AudioClip deframe(const FramedClip& framed);

// Largest |sample - round(sample)| over the clip.
double integer_residual(const AudioClip& clip);
// Count of samples outside [-32768, 32767].
std::size_t out_of_pcm16_range(const AudioClip& clip);

}  // namespace mme
