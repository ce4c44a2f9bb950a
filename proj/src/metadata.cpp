#include "mme/metadata.hpp"

#include "mme/errors.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

namespace mme {
namespace {

std::string hex(const unsigned char* p, std::size_t n) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out += digits[p[i] >> 4];
    out += digits[p[i] & 0xF];
  }
  return out;
}

std::uint32_t crc_of(const std::string& body) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));
}

std::string crc_hex(std::uint32_t crc) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", crc);
  return buf;
}

template <typename T>
T parse_int(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("sidecar is missing '" + key + "'");
  T v{};
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError("sidecar field '" + key + "' is not an integer: '" + s + "'");
  return v;
}

double parse_real(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("sidecar is missing '" + key + "'");
  double v = 0.0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError("sidecar field '" + key + "' is not a number: '" + s + "'");
  return v;
}

const std::string& field(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("sidecar is missing '" + key + "'");
  return it->second;
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  return hex(md, len);
}

std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i] & 1u) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return out;
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::uint64_t count) {
  if (count > bytes.size() * 8) throw InvalidParameter("not enough bytes for the bit count");
  std::vector<std::uint8_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  return out;
}

std::string payload_digest(std::span<const std::uint8_t> bits) {
  return sha256_hex(pack_bits(bits));
}

std::string serialize_sidecar(const Sidecar& s) {
  std::ostringstream os;
  os.precision(17);
  os << "format=" << kSidecarFormat << '\n'
     << "scheme=" << to_string(s.spec.scheme) << '\n'
     << "lattice=" << to_string(s.spec.lattice) << '\n'
     << "dim=" << s.spec.frame_dim() << '\n'
     << "delta=" << s.spec.delta << '\n'
     << "rate=" << s.spec.rate << '\n'
     << "nesting=" << s.spec.nesting_matrix().to_string() << '\n'
     << "alpha=" << s.spec.alpha << '\n'
     << "mantissa_bits=" << s.spec.mantissa_bits << '\n'
     << "bound=" << to_string(s.spec.bound) << '\n'
     << "seed=" << s.seed << '\n'
     << "payload_bits=" << s.payload_bits << '\n'
     << "payload_sha256=" << s.payload_sha256 << '\n'
     << "host_sha256=" << s.host_sha256 << '\n'
     << "channels=" << s.channels << '\n'
     << "sample_rate=" << s.sample_rate << '\n'
     << "samples_per_channel=" << s.samples_per_channel << '\n'
     << "source_format=" << (s.source_format == SampleFormat::Pcm16 ? "pcm16" : "float64") << '\n';
  const std::string body = os.str();
  return body + "crc32=" + crc_hex(crc_of(body)) + '\n';
}

Sidecar parse_sidecar(const std::string& text) {
  const std::size_t crc_at = text.rfind("crc32=");
  if (crc_at == std::string::npos || (crc_at != 0 && text[crc_at - 1] != '\n'))
    throw IntegrityError("sidecar has no crc32 line");
  const std::string body = text.substr(0, crc_at);
  std::string stored = text.substr(crc_at + 6);
  while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r')) stored.pop_back();
  if (stored != crc_hex(crc_of(body)))
    throw IntegrityError("sidecar checksum mismatch (stored " + stored + ", computed " +
                         crc_hex(crc_of(body)) + ")");

  std::map<std::string, std::string> kv;
  std::istringstream in(body);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("sidecar line " + std::to_string(lineno) + " has no '='");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (field(kv, "format") != kSidecarFormat)
    throw FormatError("unsupported sidecar format '" + field(kv, "format") + "'");

  Sidecar s;
  s.spec.scheme = parse_scheme(field(kv, "scheme"));
  s.spec.lattice = parse_lattice_kind(field(kv, "lattice"));
  s.spec.dim = parse_int<int>(kv, "dim");
  s.spec.delta = parse_real(kv, "delta");
  s.spec.rate = parse_int<int>(kv, "rate");
  s.spec.nesting = NestingMatrix::parse(field(kv, "nesting")).diagonal();
  s.spec.alpha = parse_real(kv, "alpha");
  s.spec.mantissa_bits = parse_int<int>(kv, "mantissa_bits");
  s.spec.bound = parse_bound_rule(field(kv, "bound"));
  s.seed = parse_int<std::uint64_t>(kv, "seed");
  s.payload_bits = parse_int<std::uint64_t>(kv, "payload_bits");
  s.payload_sha256 = field(kv, "payload_sha256");
  s.host_sha256 = field(kv, "host_sha256");
  s.channels = parse_int<std::uint32_t>(kv, "channels");
  s.sample_rate = parse_int<std::uint32_t>(kv, "sample_rate");
  s.samples_per_channel = parse_int<std::uint64_t>(kv, "samples_per_channel");
  const std::string& fmt = field(kv, "source_format");
  if (fmt == "pcm16") s.source_format = SampleFormat::Pcm16;
  else if (fmt == "float64") s.source_format = SampleFormat::Float64;
  else throw FormatError("unknown source_format '" + fmt + "'");
  // IQIM has no nesting matrix of its own; the rate field drives it.
  if (s.spec.scheme == Scheme::Iqim) s.spec.nesting.clear();
  return s;
}

Sidecar read_sidecar(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_sidecar(std::string(bytes.begin(), bytes.end()));
}

void write_sidecar(const Sidecar& sidecar, const std::filesystem::path& path) {
  const std::string text = serialize_sidecar(sidecar);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void check_sidecar(const Sidecar& s, const AudioClip& clip) {
  if (clip.channel_count() != s.channels)
    throw IntegrityError("sidecar expects " + std::to_string(s.channels) + " channels, file has " +
                         std::to_string(clip.channel_count()));
  if (clip.sample_rate != s.sample_rate)
    throw IntegrityError("sidecar expects " + std::to_string(s.sample_rate) + " Hz, file has " +
                         std::to_string(clip.sample_rate));
  if (clip.frames_per_channel() != s.samples_per_channel)
    throw IntegrityError("sidecar expects " + std::to_string(s.samples_per_channel) +
                         " samples per channel, file has " +
                         std::to_string(clip.frames_per_channel()));
}

}  // namespace mme
