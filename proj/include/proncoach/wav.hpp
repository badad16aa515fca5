// Copyright 2026 The proncoach Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// PCM WAV reading and writing for the one format the service accepts:
// signed 16-bit little-endian, mono, 16 kHz.

#ifndef PRONCOACH_WAV_HPP_
#define PRONCOACH_WAV_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proncoach/errors.hpp"

namespace proncoach {

inline constexpr int kSampleRate = 16000;

struct AudioClip {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = kSampleRate;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

namespace detail {

inline std::uint32_t read_u32(std::string_view b, std::size_t off) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[off])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 3])) << 24;
}

inline std::uint16_t read_u16(std::string_view b, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                    static_cast<unsigned char>(b[off + 1]) << 8);
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

}  // namespace detail

/// Decodes a RIFF/WAVE byte string. Throws CorruptFile for broken
/// containers and UnsupportedFormat for anything but s16le mono 16 kHz PCM.
inline AudioClip decode_wav(std::string_view bytes) {
  using detail::read_u16;
  using detail::read_u32;
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE")
    throw CorruptFile("not a RIFF/WAVE file");

  bool have_fmt = false;
  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const std::string_view id = bytes.substr(off, 4);
    const std::uint32_t size = read_u32(bytes, off + 4);
    const std::size_t body = off + 8;
    if (id == "fmt ") {
      if (size < 16 || body + 16 > bytes.size()) throw CorruptFile("truncated fmt chunk");
      const std::uint16_t format = read_u16(bytes, body);
      const std::uint16_t channels = read_u16(bytes, body + 2);
      const std::uint32_t rate = read_u32(bytes, body + 4);
      const std::uint16_t bits = read_u16(bytes, body + 14);
      if (format != 1 || channels != 1 || rate != kSampleRate || bits != 16)
        throw UnsupportedFormat("expected PCM s16le mono 16000 Hz, got format " +
                                std::to_string(format) + ", " + std::to_string(channels) +
                                " ch, " + std::to_string(rate) + " Hz, " +
                                std::to_string(bits) + " bit");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw CorruptFile("data chunk before fmt chunk");
      if (body + size > bytes.size() || size % 2 != 0) throw CorruptFile("truncated data chunk");
      AudioClip clip;
      clip.samples.resize(size / 2);
      for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(read_u16(bytes, body + 2 * i));
        clip.samples[i] = v / 32768.0;
      }
      return clip;
    }
    if (body + size > bytes.size()) break;
    off = body + size + (size & 1);
  }
  throw CorruptFile(have_fmt ? "missing data chunk" : "missing fmt chunk");
}

/// Encodes samples as a canonical 44-byte-header WAV. Samples are clipped
/// to [-1, 1] and rounded to 16 bits.
inline std::string encode_wav(std::span<const double> samples, int sample_rate = kSampleRate,
                              int channels = 1) {
  using detail::put_u16;
  using detail::put_u32;
  const auto data_size = static_cast<std::uint32_t>(samples.size() * 2);
  std::string out = "RIFF";
  put_u32(out, 36 + data_size);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate * channels * 2));
  put_u16(out, static_cast<std::uint16_t>(channels * 2));
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_size);
  for (double s : samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto v = static_cast<std::int16_t>(std::lround(c * 32767.0));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

}  // namespace proncoach

#endif  // PRONCOACH_WAV_HPP_
