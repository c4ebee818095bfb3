// Copyright 2026 The polyvec Authors.
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

#include "polyvec/base64.hpp"

#include <array>
#include <bit>
#include <cstring>

#include "polyvec/errors.hpp"

namespace polyvec {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::array<int, 256> decode_table() {
  std::array<int, 256> t{};
  t.fill(-1);
  for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(kAlphabet[i])] = i;
  return t;
}

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs assume a little-endian host");

}  // namespace

std::string base64_encode(const std::uint8_t* data, std::size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    const std::uint32_t b0 = data[i];
    const std::uint32_t b1 = i + 1 < len ? data[i + 1] : 0;
    const std::uint32_t b2 = i + 2 < len ? data[i + 2] : 0;
    const std::uint32_t triple = (b0 << 16) | (b1 << 8) | b2;
    out.push_back(kAlphabet[(triple >> 18) & 0x3f]);
    out.push_back(kAlphabet[(triple >> 12) & 0x3f]);
    out.push_back(i + 1 < len ? kAlphabet[(triple >> 6) & 0x3f] : '=');
    out.push_back(i + 2 < len ? kAlphabet[triple & 0x3f] : '=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  static const std::array<int, 256> table = decode_table();
  if (text.size() % 4 != 0) throw data_error("base64: length must be a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4] = {0, 0, 0, 0};
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) throw data_error("base64: misplaced padding");
        ++pad;
        continue;
      }
      if (pad > 0) throw data_error("base64: data after padding");
      vals[k] = table[static_cast<unsigned char>(c)];
      if (vals[k] < 0) throw data_error("base64: invalid character");
    }
    const std::uint32_t triple = (static_cast<std::uint32_t>(vals[0]) << 18) |
                                 (static_cast<std::uint32_t>(vals[1]) << 12) |
                                 (static_cast<std::uint32_t>(vals[2]) << 6) |
                                 static_cast<std::uint32_t>(vals[3]);
    out.push_back(static_cast<std::uint8_t>((triple >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((triple >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(triple & 0xff));
  }
  return out;
}

std::string doubles_to_base64(const std::vector<double>& values) {
  return base64_encode(reinterpret_cast<const std::uint8_t*>(values.data()),
                       values.size() * sizeof(double));
}

std::vector<double> base64_to_doubles(const std::string& text) {
  const std::vector<std::uint8_t> bytes = base64_decode(text);
  if (bytes.size() % sizeof(double) != 0) throw data_error("base64: blob is not a double array");
  std::vector<double> out(bytes.size() / sizeof(double));
  std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

}  // namespace polyvec
