// SPDX-License-Identifier: Apache-2.0
//
// Program images: flat binaries and minimal ELF32 (PT_LOAD segments only).

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace positrv::sim {

struct Segment {
  std::uint32_t addr = 0;
  std::vector<std::uint8_t> bytes;
};

struct Image {
  std::vector<Segment> segments;
  std::uint32_t entry = 0;
};

inline Image flat_image(std::vector<std::uint8_t> bytes, std::uint32_t base, std::uint32_t entry) {
  Image img;
  img.segments.push_back({base, std::move(bytes)});
  img.entry = entry;
  return img;
}

inline Image words_image(const std::vector<std::uint32_t>& words, std::uint32_t base) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(words.size() * 4);
  for (std::uint32_t w : words)
    for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<std::uint8_t>(w >> (8 * b)));
  return flat_image(std::move(bytes), base, base);
}

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

namespace detail {
inline std::uint32_t le32(const std::vector<std::uint8_t>& b, std::size_t off) {
  if (off + 4 > b.size()) throw std::runtime_error("truncated ELF file");
  return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}
inline std::uint16_t le16(const std::vector<std::uint8_t>& b, std::size_t off) {
  if (off + 2 > b.size()) throw std::runtime_error("truncated ELF file");
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}
}  // namespace detail

inline bool is_elf(const std::vector<std::uint8_t>& b) {
  return b.size() >= 4 && b[0] == 0x7F && b[1] == 'E' && b[2] == 'L' && b[3] == 'F';
}

/// Loads a little-endian ELF32 RISC-V executable. Only PT_LOAD program
/// headers are honoured; the bss tail (memsz > filesz) is zero filled.
inline Image elf_image(const std::vector<std::uint8_t>& b) {
  using detail::le16;
  using detail::le32;
  if (!is_elf(b) || b.size() < 52) throw std::runtime_error("not an ELF file");
  if (b[4] != 1) throw std::runtime_error("ELF file is not 32-bit");
  if (b[5] != 1) throw std::runtime_error("ELF file is not little-endian");
  if (le16(b, 18) != 243) throw std::runtime_error("ELF machine is not RISC-V");

  Image img;
  img.entry = le32(b, 24);
  const std::uint32_t phoff = le32(b, 28);
  const std::uint16_t phentsize = le16(b, 42);
  const std::uint16_t phnum = le16(b, 44);
  for (std::uint16_t i = 0; i < phnum; ++i) {
    const std::size_t ph = phoff + static_cast<std::size_t>(i) * phentsize;
    if (le32(b, ph) != 1) continue;  // PT_LOAD
    const std::uint32_t offset = le32(b, ph + 4);
    const std::uint32_t paddr = le32(b, ph + 12);
    const std::uint32_t filesz = le32(b, ph + 16);
    const std::uint32_t memsz = le32(b, ph + 20);
    if (static_cast<std::size_t>(offset) + filesz > b.size())
      throw std::runtime_error("ELF segment exceeds file");
    Segment s;
    s.addr = paddr;
    s.bytes.assign(b.begin() + offset, b.begin() + offset + filesz);
    s.bytes.resize(memsz > filesz ? memsz : filesz, 0);
    img.segments.push_back(std::move(s));
  }
  return img;
}

}  // namespace positrv::sim
