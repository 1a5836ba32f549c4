// SPDX-License-Identifier: Apache-2.0
// Little-endian byte stream helpers shared by the on-disk formats.
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace prunelab::io {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(char(v)); }
  void u16(std::uint16_t v) { raw_le(&v, 2); }
  void u32(std::uint32_t v) { raw_le(&v, 4); }
  void u64(std::uint64_t v) { raw_le(&v, 8); }
  void i32(std::int32_t v) { raw_le(&v, 4); }
  void f32(float v) { raw_le(&v, 4); }
  void f32_array(const float* p, std::size_t n) { raw_le(p, 4 * n); }
  void str(const std::string& s) {
    u32(std::uint32_t(s.size()));
    buf_.append(s);
  }
  void bytes(const void* p, std::size_t n) {
    buf_.append(static_cast<const char*>(p), n);
  }

  const std::string& data() const { return buf_; }

 private:
  // Host is little-endian on every supported target; memcpy is the layout.
  void raw_le(const void* p, std::size_t n) {
    buf_.append(static_cast<const char*>(p), n);
  }
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string data) : buf_(std::move(data)) {}

  std::uint8_t u8() { return std::uint8_t(take(1)[0]); }
  std::uint16_t u16() { return read_as<std::uint16_t>(); }
  std::uint32_t u32() { return read_as<std::uint32_t>(); }
  std::uint64_t u64() { return read_as<std::uint64_t>(); }
  std::int32_t i32() { return read_as<std::int32_t>(); }
  float f32() { return read_as<float>(); }
  void f32_array(float* out, std::size_t n) {
    const char* p = take(4 * n);
    std::memcpy(out, p, 4 * n);
  }
  std::string str() {
    const std::uint32_t n = u32();
    const char* p = take(n);
    return std::string(p, n);
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return buf_.size() - pos_; }
  const std::string& data() const { return buf_; }

 private:
  template <typename T>
  T read_as() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }
  const char* take(std::size_t n) {
    if (pos_ + n > buf_.size())
      throw std::runtime_error("truncated file: wanted " + std::to_string(n) +
                               " bytes at offset " + std::to_string(pos_));
    const char* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::string buf_;
  std::size_t pos_ = 0;
};

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f.write(bytes.data(), std::streamsize(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::string s((std::istreambuf_iterator<char>(f)),
                std::istreambuf_iterator<char>());
  return s;
}

}  // namespace prunelab::io
