//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "snet/image_io.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>

namespace snet {

namespace {

void put_u32be(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

uint32_t get_u32be(const std::string& s, size_t off) {
  return (static_cast<uint32_t>(static_cast<unsigned char>(s[off])) << 24) |
         (static_cast<uint32_t>(static_cast<unsigned char>(s[off + 1])) << 16) |
         (static_cast<uint32_t>(static_cast<unsigned char>(s[off + 2])) << 8) |
         static_cast<uint32_t>(static_cast<unsigned char>(s[off + 3]));
}

void append_chunk(std::string& out, const char type[4], const std::string& data) {
  put_u32be(out, static_cast<uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  uint32_t crc = static_cast<uint32_t>(::crc32(
      0, reinterpret_cast<const unsigned char*>(body.data()), static_cast<uInt>(body.size())));
  put_u32be(out, crc);
}

// Raw deflate stream of stored blocks plus the zlib wrapper.
std::string zlib_stored(const std::string& raw) {
  std::string out;
  out.push_back(0x78);  // CMF: deflate, 32k window
  out.push_back(0x01);  // FLG: no dict, fastest (checksum-consistent)
  size_t pos = 0;
  do {
    size_t n = std::min<size_t>(raw.size() - pos, 65535);
    bool final = pos + n == raw.size();
    out.push_back(final ? 1 : 0);  // BFINAL, BTYPE=00 (stored)
    out.push_back(static_cast<char>(n & 0xff));
    out.push_back(static_cast<char>((n >> 8) & 0xff));
    out.push_back(static_cast<char>(~n & 0xff));
    out.push_back(static_cast<char>((~n >> 8) & 0xff));
    out.append(raw, pos, n);
    pos += n;
  } while (pos < raw.size());
  uint32_t adler = static_cast<uint32_t>(::adler32(
      1, reinterpret_cast<const unsigned char*>(raw.data()), static_cast<uInt>(raw.size())));
  put_u32be(out, adler);
  return out;
}

const char kPngSig[8] = {'\x89', 'P', 'N', 'G', '\r', '\n', '\x1a', '\n'};

int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

std::string encode_png(const ImageU8& img) {
  if (img.width < 1 || img.height < 1 || (img.channels != 1 && img.channels != 3))
    throw FormatError("encode_png: unsupported geometry " + std::to_string(img.width) + "x" +
                      std::to_string(img.height) + "x" + std::to_string(img.channels));
  const size_t expect = static_cast<size_t>(img.width * img.height * img.channels);
  if (img.pixels.size() != expect)
    throw FormatError("encode_png: pixel buffer size mismatch");

  std::string out(kPngSig, 8);
  std::string ihdr;
  put_u32be(ihdr, static_cast<uint32_t>(img.width));
  put_u32be(ihdr, static_cast<uint32_t>(img.height));
  ihdr.push_back(8);                                   // bit depth
  ihdr.push_back(img.channels == 1 ? 0 : 2);           // color type
  ihdr.push_back(0);                                   // compression
  ihdr.push_back(0);                                   // filter
  ihdr.push_back(0);                                   // interlace
  append_chunk(out, "IHDR", ihdr);

  const size_t stride = static_cast<size_t>(img.width * img.channels);
  std::string raw;
  raw.reserve((stride + 1) * static_cast<size_t>(img.height));
  for (int64_t r = 0; r < img.height; ++r) {
    raw.push_back(0);  // filter: none
    raw.append(reinterpret_cast<const char*>(img.pixels.data() + r * stride), stride);
  }
  append_chunk(out, "IDAT", zlib_stored(raw));
  append_chunk(out, "IEND", "");
  return out;
}

void write_png(const ImageU8& img, const std::string& path) {
  write_file(path, encode_png(img));
}

ImageU8 decode_png(const std::string& s, const std::string& context) {
  auto bad = [&](const std::string& why) {
    return FormatError("png '" + context + "': " + why);
  };
  if (s.size() < 8 || std::memcmp(s.data(), kPngSig, 8) != 0) throw bad("bad signature");
  ImageU8 img;
  std::string idat;
  bool seen_ihdr = false, seen_iend = false;
  size_t off = 8;
  while (off + 12 <= s.size()) {
    uint32_t len = get_u32be(s, off);
    if (off + 12 + len > s.size()) throw bad("truncated chunk");
    std::string type = s.substr(off + 4, 4);
    std::string body = s.substr(off + 8, len);
    std::string crc_input = s.substr(off + 4, 4 + static_cast<size_t>(len));
    uint32_t crc = static_cast<uint32_t>(::crc32(
        0, reinterpret_cast<const unsigned char*>(crc_input.data()),
        static_cast<uInt>(crc_input.size())));
    if (crc != get_u32be(s, off + 8 + len)) throw bad("chunk crc mismatch (" + type + ")");
    off += 12 + len;
    if (type == "IHDR") {
      if (len != 13) throw bad("bad IHDR length");
      img.width = get_u32be(body, 0);
      img.height = get_u32be(body, 4);
      int depth = static_cast<unsigned char>(body[8]);
      int color = static_cast<unsigned char>(body[9]);
      int interlace = static_cast<unsigned char>(body[12]);
      if (depth != 8) throw bad("only 8-bit supported");
      if (color == 0)
        img.channels = 1;
      else if (color == 2)
        img.channels = 3;
      else
        throw bad("only grayscale/RGB supported");
      if (interlace != 0) throw bad("interlaced PNG not supported");
      seen_ihdr = true;
    } else if (type == "IDAT") {
      idat += body;
    } else if (type == "IEND") {
      seen_iend = true;
      break;
    }
    // ancillary chunks ignored
  }
  if (!seen_ihdr || !seen_iend) throw bad("missing IHDR/IEND");
  if (img.width < 1 || img.height < 1) throw bad("empty image");

  const size_t stride = static_cast<size_t>(img.width * img.channels);
  const size_t raw_len = (stride + 1) * static_cast<size_t>(img.height);
  std::vector<unsigned char> raw(raw_len);
  uLongf dest_len = static_cast<uLongf>(raw_len);
  int rc = ::uncompress(raw.data(), &dest_len,
                        reinterpret_cast<const unsigned char*>(idat.data()),
                        static_cast<uLong>(idat.size()));
  if (rc != Z_OK || dest_len != raw_len) throw bad("inflate failed");

  img.pixels.assign(stride * static_cast<size_t>(img.height), 0);
  const int bpp = static_cast<int>(img.channels);
  std::vector<unsigned char> prev(stride, 0);
  for (int64_t r = 0; r < img.height; ++r) {
    const unsigned char* src = raw.data() + static_cast<size_t>(r) * (stride + 1);
    unsigned char filter = src[0];
    ++src;
    unsigned char* dst = img.pixels.data() + static_cast<size_t>(r) * stride;
    for (size_t i = 0; i < stride; ++i) {
      int a = i >= static_cast<size_t>(bpp) ? dst[i - bpp] : 0;
      int b = prev[i];
      int c = i >= static_cast<size_t>(bpp) ? prev[i - bpp] : 0;
      int x = src[i];
      int v;
      switch (filter) {
        case 0: v = x; break;
        case 1: v = x + a; break;
        case 2: v = x + b; break;
        case 3: v = x + (a + b) / 2; break;
        case 4: v = x + paeth(a, b, c); break;
        default: throw bad("unknown filter type " + std::to_string(filter));
      }
      dst[i] = static_cast<unsigned char>(v & 0xff);
    }
    std::memcpy(prev.data(), dst, stride);
  }
  return img;
}

ImageU8 read_png(const std::string& path) { return decode_png(read_file(path), path); }

uint8_t quantize_unit(double v) {
  if (!(v >= 0.0 && v <= 1.0))
    throw NumericError("quantize_unit: value " + format_double(v) + " outside [0,1]");
  return static_cast<uint8_t>(std::floor(v * 255.0 + 0.5));
}

Tensor read_frame(const std::string& path) {
  ImageU8 img = read_png(path);
  const int64_t c = img.channels, h = img.height, w = img.width;
  std::vector<double> data(static_cast<size_t>(c * h * w));
  // interleaved u8 -> planar [C,H,W]
  for (int64_t y = 0; y < h; ++y)
    for (int64_t x = 0; x < w; ++x)
      for (int64_t ch = 0; ch < c; ++ch)
        data[static_cast<size_t>((ch * h + y) * w + x)] =
            img.pixels[static_cast<size_t>((y * w + x) * c + ch)] / 255.0;
  return Tensor::from_data({c, h, w}, std::move(data), false);
}

void write_frame(const Tensor& frame, const std::string& path) {
  if (frame.ndim() != 3 || (frame.dim(0) != 1 && frame.dim(0) != 3))
    throw ShapeError("write_frame: expected [1|3,H,W], got " + shape_to_string(frame.shape()));
  frame.check_finite("write_frame");
  const int64_t c = frame.dim(0), h = frame.dim(1), w = frame.dim(2);
  ImageU8 img;
  img.width = w;
  img.height = h;
  img.channels = c;
  img.pixels.resize(static_cast<size_t>(c * h * w));
  const auto& v = frame.values();
  for (int64_t y = 0; y < h; ++y)
    for (int64_t x = 0; x < w; ++x)
      for (int64_t ch = 0; ch < c; ++ch)
        img.pixels[static_cast<size_t>((y * w + x) * c + ch)] =
            quantize_unit(v[static_cast<size_t>((ch * h + y) * w + x)]);
  write_png(img, path);
}

}  // namespace snet
