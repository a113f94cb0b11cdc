#pragma once

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "pairbench/common.hpp"

namespace pairbench {

/// Decoded raster, 8-bit RGB interleaved. OpenCV is an implementation detail
/// of the codec and warp paths; it never leaks through this surface.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;  // width*height*3, row-major

  bool empty() const { return width == 0 || height == 0; }
  size_t pixel_count() const {
    return static_cast<size_t>(width) * static_cast<size_t>(height);
  }
  uint8_t* px(int x, int y) { return rgb.data() + 3 * (static_cast<size_t>(y) * width + x); }
  const uint8_t* px(int x, int y) const {
    return rgb.data() + 3 * (static_cast<size_t>(y) * width + x);
  }
};

namespace detail {

inline cv::Mat to_bgr_mat(const Image& img) {
  cv::Mat rgb(img.height, img.width, CV_8UC3,
              const_cast<uint8_t*>(img.rgb.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

inline Image from_bgr_mat(const cv::Mat& bgr) {
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  Image img;
  img.width = rgb.cols;
  img.height = rgb.rows;
  img.rgb.resize(img.pixel_count() * 3);
  if (rgb.isContinuous()) {
    std::memcpy(img.rgb.data(), rgb.data, img.rgb.size());
  } else {
    for (int y = 0; y < rgb.rows; ++y)
      std::memcpy(img.rgb.data() + static_cast<size_t>(y) * rgb.cols * 3,
                  rgb.ptr(y), static_cast<size_t>(rgb.cols) * 3);
  }
  return img;
}

}  // namespace detail

/// Decodes PNG/JPEG/BMP/WebP bytes. Returns an empty Image on failure.
inline Image decode_image(const std::vector<unsigned char>& bytes) {
  cv::Mat bgr = cv::imdecode(bytes, cv::IMREAD_COLOR);
  if (bgr.empty()) return {};
  return detail::from_bgr_mat(bgr);
}

inline Image load_image(const fs::path& path) {
  return decode_image(read_file_bytes(path));
}

inline std::vector<unsigned char> encode_png(const Image& img) {
  std::vector<unsigned char> out;
  if (!cv::imencode(".png", detail::to_bgr_mat(img), out))
    throw Error("png encode failed");
  return out;
}

inline void save_png(const fs::path& path, const Image& img) {
  auto bytes = encode_png(img);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                    bytes.size()));
}

inline Image resize_bilinear(const Image& img, int new_w, int new_h) {
  if (new_w < 1 || new_h < 1) throw Error("resize to degenerate size");
  cv::Mat out;
  cv::resize(detail::to_bgr_mat(img), out, cv::Size(new_w, new_h), 0, 0,
             cv::INTER_LINEAR);
  return detail::from_bgr_mat(out);
}

/// Mean absolute per-channel difference on the 0..255 scale.
inline double mean_abs_diff(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw Error("mean_abs_diff: size mismatch");
  size_t n = a.rgb.size();
  if (n == 0) return 0.0;
  uint64_t total = 0;
  for (size_t i = 0; i < n; ++i)
    total += static_cast<uint64_t>(std::abs(int(a.rgb[i]) - int(b.rgb[i])));
  return static_cast<double>(total) / static_cast<double>(n);
}

inline double mean_brightness(const Image& img) {
  if (img.rgb.empty()) return 0.0;
  uint64_t total = 0;
  for (uint8_t v : img.rgb) total += v;
  return static_cast<double>(total) / static_cast<double>(img.rgb.size());
}

}  // namespace pairbench
