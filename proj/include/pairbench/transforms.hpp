#pragma once

#include <opencv2/imgproc.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pairbench/hashing.hpp"
#include "pairbench/image.hpp"
#include "pairbench/rng.hpp"

namespace pairbench {

enum class TransformKind {
  ColorJitter,
  Rotation,
  GaussianBlur,
  PerspectiveShift,
  ElasticTransform,
  SpatialPosition,
};

inline const char* to_code(TransformKind k) {
  switch (k) {
    case TransformKind::ColorJitter: return "CJ";
    case TransformKind::Rotation: return "R";
    case TransformKind::GaussianBlur: return "GB";
    case TransformKind::PerspectiveShift: return "PS";
    case TransformKind::ElasticTransform: return "ET";
    case TransformKind::SpatialPosition: return "SP";
  }
  return "?";
}

inline std::optional<TransformKind> transform_from_code(std::string_view code) {
  if (code == "CJ") return TransformKind::ColorJitter;
  if (code == "R") return TransformKind::Rotation;
  if (code == "GB") return TransformKind::GaussianBlur;
  if (code == "PS") return TransformKind::PerspectiveShift;
  if (code == "ET") return TransformKind::ElasticTransform;
  if (code == "SP") return TransformKind::SpatialPosition;
  return std::nullopt;
}

inline bool is_raster(TransformKind k) {
  return k != TransformKind::SpatialPosition;
}

/// Sampling ranges for raster transform parameters. Strong enough to be
/// unmistakable at typical input resolutions; recorded in every manifest
/// header so downstream runs can audit or override them.
struct TransformRanges {
  double jitter_factor_min = 0.5, jitter_factor_max = 1.5;  // brightness/contrast/saturation
  double hue_shift_max = 0.1;                               // turns, symmetric
  double rotation_min_deg = 25.0, rotation_max_deg = 90.0;  // magnitude, sign random
  double blur_sigma_min = 2.0, blur_sigma_max = 6.0;        // px
  double perspective_max_frac = 0.30;                       // of the short side
  double elastic_mag_min = 30.0, elastic_mag_max = 60.0;    // px
  double elastic_sigma = 5.0;                               // px
};

/// One sampled raster transform: a kind plus concrete numeric parameters.
/// `seed` is the draw that produced the parameters, kept for provenance.
struct Transform {
  TransformKind kind;
  uint64_t seed = 0;
  std::map<std::string, double> params;
};

inline Transform sample_transform(TransformKind kind, uint64_t seed,
                                  const TransformRanges& r = {}) {
  Transform t;
  t.kind = kind;
  t.seed = seed;
  Rng rng(seed);
  switch (kind) {
    case TransformKind::ColorJitter:
      t.params["brightness"] = rng.uniform(r.jitter_factor_min, r.jitter_factor_max);
      t.params["contrast"] = rng.uniform(r.jitter_factor_min, r.jitter_factor_max);
      t.params["saturation"] = rng.uniform(r.jitter_factor_min, r.jitter_factor_max);
      t.params["hue"] = rng.uniform(-r.hue_shift_max, r.hue_shift_max);
      break;
    case TransformKind::Rotation: {
      double mag = rng.uniform(r.rotation_min_deg, r.rotation_max_deg);
      t.params["angle"] = rng.coin() ? mag : -mag;
      break;
    }
    case TransformKind::GaussianBlur:
      t.params["sigma"] = rng.uniform(r.blur_sigma_min, r.blur_sigma_max);
      break;
    case TransformKind::PerspectiveShift:
      // Fraction of the short side each corner moves inward, per axis.
      for (const char* corner : {"tl", "tr", "br", "bl"}) {
        t.params[std::string(corner) + "_dx"] = rng.uniform(0.0, r.perspective_max_frac);
        t.params[std::string(corner) + "_dy"] = rng.uniform(0.0, r.perspective_max_frac);
      }
      break;
    case TransformKind::ElasticTransform:
      t.params["magnitude"] = rng.uniform(r.elastic_mag_min, r.elastic_mag_max);
      t.params["sigma"] = r.elastic_sigma;
      t.params["field_seed"] = static_cast<double>(rng.next_u64() >> 11);
      break;
    case TransformKind::SpatialPosition:
      throw Error("SP is not a raster transform");
  }
  return t;
}

namespace detail {

inline double param(const Transform& t, const std::string& key) {
  auto it = t.params.find(key);
  if (it == t.params.end())
    throw Error(std::string("transform missing parameter: ") + key);
  return it->second;
}

inline uint8_t clamp8(double v) {
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

// Factor pipeline: brightness, contrast (blend toward the mean gray),
// saturation (blend toward per-pixel luma), then hue rotation in HSV.
// Computed in float and rounded once at the end.
inline Image apply_color_jitter(const Image& img, const Transform& t) {
  const double b = param(t, "brightness");
  const double c = param(t, "contrast");
  const double s = param(t, "saturation");
  const double h_turns = param(t, "hue");

  const size_t n = img.pixel_count();
  std::vector<float> buf(img.rgb.begin(), img.rgb.end());

  for (auto& v : buf) v = static_cast<float>(v * b);

  double mean_luma = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mean_luma += 0.299 * buf[3 * i] + 0.587 * buf[3 * i + 1] + 0.114 * buf[3 * i + 2];
  }
  mean_luma /= std::max<size_t>(n, 1);
  for (auto& v : buf) v = static_cast<float>(c * v + (1.0 - c) * mean_luma);

  for (size_t i = 0; i < n; ++i) {
    double luma = 0.299 * buf[3 * i] + 0.587 * buf[3 * i + 1] + 0.114 * buf[3 * i + 2];
    for (int ch = 0; ch < 3; ++ch) {
      auto& v = buf[3 * i + ch];
      v = static_cast<float>(s * v + (1.0 - s) * luma);
    }
  }

  cv::Mat rgbf(img.height, img.width, CV_32FC3, buf.data());
  cv::Mat clamped;
  cv::min(rgbf, 255.0, clamped);
  cv::max(clamped, 0.0, clamped);
  cv::Mat hsv;
  cv::cvtColor(clamped * (1.0 / 255.0), hsv, cv::COLOR_RGB2HSV);
  const float shift_deg = static_cast<float>(h_turns * 360.0);
  hsv.forEach<cv::Vec3f>([shift_deg](cv::Vec3f& p, const int*) {
    p[0] = std::fmod(p[0] + shift_deg + 360.0f, 360.0f);
  });
  cv::Mat back;
  cv::cvtColor(hsv, back, cv::COLOR_HSV2RGB);

  Image out;
  out.width = img.width;
  out.height = img.height;
  out.rgb.resize(img.rgb.size());
  auto* src = back.ptr<float>();
  for (size_t i = 0; i < out.rgb.size(); ++i) out.rgb[i] = clamp8(src[i] * 255.0);
  return out;
}

inline Image apply_rotation(const Image& img, const Transform& t) {
  cv::Mat bgr = to_bgr_mat(img);
  cv::Point2f center(img.width / 2.0f, img.height / 2.0f);
  cv::Mat m = cv::getRotationMatrix2D(center, param(t, "angle"), 1.0);
  cv::Mat out;
  cv::warpAffine(bgr, out, m, bgr.size(), cv::INTER_LINEAR, cv::BORDER_CONSTANT);
  return from_bgr_mat(out);
}

inline Image apply_gaussian_blur(const Image& img, const Transform& t) {
  double sigma = param(t, "sigma");
  if (sigma <= 0.0) throw Error("gaussian blur sigma out of range (must be > 0)");
  cv::Mat out;
  cv::GaussianBlur(to_bgr_mat(img), out, cv::Size(0, 0), sigma, sigma,
                   cv::BORDER_REPLICATE);
  return from_bgr_mat(out);
}

inline Image apply_perspective(const Image& img, const Transform& t) {
  const float w = static_cast<float>(img.width), h = static_cast<float>(img.height);
  const float s = std::min(w, h);
  auto d = [&](const char* key) { return static_cast<float>(param(t, key)) * s; };
  cv::Point2f src[4] = {{0, 0}, {w - 1, 0}, {w - 1, h - 1}, {0, h - 1}};
  cv::Point2f dst[4] = {
      {d("tl_dx"), d("tl_dy")},
      {w - 1 - d("tr_dx"), d("tr_dy")},
      {w - 1 - d("br_dx"), h - 1 - d("br_dy")},
      {d("bl_dx"), h - 1 - d("bl_dy")},
  };
  cv::Mat m = cv::getPerspectiveTransform(src, dst);
  cv::Mat out;
  cv::warpPerspective(to_bgr_mat(img), out, m, cv::Size(img.width, img.height),
                      cv::INTER_LINEAR, cv::BORDER_CONSTANT);
  return from_bgr_mat(out);
}

inline Image apply_elastic(const Image& img, const Transform& t) {
  const double mag = param(t, "magnitude");
  const double sigma = param(t, "sigma");
  const auto field_seed = static_cast<uint64_t>(param(t, "field_seed"));

  Rng rng(field_seed);
  cv::Mat dx(img.height, img.width, CV_32F), dy(img.height, img.width, CV_32F);
  for (int y = 0; y < img.height; ++y) {
    auto* rx = dx.ptr<float>(y);
    auto* ry = dy.ptr<float>(y);
    for (int x = 0; x < img.width; ++x) {
      rx[x] = static_cast<float>(rng.uniform(-1.0, 1.0));
      ry[x] = static_cast<float>(rng.uniform(-1.0, 1.0));
    }
  }
  cv::GaussianBlur(dx, dx, cv::Size(0, 0), sigma, sigma, cv::BORDER_REFLECT);
  cv::GaussianBlur(dy, dy, cv::Size(0, 0), sigma, sigma, cv::BORDER_REFLECT);

  // Normalize so the peak displacement equals `mag` pixels exactly.
  double min_x, max_x, min_y, max_y;
  cv::minMaxLoc(cv::abs(dx), &min_x, &max_x);
  cv::minMaxLoc(cv::abs(dy), &min_y, &max_y);
  double peak = std::max(max_x, max_y);
  double scale = peak > 0 ? mag / peak : 0.0;

  cv::Mat map_x(img.height, img.width, CV_32F), map_y(img.height, img.width, CV_32F);
  for (int y = 0; y < img.height; ++y) {
    auto* rx = dx.ptr<float>(y);
    auto* ry = dy.ptr<float>(y);
    auto* mx = map_x.ptr<float>(y);
    auto* my = map_y.ptr<float>(y);
    for (int x = 0; x < img.width; ++x) {
      mx[x] = static_cast<float>(x + rx[x] * scale);
      my[x] = static_cast<float>(y + ry[x] * scale);
    }
  }
  cv::Mat out;
  cv::remap(to_bgr_mat(img), out, map_x, map_y, cv::INTER_LINEAR,
            cv::BORDER_REFLECT);
  return from_bgr_mat(out);
}

}  // namespace detail

/// Applies a sampled raster transform. Deterministic for a fixed (image,
/// transform) including the embedded seed; output keeps the input format.
inline Image apply_transform(const Image& img, const Transform& t) {
  if (img.empty()) throw Error("apply_transform: empty image");
  switch (t.kind) {
    case TransformKind::ColorJitter: return detail::apply_color_jitter(img, t);
    case TransformKind::Rotation: return detail::apply_rotation(img, t);
    case TransformKind::GaussianBlur: return detail::apply_gaussian_blur(img, t);
    case TransformKind::PerspectiveShift: return detail::apply_perspective(img, t);
    case TransformKind::ElasticTransform: return detail::apply_elastic(img, t);
    case TransformKind::SpatialPosition:
      throw Error("SP is not a raster transform");
  }
  throw Error("unknown transform kind");
}

/// Samples a transform and applies it, resampling (bounded attempts) until
/// the output visibly differs from the input. A near-identity draw would
/// corrupt the ground-truth assignment of the pair it feeds.
inline std::pair<Image, Transform> apply_visible_transform(
    const Image& img, TransformKind kind, uint64_t seed,
    const TransformRanges& ranges = {}, double min_mean_abs_diff = 2.0,
    int max_attempts = 10) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    uint64_t attempt_seed =
        attempt == 0 ? seed : derive_seed(seed, {"resample", std::to_string(attempt)});
    Transform t = sample_transform(kind, attempt_seed, ranges);
    Image out = apply_transform(img, t);
    if (mean_abs_diff(img, out) >= min_mean_abs_diff) return {std::move(out), t};
  }
  throw Error(std::string("transform ") + to_code(kind) +
              " produced no visible change after resampling");
}

}  // namespace pairbench
