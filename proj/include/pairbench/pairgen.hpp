#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "pairbench/dataset.hpp"
#include "pairbench/hashing.hpp"
#include "pairbench/records.hpp"
#include "pairbench/rng.hpp"
#include "pairbench/transforms.hpp"

namespace pairbench {

struct GenerationConfig {
  TransformRanges ranges;
  double min_visible_diff = 2.0;  // mean abs pixel difference, 0..255 scale
  int max_resample_attempts = 10;
  int transformed_per_original = 1;
  double identical_resize = 0.95;

  json to_json() const {
    json j;
    j["identical_resize"] = identical_resize;
    j["min_visible_diff"] = min_visible_diff;
    j["max_resample_attempts"] = max_resample_attempts;
    j["transformed_per_original"] = transformed_per_original;
    j["ranges"] = {
        {"jitter_factor", {ranges.jitter_factor_min, ranges.jitter_factor_max}},
        {"hue_shift_max", ranges.hue_shift_max},
        {"rotation_deg", {ranges.rotation_min_deg, ranges.rotation_max_deg}},
        {"blur_sigma", {ranges.blur_sigma_min, ranges.blur_sigma_max}},
        {"perspective_max_frac", ranges.perspective_max_frac},
        {"elastic_magnitude", {ranges.elastic_mag_min, ranges.elastic_mag_max}},
        {"elastic_sigma", ranges.elastic_sigma},
    };
    return j;
  }
};

/// Swaps the single spatial relation in a caption for its opposite.
/// Vocabulary: left/right, on/under, in front of/behind. Zero or multiple
/// relation tokens is an error; callers rely on the flip being unambiguous.
inline std::string flip_spatial_caption(const std::string& caption) {
  static const std::vector<std::pair<std::string, std::string>> vocab = {
      {"left", "right"},         {"right", "left"},
      {"on", "under"},           {"under", "on"},
      {"in front of", "behind"}, {"behind", "in front of"},
  };
  struct Match {
    size_t pos;
    size_t len;
    const std::string* replacement;
    const std::string* token;
  };
  auto is_word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
  };
  std::vector<Match> matches;
  for (const auto& [token, opposite] : vocab) {
    size_t pos = 0;
    while ((pos = caption.find(token, pos)) != std::string::npos) {
      bool left_ok = pos == 0 || !is_word_char(caption[pos - 1]);
      size_t end = pos + token.size();
      bool right_ok = end == caption.size() || !is_word_char(caption[end]);
      if (left_ok && right_ok)
        matches.push_back({pos, token.size(), &opposite, &token});
      pos = end;
    }
  }
  // "in front of" also surfaces its own substring matches of other tokens?
  // No token overlaps another alphabetically, so the only dedup needed is
  // none; but guard against nested positions for future vocab growth.
  if (matches.size() != 1) {
    std::string listed;
    for (const auto& m : matches) {
      if (!listed.empty()) listed += ", ";
      listed += "'" + *m.token + "' at " + std::to_string(m.pos);
    }
    throw Error("caption must contain exactly one relation token, found " +
                std::to_string(matches.size()) +
                (matches.empty() ? "" : " (" + listed + ")") + ": " + caption);
  }
  std::string out = caption;
  out.replace(matches[0].pos, matches[0].len, *matches[0].replacement);
  return out;
}

namespace detail {

inline std::string relative_to(const fs::path& target, const fs::path& base) {
  std::error_code ec;
  fs::path rel = fs::relative(fs::weakly_canonical(target),
                              fs::weakly_canonical(base), ec);
  if (ec || rel.empty()) return fs::weakly_canonical(target).string();
  return rel.generic_string();
}

inline DataRef source_image_ref(const SourceItem& item, const fs::path& out_dir) {
  DataRef ref;
  ref.id = item.id;
  ref.modality = Modality::Image;
  ref.path = relative_to(item.payload_path, out_dir);
  ref.hash = item.content_hash;
  return ref;
}

inline DataRef caption_ref(const std::string& id, const std::string& text) {
  DataRef ref;
  ref.id = id;
  ref.modality = Modality::Caption;
  ref.text = text;
  ref.hash = sha256_hex(text);
  return ref;
}

inline DataRef write_payload(const fs::path& out_dir, const std::string& subdir,
                             const std::string& pair_id, const Image& img) {
  std::string rel = "payloads/" + subdir + "/" + pair_id + ".png";
  save_png(out_dir / rel, img);
  DataRef ref;
  ref.id = pair_id;
  ref.modality = Modality::Image;
  ref.path = rel;
  ref.hash = hash_file(out_dir / rel);
  return ref;
}

}  // namespace detail

/// Generates identical / transformed / irrelevant pairs for one split and
/// materializes synthesized rasters under <out_dir>/payloads/. Pure function
/// of (source content, kinds, config, seed): reruns are byte-identical.
class PairGenerator {
 public:
  PairGenerator(const SourceDataset& src, std::vector<TransformKind> kinds,
                uint64_t master_seed, std::string dataset_label,
                fs::path out_dir, GenerationConfig cfg = {})
      : src_(src),
        kinds_(std::move(kinds)),
        master_seed_(master_seed),
        dataset_label_(std::move(dataset_label)),
        out_dir_(std::move(out_dir)),
        cfg_(cfg) {
    validate_kinds();
    split_ = dataset_label_ + ":" + kinds_code();
  }

  std::string kinds_code() const {
    std::string code;
    if (has_sp_) code = "SP";
    if (raster_kind_) {
      if (!code.empty()) code += "-";
      code += to_code(*raster_kind_);
    }
    return code;
  }

  PairManifest run() {
    if (src_.items.empty()) throw Error("empty source");
    fs::create_directories(out_dir_ / "payloads");

    PairManifest manifest;
    manifest.dir = out_dir_;
    for (const auto& item : src_.items) {
      make_identical(item, manifest);
      for (int k = 0; k < cfg_.transformed_per_original; ++k)
        make_transformed(item, k, manifest);
      make_irrelevant(item, manifest);
    }
    std::sort(manifest.records.begin(), manifest.records.end(),
              [](const PairRecord& a, const PairRecord& b) {
                return a.pair_id < b.pair_id;
              });

    auto& h = manifest.header;
    h.dataset = dataset_label_;
    h.split = split_;
    h.source_kind = to_string(src_.kind);
    h.source_path = src_.root.string();
    h.source_hash = src_.content_hash();
    if (has_sp_) h.transform_kinds.push_back("SP");
    if (raster_kind_) h.transform_kinds.push_back(to_code(*raster_kind_));
    h.seed = master_seed_;
    h.config = cfg_.to_json();
    h.warnings = src_.warnings;
    h.counts.originals = src_.items.size();
    h.counts.pairs = manifest.records.size();
    h.counts.comparisons = manifest.records.size() * 2;
    h.counts.new_payloads = new_payloads_;
    h.counts.near_duplicates = near_duplicates_;
    return manifest;
  }

 private:
  void validate_kinds() {
    if (kinds_.empty()) throw Error("no transform kinds given");
    for (auto k : kinds_) {
      if (k == TransformKind::SpatialPosition) {
        if (has_sp_) throw Error("duplicate SP kind");
        has_sp_ = true;
      } else {
        if (raster_kind_) throw Error("at most one raster transform kind per split");
        raster_kind_ = k;
      }
    }
    const bool image_text = src_.kind == SourceKind::WhatsUpIT;
    if (image_text && (raster_kind_ || !has_sp_))
      throw Error("image-text splits support the SP transform only");
    if (has_sp_ && !image_text) {
      for (const auto& item : src_.items)
        if (item.spatial_variants.empty())
          throw Error("SP requested but item has no spatial variants: " + item.id);
    }
  }

  uint64_t pair_seed(const SourceItem& o, const char* pair_type,
                     const std::string& extra = "") const {
    return derive_seed(master_seed_,
                       {o.id, pair_type, kinds_code(), extra});
  }

  int draw_template(uint64_t seed) const {
    Rng rng(derive_seed(seed, {"template"}));
    return 1 + static_cast<int>(rng.uniform_int(5));
  }

  void set_ground_truth(PairRecord& rec) const {
    auto [sens, inv] = ground_truth(rec.pair_type);
    rec.gt_sensitive = sens;
    rec.gt_invariant = inv;
  }

  void make_identical(const SourceItem& o, PairManifest& m) {
    PairRecord rec;
    rec.pair_id = sanitize_id(o.id) + ".ident";
    rec.split = split_;
    rec.pair_type = PairType::Identical;
    rec.seed = pair_seed(o, "identical");
    rec.template_id = draw_template(rec.seed);
    rec.left = detail::source_image_ref(o, out_dir_);
    if (src_.kind == SourceKind::WhatsUpIT) {
      rec.right = detail::caption_ref(o.id + "#caption", o.caption);
    } else {
      Image img = load_image(o.payload_path);
      if (img.width < 20 || img.height < 20)
        throw Error("image too small for identical resize (min 20x20): " + o.id);
      // Exact floor(d * frac) via rational arithmetic; a plain double
      // multiply rounds 0.95*640 below 608.
      auto scaled = [&](int d) {
        auto num = static_cast<long long>(std::llround(cfg_.identical_resize * 10000.0));
        return static_cast<int>(static_cast<long long>(d) * num / 10000);
      };
      int w = scaled(img.width);
      int h = scaled(img.height);
      rec.right = detail::write_payload(out_dir_, "ident", rec.pair_id,
                                        resize_bilinear(img, w, h));
      ++near_duplicates_;
    }
    set_ground_truth(rec);
    m.records.push_back(std::move(rec));
  }

  // Applies the split's transform chain to `subject`, starting from the
  // spatial sibling when SP is active. Returns the right-side reference and
  // appends applied transforms to rec.transform.
  DataRef transformed_right(const SourceItem& subject, PairRecord& rec,
                            uint64_t seed) {
    const SourceItem* base = &subject;
    if (has_sp_) {
      Rng rng(derive_seed(seed, {"sp-choice"}));
      const auto& variants = subject.spatial_variants;
      const std::string& pick =
          variants[rng.uniform_int(variants.size())];
      base = src_.find(pick);
      if (!base) throw Error("spatial variant not found: " + pick);
      Transform sp;
      sp.kind = TransformKind::SpatialPosition;
      sp.seed = seed;
      rec.transform.push_back(sp);
    }
    if (!raster_kind_) return detail::source_image_ref(*base, out_dir_);

    Image img = load_image(base->payload_path);
    auto [out, t] = apply_visible_transform(
        img, *raster_kind_, derive_seed(seed, {"raster"}), cfg_.ranges,
        cfg_.min_visible_diff, cfg_.max_resample_attempts);
    rec.transform.push_back(t);
    ++new_payloads_;
    return detail::write_payload(out_dir_, "synth", rec.pair_id, out);
  }

  void make_transformed(const SourceItem& o, int index, PairManifest& m) {
    PairRecord rec;
    rec.pair_id = sanitize_id(o.id) + ".trans" + std::to_string(index);
    rec.split = split_;
    rec.pair_type = PairType::Transformed;
    rec.seed = pair_seed(o, "transformed", std::to_string(index));
    rec.template_id = draw_template(rec.seed);
    rec.left = detail::source_image_ref(o, out_dir_);
    if (src_.kind == SourceKind::WhatsUpIT) {
      Transform sp;
      sp.kind = TransformKind::SpatialPosition;
      sp.seed = rec.seed;
      rec.transform.push_back(sp);
      rec.right = detail::caption_ref(o.id + "#flipped",
                                      flip_spatial_caption(o.caption));
    } else {
      rec.right = transformed_right(o, rec, rec.seed);
    }
    set_ground_truth(rec);
    m.records.push_back(std::move(rec));
  }

  void make_irrelevant(const SourceItem& o, PairManifest& m) {
    if (src_.items.size() < 2)
      throw Error("irrelevant pair needs a pool of at least 2 items");
    PairRecord rec;
    rec.pair_id = sanitize_id(o.id) + ".irrel";
    rec.split = split_;
    rec.pair_type = PairType::Irrelevant;
    rec.seed = pair_seed(o, "irrelevant");
    rec.template_id = draw_template(rec.seed);
    rec.left = detail::source_image_ref(o, out_dir_);

    Rng rng(derive_seed(rec.seed, {"distractor"}));
    size_t idx = rng.uniform_int(src_.items.size() - 1);
    size_t self = static_cast<size_t>(&o - src_.items.data());
    if (idx >= self) ++idx;  // draw over the pool minus the anchor
    const SourceItem& distractor = src_.items[idx];

    if (src_.kind == SourceKind::WhatsUpIT) {
      Transform sp;
      sp.kind = TransformKind::SpatialPosition;
      sp.seed = rec.seed;
      rec.transform.push_back(sp);
      rec.right = detail::caption_ref(distractor.id + "#flipped",
                                      flip_spatial_caption(distractor.caption));
    } else {
      rec.right = transformed_right(distractor, rec, rec.seed);
    }
    set_ground_truth(rec);
    m.records.push_back(std::move(rec));
  }

  const SourceDataset& src_;
  std::vector<TransformKind> kinds_;
  uint64_t master_seed_;
  std::string dataset_label_;
  fs::path out_dir_;
  GenerationConfig cfg_;
  std::string split_;
  bool has_sp_ = false;
  std::optional<TransformKind> raster_kind_;
  size_t new_payloads_ = 0;
  size_t near_duplicates_ = 0;
};

inline PairManifest generate_split(const SourceDataset& src,
                                   const std::vector<TransformKind>& kinds,
                                   uint64_t seed, const std::string& dataset_label,
                                   const fs::path& out_dir,
                                   const GenerationConfig& cfg = {}) {
  PairGenerator gen(src, kinds, seed, dataset_label, out_dir, cfg);
  return gen.run();
}

}  // namespace pairbench
