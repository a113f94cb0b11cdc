#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pairbench/hashing.hpp"
#include "pairbench/image.hpp"
#include "pairbench/records.hpp"

namespace pairbench {

enum class SourceKind { ImageDir, CocoList, WhatsUpII, WhatsUpIT };

inline const char* to_string(SourceKind k) {
  switch (k) {
    case SourceKind::ImageDir: return "in100";
    case SourceKind::CocoList: return "coco";
    case SourceKind::WhatsUpII: return "whatsup-ii";
    case SourceKind::WhatsUpIT: return "whatsup-it";
  }
  return "?";
}

inline std::optional<SourceKind> source_kind_from(std::string_view s) {
  if (s == "in100" || s == "imagedir") return SourceKind::ImageDir;
  if (s == "coco") return SourceKind::CocoList;
  if (s == "whatsup-ii") return SourceKind::WhatsUpII;
  if (s == "whatsup-it") return SourceKind::WhatsUpIT;
  return std::nullopt;
}

struct SourceItem {
  std::string id;
  Modality modality = Modality::Image;
  fs::path payload_path;  // images
  std::string caption;    // captions (WhatsUp)
  std::vector<std::string> spatial_variants;
  std::string label;
  std::string content_hash;
};

/// Items with stable ids, sorted lexicographically. Loader problems that
/// only cost individual items are demoted to warnings.
struct SourceDataset {
  SourceKind kind = SourceKind::ImageDir;
  fs::path root;
  std::vector<SourceItem> items;
  std::vector<std::string> warnings;

  const SourceItem* find(const std::string& id) const {
    auto it = std::lower_bound(
        items.begin(), items.end(), id,
        [](const SourceItem& a, const std::string& b) { return a.id < b; });
    if (it == items.end() || it->id != id) return nullptr;
    return &*it;
  }

  /// Order-insensitive fingerprint of ids and payload bytes.
  std::string content_hash() const {
    std::string acc;
    for (const auto& item : items) {
      acc += item.id;
      acc.push_back('\x1f');
      acc += item.content_hash;
      acc.push_back('\n');
    }
    return sha256_hex(acc);
  }
};

namespace detail {

inline bool has_image_extension(const fs::path& p) {
  std::string ext = to_lower(p.extension().string());
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" ||
         ext == ".webp";
}

inline bool try_decode(const fs::path& p) {
  return !load_image(p).empty();
}

inline void finalize(SourceDataset& ds) {
  std::sort(ds.items.begin(), ds.items.end(),
            [](const SourceItem& a, const SourceItem& b) { return a.id < b.id; });
  for (size_t i = 1; i < ds.items.size(); ++i)
    if (ds.items[i].id == ds.items[i - 1].id)
      throw Error("duplicate item id in source dataset: " + ds.items[i].id);
  // spatial_variants must reference existing items
  std::set<std::string> ids;
  for (const auto& it : ds.items) ids.insert(it.id);
  for (const auto& it : ds.items)
    for (const auto& v : it.spatial_variants)
      if (!ids.count(v))
        throw Error("item " + it.id + " lists unknown spatial variant " + v);
  if (ds.items.empty()) throw Error("empty source");
}

inline SourceDataset load_image_dir(const fs::path& path) {
  SourceDataset ds;
  ds.kind = SourceKind::ImageDir;
  ds.root = path;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path))
    if (entry.is_regular_file() && has_image_extension(entry.path()))
      files.push_back(entry.path());
  for (const auto& f : files) {
    if (!try_decode(f)) {
      ds.warnings.push_back("undecodable image skipped: " + f.filename().string());
      continue;
    }
    SourceItem item;
    item.id = f.filename().string();
    item.modality = Modality::Image;
    item.payload_path = f;
    item.content_hash = hash_file(f);
    ds.items.push_back(std::move(item));
  }
  finalize(ds);
  return ds;
}

// JSON array (or JSONL) of {"id", "image", "caption"?, "label"?}; image paths
// resolve against the list file's directory.
inline SourceDataset load_coco_list(const fs::path& path) {
  SourceDataset ds;
  ds.kind = SourceKind::CocoList;
  ds.root = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::string content = read_file(path);
  std::vector<json> entries;
  std::string trimmed = trim(content);
  if (!trimmed.empty() && trimmed.front() == '[') {
    for (auto& e : json::parse(trimmed)) entries.push_back(e);
  } else {
    for (const auto& line : split(content, '\n'))
      if (!trim(line).empty()) entries.push_back(json::parse(line));
  }
  for (const auto& e : entries) {
    SourceItem item;
    item.id = e.at("id").get<std::string>();
    item.modality = Modality::Image;
    item.payload_path = ds.root / e.at("image").get<std::string>();
    if (e.contains("caption")) item.caption = e.at("caption").get<std::string>();
    if (e.contains("label")) item.label = e.at("label").get<std::string>();
    if (!fs::exists(item.payload_path) || !try_decode(item.payload_path)) {
      ds.warnings.push_back("undecodable image skipped: " + item.id);
      continue;
    }
    item.content_hash = hash_file(item.payload_path);
    ds.items.push_back(std::move(item));
  }
  finalize(ds);
  return ds;
}

// JSONL of {"id", "image", "caption", "spatial_variants": [ids]}. Items
// without a caption are skipped with a warning; the pair generator enforces
// variant availability where the split needs it.
inline SourceDataset load_whatsup(const fs::path& path, SourceKind kind) {
  SourceDataset ds;
  ds.kind = kind;
  ds.root = path.has_parent_path() ? path.parent_path() : fs::path(".");
  for (const auto& line : split(read_file(path), '\n')) {
    if (trim(line).empty()) continue;
    json e = json::parse(line);
    SourceItem item;
    item.id = e.at("id").get<std::string>();
    item.modality = Modality::Image;
    item.payload_path = ds.root / e.at("image").get<std::string>();
    if (!e.contains("caption") || e.at("caption").get<std::string>().empty()) {
      ds.warnings.push_back("item missing caption skipped: " + item.id);
      continue;
    }
    item.caption = e.at("caption").get<std::string>();
    if (e.contains("spatial_variants"))
      for (const auto& v : e.at("spatial_variants"))
        item.spatial_variants.push_back(v.get<std::string>());
    if (e.contains("label")) item.label = e.at("label").get<std::string>();
    if (!fs::exists(item.payload_path) || !try_decode(item.payload_path)) {
      ds.warnings.push_back("undecodable image skipped: " + item.id);
      continue;
    }
    item.content_hash = hash_file(item.payload_path);
    ds.items.push_back(std::move(item));
  }
  finalize(ds);
  return ds;
}

}  // namespace detail

inline SourceDataset load_source_dataset(const fs::path& path, SourceKind kind) {
  if (!fs::exists(path)) throw Error("unreadable path: " + path.string());
  switch (kind) {
    case SourceKind::ImageDir: return detail::load_image_dir(path);
    case SourceKind::CocoList: return detail::load_coco_list(path);
    case SourceKind::WhatsUpII: return detail::load_whatsup(path, kind);
    case SourceKind::WhatsUpIT: return detail::load_whatsup(path, kind);
  }
  throw Error("unknown source kind");
}

}  // namespace pairbench
