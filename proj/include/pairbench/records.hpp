#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pairbench/common.hpp"
#include "pairbench/transforms.hpp"
#include "pairbench/version.hpp"

namespace pairbench {

using json = nlohmann::ordered_json;

enum class Modality { Image, Caption };
enum class PairType { Identical, Transformed, Irrelevant };
enum class Condition { Sensitive, Invariant };
enum class Order { Forward, Reverse };

inline const char* to_string(Modality m) {
  return m == Modality::Image ? "image" : "caption";
}
inline const char* to_string(PairType t) {
  switch (t) {
    case PairType::Identical: return "identical";
    case PairType::Transformed: return "transformed";
    case PairType::Irrelevant: return "irrelevant";
  }
  return "?";
}
inline const char* to_string(Condition c) {
  return c == Condition::Sensitive ? "sensitive" : "invariant";
}
inline const char* to_string(Order o) {
  return o == Order::Forward ? "forward" : "reverse";
}

inline PairType pair_type_from(std::string_view s) {
  if (s == "identical") return PairType::Identical;
  if (s == "transformed") return PairType::Transformed;
  if (s == "irrelevant") return PairType::Irrelevant;
  throw Error("unknown pair type: " + std::string(s));
}
inline Condition condition_from(std::string_view s) {
  if (s == "sensitive" || s == "sens") return Condition::Sensitive;
  if (s == "invariant" || s == "inv") return Condition::Invariant;
  throw Error("unknown condition: " + std::string(s));
}
inline Order order_from(std::string_view s) {
  if (s == "forward") return Order::Forward;
  if (s == "reverse") return Order::Reverse;
  throw Error("unknown order: " + std::string(s));
}

/// Ground truth per pair type, keyed by condition: (sensitive, invariant).
inline std::pair<int, int> ground_truth(PairType t) {
  switch (t) {
    case PairType::Identical: return {10, 10};
    case PairType::Transformed: return {6, 10};
    case PairType::Irrelevant: return {1, 1};
  }
  throw Error("unknown pair type");
}

/// Reference to one side of a pair: an image file (path relative to the
/// manifest directory, or absolute) or an inline caption. `hash` is the
/// SHA-256 of the payload bytes / caption text.
struct DataRef {
  std::string id;
  Modality modality = Modality::Image;
  std::string path;  // images only
  std::string text;  // captions only
  std::string hash;

  json to_json() const {
    json j;
    j["id"] = id;
    j["modality"] = to_string(modality);
    if (modality == Modality::Image) j["path"] = path;
    else j["text"] = text;
    j["hash"] = hash;
    return j;
  }

  static DataRef from_json(const json& j) {
    DataRef r;
    r.id = j.at("id").get<std::string>();
    std::string m = j.at("modality").get<std::string>();
    r.modality = m == "image" ? Modality::Image : Modality::Caption;
    if (r.modality == Modality::Image) r.path = j.at("path").get<std::string>();
    else r.text = j.at("text").get<std::string>();
    r.hash = j.at("hash").get<std::string>();
    return r;
  }
};

inline json transform_to_json(const Transform& t) {
  json j;
  j["kind"] = to_code(t.kind);
  j["seed"] = t.seed;
  json p = json::object();
  for (const auto& [k, v] : t.params) p[k] = v;
  j["params"] = p;
  return j;
}

inline Transform transform_from_json(const json& j) {
  Transform t;
  auto kind = transform_from_code(j.at("kind").get<std::string>());
  if (!kind) throw Error("unknown transform kind in record");
  t.kind = *kind;
  t.seed = j.at("seed").get<uint64_t>();
  for (auto& [k, v] : j.at("params").items()) t.params[k] = v.get<double>();
  return t;
}

/// One comparison unit. `left` is always the untransformed original;
/// `transform` lists the applied transforms in application order (empty for
/// identical pairs and for SP-only pairs, whose swap is captured by `right`).
struct PairRecord {
  std::string pair_id;
  std::string split;
  DataRef left;
  DataRef right;
  PairType pair_type = PairType::Identical;
  std::vector<Transform> transform;
  int gt_sensitive = 0;
  int gt_invariant = 0;
  int template_id = 1;
  uint64_t seed = 0;

  int gt(Condition c) const {
    return c == Condition::Sensitive ? gt_sensitive : gt_invariant;
  }

  json to_json() const {
    json j;
    j["pair_id"] = pair_id;
    j["split"] = split;
    j["left"] = left.to_json();
    j["right"] = right.to_json();
    j["pair_type"] = to_string(pair_type);
    if (transform.empty()) {
      j["transform"] = nullptr;
    } else {
      json arr = json::array();
      for (const auto& t : transform) arr.push_back(transform_to_json(t));
      j["transform"] = arr;
    }
    j["gt_sensitive"] = gt_sensitive;
    j["gt_invariant"] = gt_invariant;
    j["template_id"] = template_id;
    j["seed"] = seed;
    return j;
  }

  static PairRecord from_json(const json& j) {
    PairRecord r;
    r.pair_id = j.at("pair_id").get<std::string>();
    r.split = j.at("split").get<std::string>();
    r.left = DataRef::from_json(j.at("left"));
    r.right = DataRef::from_json(j.at("right"));
    r.pair_type = pair_type_from(j.at("pair_type").get<std::string>());
    if (!j.at("transform").is_null())
      for (const auto& t : j.at("transform")) r.transform.push_back(transform_from_json(t));
    r.gt_sensitive = j.at("gt_sensitive").get<int>();
    r.gt_invariant = j.at("gt_invariant").get<int>();
    r.template_id = j.at("template_id").get<int>();
    r.seed = j.at("seed").get<uint64_t>();
    return r;
  }
};

struct ManifestCounts {
  size_t originals = 0;
  size_t pairs = 0;
  size_t comparisons = 0;      // pairs x 2 orders
  size_t new_payloads = 0;     // synthesized transformed/irrelevant rasters
  size_t near_duplicates = 0;  // 95%-resize rights of identical pairs
};

struct ManifestHeader {
  std::string format = kManifestFormat;
  std::string tool_version = kToolVersion;
  std::string dataset;
  std::string split;
  std::string source_kind;
  std::string source_path;
  std::string source_hash;
  std::vector<std::string> transform_kinds;
  uint64_t seed = 0;
  json config = json::object();
  ManifestCounts counts;
  std::vector<std::string> warnings;

  json to_json() const {
    json j;
    j["format"] = format;
    j["tool_version"] = tool_version;
    j["dataset"] = dataset;
    j["split"] = split;
    j["source_kind"] = source_kind;
    j["source_path"] = source_path;
    j["source_hash"] = source_hash;
    j["transform_kinds"] = transform_kinds;
    j["seed"] = seed;
    j["config"] = config;
    j["config_hash"] = sha256_hex(config.dump());
    j["counts"] = {{"originals", counts.originals},
                   {"pairs", counts.pairs},
                   {"comparisons", counts.comparisons},
                   {"new_payloads", counts.new_payloads},
                   {"near_duplicates", counts.near_duplicates}};
    j["warnings"] = warnings;
    return j;
  }

  static ManifestHeader from_json(const json& j) {
    ManifestHeader h;
    h.format = j.at("format").get<std::string>();
    if (h.format != kManifestFormat)
      throw Error("unsupported manifest format: " + h.format);
    h.tool_version = j.at("tool_version").get<std::string>();
    h.dataset = j.at("dataset").get<std::string>();
    h.split = j.at("split").get<std::string>();
    h.source_kind = j.at("source_kind").get<std::string>();
    h.source_path = j.at("source_path").get<std::string>();
    h.source_hash = j.at("source_hash").get<std::string>();
    for (const auto& k : j.at("transform_kinds"))
      h.transform_kinds.push_back(k.get<std::string>());
    h.seed = j.at("seed").get<uint64_t>();
    h.config = j.at("config");
    const auto& c = j.at("counts");
    h.counts.originals = c.at("originals").get<size_t>();
    h.counts.pairs = c.at("pairs").get<size_t>();
    h.counts.comparisons = c.at("comparisons").get<size_t>();
    h.counts.new_payloads = c.at("new_payloads").get<size_t>();
    h.counts.near_duplicates = c.at("near_duplicates").get<size_t>();
    for (const auto& w : j.at("warnings")) h.warnings.push_back(w.get<std::string>());
    return h;
  }
};

/// Header line + ordered records, JSONL on disk. `dir` is the directory the
/// manifest was loaded from; image paths resolve against it.
struct PairManifest {
  ManifestHeader header;
  std::vector<PairRecord> records;
  fs::path dir;

  std::vector<TransformKind> kinds() const {
    std::vector<TransformKind> ks;
    for (const auto& code : header.transform_kinds) {
      auto k = transform_from_code(code);
      if (!k) throw Error("bad transform code in manifest: " + code);
      ks.push_back(*k);
    }
    return ks;
  }

  fs::path resolve(const DataRef& ref) const {
    fs::path p(ref.path);
    return p.is_absolute() ? p : dir / p;
  }

  std::string serialize() const {
    std::string out = header.to_json().dump();
    out.push_back('\n');
    for (const auto& r : records) {
      out += r.to_json().dump();
      out.push_back('\n');
    }
    return out;
  }

  void save(const fs::path& path) const { write_file(path, serialize()); }

  static PairManifest load(const fs::path& path) {
    std::string content = read_file(path);
    PairManifest m;
    m.dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    size_t start = 0;
    bool first = true;
    while (start < content.size()) {
      size_t end = content.find('\n', start);
      if (end == std::string::npos) end = content.size();
      std::string_view line(content.data() + start, end - start);
      if (!trim(line).empty()) {
        json j = json::parse(line);
        if (first) {
          m.header = ManifestHeader::from_json(j);
          first = false;
        } else {
          m.records.push_back(PairRecord::from_json(j));
        }
      }
      start = end + 1;
    }
    if (first) throw Error("manifest is empty: " + path.string());
    return m;
  }
};

}  // namespace pairbench
