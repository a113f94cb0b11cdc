#pragma once

namespace pairbench {

inline constexpr const char* kToolVersion = "0.1.0";

// Bumped whenever a serialized layout changes incompatibly.
inline constexpr const char* kManifestFormat = "pairbench.manifest.v1";
inline constexpr const char* kScoresFormat = "pairbench.scores.v1";
inline constexpr const char* kCacheFormat = "pairbench.cache.v1";
inline constexpr const char* kReportFormat = "pairbench.report.v1";
inline constexpr const char* kCorrelationFormat = "pairbench.correlation.v1";
inline constexpr const char* kEmbeddingFormat = "pairbench.embeddings.v1";

}  // namespace pairbench
