#pragma once

// On-disk datasets (frames or common lines) and validity reports.
//
// Every file is a JSON object with "schema_version", "kind", "n" and a free
// form "metadata" object. Indices in files are 1-based. Floats are written in
// shortest round-trip form, so loading and saving a canonical file reproduces
// it byte for byte.
//
//   kind "frames":        "frames": [{"a": [x, y, z], "b": [x, y, z]}, ...]
//   kind "common_lines":  "pairs":  [{"i": 1, "j": 2, "v_ij": [x, y],
//                                     "v_ji": [x, y]}, ...]   (i < j)
//   kind "validity_report": see report_to_json.
//
// Common line pairs are written with the canonical representative: both
// halves unit length and the first nonzero coordinate of v_ij positive.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include "json.hpp"

#include "commonlines/reconstruct.hpp"
#include "commonlines/validity.hpp"

namespace commonlines {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "commonlines 0.1.0";

struct FramesDataset {
  FrameSet frames;
  Json metadata = Json::object();
};

struct LinesDataset {
  CommonLinesData data;
  Json metadata = Json::object();
};

using Dataset = std::variant<FramesDataset, LinesDataset>;

Json to_json(const FramesDataset& ds);
Json to_json(const LinesDataset& ds);

/// Throws Error(ParseError) on schema problems; payload invariants raise
/// their own codes (DegenerateInput, NormMismatch, IndexOutOfRange, ...).
Dataset dataset_from_json(const Json& j, NormPolicy policy = NormPolicy::Strict);

/// Parses text; throws Error(ParseError) on malformed JSON or empty input.
Json parse_json_text(const std::string& text);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Canonical text of a JSON document (two-space indent, trailing newline).
std::string dump(const Json& j);

/// Full report; `max_offenders` caps the worst-offender list.
Json report_to_json(const ValidityReport& report, std::size_t max_offenders = 20);

/// Tolerances and optimizer settings shared by the CLI commands.
struct RunConfig {
  Tolerances tolerances;
  int max_iters = 200;
  std::uint64_t seed = 0;
  BaseSelection base = BaseSelection::First;

  /// Overlays the keys present in `j` ("eq_tol", "ineq_margin", "max_iters",
  /// "seed", "base_triple": "first" | "best") onto this config.
  void merge(const Json& j);
  void validate() const;
};

}  // namespace commonlines
