#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "admissible/core/types.hpp"

namespace admissible {

/// JSON-lines trajectory format: one object per line with keys "states",
/// "actions", "behavior_probs", plus "final_state" and "terminal".
/// Metadata goes to a sibling JSON file with keys "env", "seed", "policy_desc".
void write_dataset_jsonl(std::ostream& out, const BatchDataset& data);
BatchDataset read_dataset_jsonl(std::istream& in, DatasetMetadata metadata);

/// Writes `<path>` and `<path without extension>.meta.json`.
void save_dataset(const std::filesystem::path& path, const BatchDataset& data);
BatchDataset load_dataset(const std::filesystem::path& path);

std::filesystem::path metadata_path_for(const std::filesystem::path& dataset_path);

/// `%.17g` formatting (lossless for doubles) used by every text writer.
std::string format_real(double x);

}  // namespace admissible
