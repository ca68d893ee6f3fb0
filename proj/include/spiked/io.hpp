#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "spiked/limiting_laws.hpp"
#include "spiked/spiked_ensemble.hpp"

namespace spiked {

using json = nlohmann::json;

inline constexpr const char* artifact_version = "1.0.0";

// 17 significant digits, round-trip exact.
std::string format_double(double v);

std::uint64_t fnv1a(std::string_view bytes);
// Hex FNV-1a of the compact dump; object keys are already sorted.
std::string config_hash(const json& config);

// First line of every CSV: "# config=<hash> version=<version>".
std::string provenance_line(const std::string& hash);

json to_json(const SpikedModel& model);
SpikedModel model_from_json(const json& j);

std::string law_table_csv(const LawTable& table, const std::string& hash);
std::string samples_csv(const EnsembleResult& result, const SpikedModel& model, const std::string& hash);
json run_manifest(const EnsembleRun& run, const EnsembleResult& result, const std::string& hash,
                  const json& inputs = json::object());

std::string read_file(const std::filesystem::path& path);
// Throws OutputExistsError when the target exists and force is false.
void write_file(const std::filesystem::path& path, std::string_view content, bool force);
// Pretty JSON with a trailing newline.
std::string dump_json(const json& j);

}  // namespace spiked
