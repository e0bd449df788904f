#pragma once

#include "abring/sweeps.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace abring {

// Fixed leading CSV columns; LDOS columns site_0..site_{N-1} follow when
// enabled.
const std::vector<std::string>& record_columns();

// Value of a named column (a fixed column or "site_<k>"). Throws
// ArgumentError for a name outside the schema.
double record_column(const ObservableRecord& record, const std::string& name);
bool has_column(const std::vector<ObservableRecord>& records, const std::string& name);

// Round-trip exact decimal form of a double ("%.17g"; nan/inf spelled out).
std::string format_double(double v);

std::string records_to_csv(const std::vector<ObservableRecord>& records, bool with_ldos);
nlohmann::ordered_json records_to_json(const std::vector<ObservableRecord>& records, bool with_ldos);
std::vector<ObservableRecord> records_from_csv(const std::string& text);

struct RunManifest {
  nlohmann::ordered_json config;
  std::string version;
  std::string timestamp;
  std::size_t rows = 0;
  std::size_t ldos_columns = 0;
  int error_count = 0;
  int flagged_count = 0;
  int undefined_contrast_count = 0;
  std::vector<std::pair<std::size_t, std::string>> errors;
  std::vector<std::string> outputs;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  nlohmann::ordered_json to_json() const;
};

// Writes records in grid order and returns the manifest fields it knows
// (rows, LDOS width, error annotations, output path).
RunManifest write_records(const std::vector<ObservableRecord>& records, OutputFormat format,
                          const std::filesystem::path& path, bool with_ldos);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace abring
