#pragma once

// Canonical JSON and CSV emission for run reports.

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pbx/lattice.hpp"
#include "pbx/report.hpp"
#include "pbx/zak.hpp"

namespace pbx {

inline constexpr std::string_view kSchemaVersion = "pbx-report/1";

/// Sorted keys, two-space indent, floats as %.12e, non-finite floats as the
/// strings "inf", "-inf", "nan".
std::string canonical_json(const nlohmann::json& value);

/// Lower-case hex SHA-1 of "blob <size>\0<content>", as git hashes a file.
std::string git_blob_sha1(std::string_view content);

nlohmann::json checks_json(const std::vector<CheckRecord>& records);

/// Plain comma-separated table; values printed with %.12e.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Columns k,q,re,im, one row per cell sample, k varying slowest.
void write_zak_csv(const std::filesystem::path& path, const ZakArray& h);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace pbx
