#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace mftool {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// One report file: config echo and results as "# key = value" header lines,
/// then a CSV table.
struct Table
{
    std::string stem; // file name without extension
    KeyValues config;
    KeyValues results;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    void result(std::string key, std::string value) { results.emplace_back(std::move(key), std::move(value)); }
};

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string render_csv(const Table& t);
std::string render_json(const Table& t);

/// Writes <dir>/<stem>.csv and, when `json` is set, <dir>/<stem>.json.
void write_table(const std::filesystem::path& dir, const Table& t, bool json);

/// "key = value" lines; '#' starts a comment.
KeyValues read_key_values(const std::filesystem::path& path);

} // namespace mftool
