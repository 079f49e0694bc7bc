#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace engage::io {

using Json = nlohmann::json;

// Canonical output: keys sorted, two-space indent, floats at 12 significant
// digits, non-finite numbers as null, trailing newline. Identical values
// always produce identical bytes.
std::string dump_canonical(const Json& value);

// Formats a double the way dump_canonical does.
std::string format_double(double x);

std::string read_text_file(const std::filesystem::path& path);
// Throws ValidationError naming the file on unreadable input or bad JSON.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace engage::io
