#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eternal/profile_ode.hpp"

namespace eternal::io {

/// %.17g
std::string format_double(double x);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

/// xi,f,w per sample; `extra` adds one named column (must match the sample count).
std::string profile_csv(const ProfileGrid& grid, const std::string& extra_name = {},
                        const std::vector<double>& extra = {});

/// Reads the xi,f,w columns back. Throws std::runtime_error on malformed input.
std::vector<ProfilePoint> read_profile_csv(const std::filesystem::path& path);

}  // namespace eternal::io
