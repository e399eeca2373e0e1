#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ews/models.hpp"

namespace ews::models {

inline constexpr std::string_view kModelSchema = "ews.model/1";

std::string to_json(const Model& model);
Model from_json(std::string_view text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace ews::models
