#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "config.hpp"

namespace lighttrap::cli {

int cmd_trace(const json& config, const std::filesystem::path& out_dir);
int cmd_design(const json& config, const std::filesystem::path& out_dir);
int cmd_sweep(const json& config, const std::filesystem::path& out_dir,
              int jobs);
int cmd_perturb(const json& config, const std::filesystem::path& out_dir,
                int jobs, std::optional<std::uint64_t> seed_override);
int cmd_check(const std::optional<std::string>& report_path,
              const std::filesystem::path& out_dir, bool inject_rhs_sign_error);

}  // namespace lighttrap::cli
