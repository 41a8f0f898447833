#pragma once

#include "config.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace dkm::cli {

struct CommandContext {
    Config config;
    std::string out_dir;
    std::uint64_t seed = 0;
};

int cmd_train(const CommandContext& ctx);
int cmd_rates(const CommandContext& ctx);
int cmd_bounds(const CommandContext& ctx);
int cmd_fk_check(const CommandContext& ctx);
int cmd_mc_rate(const CommandContext& ctx);
int cmd_embed_check(const CommandContext& ctx);

// Parses the config, resolves the seed, dispatches, and maps failures to the
// documented exit codes: 0 success, 2 config error, 3 numeric failure,
// 4 verification failure.
int run_command(const std::string& name, const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed_override);

} // namespace dkm::cli
