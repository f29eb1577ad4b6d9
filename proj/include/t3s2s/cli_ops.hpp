#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace t3s2s {

// Exit codes shared by the CLI and the command implementations:
// 0 ok, 1 config/validation, 2 I/O, 3 numeric non-finite.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNonFinite = 3;

struct CmdFlags {
    bool disable_pb = false;
    bool disable_cp = false;
    bool disable_dt = false;
    std::optional<uint64_t> seed;
    std::vector<int> k_list = {0, 1, 2, 3, 4};
    double factor = 2.0;
    int threads = 0;  // 0 = resolve from T3S2S_THREADS, default 1
};

int cmd_analyze_prompt(const std::string& scene_path, const std::string& out_dir);
int cmd_run(const std::string& scene_path, const std::string& out_dir, const CmdFlags& flags);
int cmd_ablate(const std::string& scene_path, const std::string& out_dir, const CmdFlags& flags);
int cmd_probe_topk(const std::string& scene_path, const std::string& out_dir,
                   const CmdFlags& flags);

}  // namespace t3s2s
