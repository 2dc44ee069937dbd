#pragma once

#include <filesystem>

#include "lbmo/config.hpp"

namespace lbmo {

/// Collects every report.json below `out_dir` into one summary (also written
/// to out_dir/summary.json). `all_pass` is false when any verdict is "fail"
/// or "abort".
Json aggregate_reports(const std::filesystem::path& out_dir);

}  // namespace lbmo
