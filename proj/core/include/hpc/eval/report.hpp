#pragma once

#include <filesystem>

#include "hpc/eval/evaluate.hpp"

namespace hpc::eval {

// Degradation measure: metric under noise over its noise-free value.
// 0/0 counts as full retention; a positive value over a zero baseline is
// reported as infinity.
double retention_ratio(double value, double baseline);

// Writes table.csv, table.txt (blocks per noise level, with the M_reward
// definition stated in the header), retention.csv (per-seed terrain
// retention), seeds.csv (per-variant stream seed manifest) and
// retention.svg into out_dir.
void write_report(const std::filesystem::path& out_dir, const config::RunConfig& cfg,
                  const EvalRunResult& res, const std::vector<uint64_t>& seeds);

}  // namespace hpc::eval
