#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sinterbench/benchmark.hpp"
#include "sinterbench/distribution.hpp"
#include "sinterbench/mc_engine.hpp"
#include "sinterbench/pid.hpp"

namespace sinterbench {

// Every CSV starts with a `# config_hash=<hex>` line followed by the header.

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& rows,
                          const std::string& hash);

/// Columns iter,signal,mean,std,skew,kurt,mode,ci_lo,ci_hi; one row per
/// iteration and signal (error, power).
void write_stats_csv(const std::filesystem::path& path, std::span<const IterationStats> rows,
                     const std::string& hash);

/// Columns iter,path,value.
void write_samples_csv(const std::filesystem::path& path, std::span<const int> iters,
                       std::span<const EmpiricalDistribution> samples, const std::string& hash);

/// Mixture as sorted [x, w] pairs.
nlohmann::json mixture_json(const DiracMixture& m);
DiracMixture mixture_from_json(const nlohmann::json& j);

void write_mixtures_json(const std::filesystem::path& path, std::span<const int> iters,
                         std::span<const DiracMixture> error, std::span<const DiracMixture> power,
                         const std::string& hash);

void write_bench_csv(const std::filesystem::path& path,
                     std::span<const BenchmarkRecord> records, const std::string& hash);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Reads a CSV written by this module: skips the hash line, returns the
/// header and the rows split on commas.
struct CsvTable {
  std::string config_hash;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace sinterbench
