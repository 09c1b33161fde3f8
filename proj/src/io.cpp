#include "sinterbench/io.hpp"

#include <fstream>
#include <sstream>

#include "sinterbench/errors.hpp"

namespace sinterbench {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.precision(17);
  return out;
}

std::ofstream open_csv(const std::filesystem::path& path, const std::string& hash,
                       const char* header) {
  auto out = open_out(path);
  out << "# config_hash=" << hash << '\n' << header << '\n';
  return out;
}

void stats_row(std::ostream& out, int iter, const char* signal, const SummaryStats& s) {
  out << iter << ',' << signal << ',' << s.mean << ',' << s.std << ',' << s.skewness << ','
      << s.kurtosis << ',' << s.mode << ',' << s.ci_lo << ',' << s.ci_hi << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& rows,
                          const std::string& hash) {
  auto out = open_csv(path, hash, "iter,error,power,temp");
  for (const auto& r : rows) {
    out << r.iter << ',' << r.error << ',' << r.power << ',' << r.temperature << '\n';
  }
}

void write_stats_csv(const std::filesystem::path& path, std::span<const IterationStats> rows,
                     const std::string& hash) {
  auto out = open_csv(path, hash, "iter,signal,mean,std,skew,kurt,mode,ci_lo,ci_hi");
  for (const auto& r : rows) {
    stats_row(out, r.iter, "error", r.error);
    stats_row(out, r.iter, "power", r.power);
  }
}

void write_samples_csv(const std::filesystem::path& path, std::span<const int> iters,
                       std::span<const EmpiricalDistribution> samples, const std::string& hash) {
  auto out = open_csv(path, hash, "iter,path,value");
  for (std::size_t i = 0; i < iters.size(); ++i) {
    const auto& s = samples[i].samples;
    for (std::size_t p = 0; p < s.size(); ++p) out << iters[i] << ',' << p << ',' << s[p] << '\n';
  }
}

nlohmann::json mixture_json(const DiracMixture& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& a : m.points()) arr.push_back({a.x, a.w});
  return arr;
}

DiracMixture mixture_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("mixture: expected an array of [x, w] pairs");
  std::vector<Atom> atoms;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ConfigError("mixture: expected an array of [x, w] pairs");
    }
    atoms.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  try {
    return DiracMixture::from_points(std::move(atoms));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("mixture: ") + e.what());
  }
}

void write_mixtures_json(const std::filesystem::path& path, std::span<const int> iters,
                         std::span<const DiracMixture> error, std::span<const DiracMixture> power,
                         const std::string& hash) {
  nlohmann::json records = nlohmann::json::array();
  for (std::size_t i = 0; i < iters.size(); ++i) {
    records.push_back(
        {{"iter", iters[i]}, {"error", mixture_json(error[i])}, {"power", mixture_json(power[i])}});
  }
  write_json(path, {{"config_hash", hash}, {"mixtures", records}});
}

void write_bench_csv(const std::filesystem::path& path,
                     std::span<const BenchmarkRecord> records, const std::string& hash) {
  auto out = open_csv(
      path, hash,
      "method,size,noise,w1_mean,w1_std,runtime_ms_mean,runtime_ms_std,repetitions,seed");
  for (const auto& r : records) {
    out << to_string(r.method) << ',' << r.size << ',' << r.noise << ',' << r.w1_mean << ','
        << r.w1_std << ',' << r.runtime_ms_mean << ',' << r.runtime_ms_std << ','
        << r.repetitions << ',' << r.seed << '\n';
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# config_hash=", 0) == 0) {
      table.config_hash = line.substr(14);
      continue;
    }
    if (!have_header) {
      table.header = split(line);
      have_header = true;
    } else if (!line.empty()) {
      table.rows.push_back(split(line));
    }
  }
  return table;
}

}  // namespace sinterbench
