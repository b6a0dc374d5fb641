#include "invgp/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace invgp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Mat& rows) {
  if (static_cast<int>(header.size()) != rows.cols()) {
    throw std::invalid_argument("write_csv: header/column count mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out << ",";
    out << header[i];
  }
  out << "\n";
  for (int r = 0; r < rows.rows(); ++r) {
    for (int c = 0; c < rows.cols(); ++c) {
      if (c > 0) out << ",";
      out << format_double(rows(r, c));
    }
    out << "\n";
  }
}

Mat read_csv(const std::string& path, std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  std::vector<std::string> head;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) head.push_back(tok);
  }
  if (header != nullptr) *header = head;

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
    if (row.size() != head.size()) {
      throw std::runtime_error(path + ": ragged row (" + std::to_string(row.size()) +
                               " cells, expected " + std::to_string(head.size()) + ")");
    }
    rows.push_back(std::move(row));
  }
  Mat M(rows.size(), head.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < head.size(); ++c) M(r, c) = rows[r][c];
  }
  return M;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  int d = static_cast<int>(data.X.cols());
  std::vector<std::string> header;
  for (int i = 1; i <= d; ++i) header.push_back("x" + std::to_string(i));
  header.push_back("y");
  Mat rows(data.size(), d + 1);
  rows.leftCols(d) = data.X;
  rows.col(d) = data.y;
  write_csv(path, header, rows);
}

Dataset read_dataset_csv(const std::string& path) {
  std::vector<std::string> header;
  Mat M = read_csv(path, &header);
  if (header.empty() || header.back() != "y") {
    throw std::runtime_error(path + ": dataset CSV must end with a 'y' column");
  }
  Dataset data;
  data.X = M.leftCols(M.cols() - 1);
  data.y = M.col(M.cols() - 1);
  return data;
}

void write_sobol_csv(const std::string& path, const SobolTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "subset,S_I\n";
  for (const auto& [I, v] : table.indices) {
    out << "\"" << I.str() << "\"," << format_double(v) << "\n";
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const std::string& out_dir, const std::string& experiment,
                    std::uint64_t seed, const nlohmann::json& config,
                    const nlohmann::json& results) {
  nlohmann::json manifest{{"experiment", experiment},
                          {"seed", seed},
                          {"config", config},
                          {"config_hash", content_hash(config.dump())},
                          {"results", results}};
  write_json_file((std::filesystem::path(out_dir) / "manifest.json").string(), manifest);
}

}  // namespace invgp
