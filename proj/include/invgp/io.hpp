#ifndef INVGP_IO_HPP
#define INVGP_IO_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invgp/anova.hpp"
#include "invgp/gp.hpp"

namespace invgp {

// printf %.17g: round-trips every double and is byte-stable across runs.
std::string format_double(double v);

// CSV with a header row; every numeric cell via format_double.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Mat& rows);
Mat read_csv(const std::string& path, std::vector<std::string>* header = nullptr);

// Dataset CSV: columns x1..xd,y.
void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

// Sobol table CSV: columns subset ("1,3"), S_I.
void write_sobol_csv(const std::string& path, const SobolTable& table);

void write_json_file(const std::string& path, const nlohmann::json& j);

// FNV-1a over the serialized config, for the run manifest.
std::string content_hash(const std::string& text);

// manifest.json written next to experiment outputs: experiment id, seed,
// config echo + hash, and a free-form results block.
void write_manifest(const std::string& out_dir, const std::string& experiment,
                    std::uint64_t seed, const nlohmann::json& config,
                    const nlohmann::json& results);

}  // namespace invgp

#endif
