#pragma once

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <string>

#include "phi4lab/grid.hpp"

namespace phi4lab {

uint64_t fnv1a64(const void* data, size_t bytes);
std::string hex64(uint64_t v);

/// Raw little-endian doubles plus a JSON sidecar {dtype, shape, order,
/// checksum}; written via a temp file and atomic rename.
void write_array(const std::filesystem::path& path, const Mat& m);
void write_array(const std::filesystem::path& path, const Vec& v);
Mat read_array(const std::filesystem::path& path);

/// Long-format CSV, 17 significant digits.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    ~CsvWriter();
    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& values);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace phi4lab
