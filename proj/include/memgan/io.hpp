#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace memgan {

// Flat binary of little-endian float64, row-major, with a JSON sidecar
// {"count": N, "d": d}. The sidecar path is the data path with its
// extension replaced by ".json".
void write_image_file(const std::filesystem::path& bin_path,
                      const std::vector<std::vector<double>>& records, int d);

std::vector<std::vector<double>> read_image_file(const std::filesystem::path& bin_path);

// Sequential reader over the same format; throws on exhaustion or when a
// record length disagrees with the requested dimension.
class ImageFileReader {
 public:
  explicit ImageFileReader(const std::filesystem::path& bin_path);
  std::vector<double> next(int expected_d);
  std::size_t count() const { return records_.size(); }

 private:
  std::vector<std::vector<double>> records_;
  std::size_t cursor_ = 0;
};

nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const nlohmann::json& j);

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace memgan
