#include "memgan/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace memgan {

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& bin_path) {
  auto p = bin_path;
  p.replace_extension(".json");
  return p;
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xffu);
  return r;
}

}  // namespace

void write_image_file(const std::filesystem::path& bin_path,
                      const std::vector<std::vector<double>>& records, int d) {
  std::ofstream out(bin_path, std::ios::binary);
  if (!out) throw std::runtime_error("write_image_file: cannot open " + bin_path.string());
  for (const auto& rec : records) {
    if (static_cast<int>(rec.size()) != d)
      throw std::invalid_argument("write_image_file: record length != d");
    for (double x : rec) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, 8);
      bits = to_le(bits);
      out.write(reinterpret_cast<const char*>(&bits), 8);
    }
  }
  out.close();
  nlohmann::json sidecar;
  sidecar["count"] = records.size();
  sidecar["d"] = d;
  save_json(sidecar_path(bin_path), sidecar);
}

std::vector<std::vector<double>> read_image_file(const std::filesystem::path& bin_path) {
  const auto meta = load_json(sidecar_path(bin_path));
  const std::size_t count = meta.at("count").get<std::size_t>();
  const int d = meta.at("d").get<int>();
  if (d < 1) throw std::runtime_error("read_image_file: sidecar d must be >= 1");

  std::ifstream in(bin_path, std::ios::binary);
  if (!in) throw std::runtime_error("read_image_file: cannot open " + bin_path.string());
  std::vector<std::vector<double>> records(count, std::vector<double>(d));
  for (auto& rec : records) {
    for (double& x : rec) {
      std::uint64_t bits;
      if (!in.read(reinterpret_cast<char*>(&bits), 8))
        throw std::runtime_error("read_image_file: file shorter than sidecar count*d");
      bits = to_le(bits);
      std::memcpy(&x, &bits, 8);
    }
  }
  return records;
}

ImageFileReader::ImageFileReader(const std::filesystem::path& bin_path)
    : records_(read_image_file(bin_path)) {}

std::vector<double> ImageFileReader::next(int expected_d) {
  if (cursor_ >= records_.size())
    throw std::runtime_error("ImageFileReader: file exhausted");
  const auto& rec = records_[cursor_];
  if (static_cast<int>(rec.size()) != expected_d)
    throw std::runtime_error("ImageFileReader: record length does not match d");
  ++cursor_;
  return rec;
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_json: cannot open " + path.string());
  nlohmann::json j;
  in >> j;
  return j;
}

void save_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_json: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      out << buf << (i + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
}

}  // namespace memgan
