#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace hpc {

// Formats a double so the value round-trips exactly ("%.17g").
std::string format_double(double v);

// Deterministic CSV writer: fixed header, %.17g floats, '\n' line ends.
// Identical call sequences produce byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
  void write_row(std::span<const double> values);
  void write_row(std::initializer_list<double> values) {
    write_row(std::span<const double>(values.begin(), values.size()));
  }
  // for tables with non-numeric cells; width still checked
  void write_raw_row(const std::vector<std::string>& cells);
  void flush();

 private:
  std::ofstream out_;
  size_t ncols_;
};

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* header = nullptr);

// Little-endian binary primitives shared by the checkpoint and terrain dumps.
void write_u32(std::ostream& out, uint32_t v);
void write_u64(std::ostream& out, uint64_t v);
void write_f64(std::ostream& out, double v);
void write_string(std::ostream& out, const std::string& s);  // u32 length + bytes
uint32_t read_u32(std::istream& in);
uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
std::string read_string(std::istream& in);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hpc
