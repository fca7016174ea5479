#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pruitt {

// Shortest round-trip decimal form (std::to_chars); locale-free, so output
// files are byte-stable across platforms and runs.
std::string fmt_double(double v);
std::string fmt_u64(std::uint64_t v);

// CSV with '#' provenance header lines (tool version, config hash, seed),
// a header row, '.' decimals and no locale dependence.
class CsvWriter {
public:
    CsvWriter(std::string path, std::vector<std::string> columns, const std::string& config_hash,
              std::uint64_t seed);

    void row(const std::vector<std::string>& cells);
    void save();  // writes the file; destructor does not

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::size_t columns_;
    std::string body_;
};

// gnuplot-style data file with the same provenance header.
class PlotWriter {
public:
    PlotWriter(std::string path, const std::string& config_hash, std::uint64_t seed);
    void comment(const std::string& line);
    void row(const std::vector<double>& values);
    void blank();  // block separator
    void save();

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::string body_;
};

std::string provenance_header(const std::string& config_hash, std::uint64_t seed);

}  // namespace pruitt
