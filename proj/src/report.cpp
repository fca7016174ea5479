#include "pruitt/report.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "pruitt/version.hpp"

namespace pruitt {

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) throw std::runtime_error("fmt_double: conversion failed");
    return std::string(buf, res.ptr);
}

std::string fmt_u64(std::uint64_t v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string provenance_header(const std::string& config_hash, std::uint64_t seed) {
    std::string out;
    out += "# ";
    out += kToolName;
    out += " ";
    out += kToolVersion;
    out += "\n# config_hash=";
    out += config_hash;
    out += "\n# seed=";
    out += fmt_u64(seed);
    out += "\n";
    return out;
}

CsvWriter::CsvWriter(std::string path, std::vector<std::string> columns,
                     const std::string& config_hash, std::uint64_t seed)
    : path_(std::move(path)), columns_(columns.size()) {
    body_ = provenance_header(config_hash, seed);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) body_ += ',';
        body_ += columns[i];
    }
    body_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::invalid_argument("CsvWriter: wrong cell count");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) body_ += ',';
        body_ += cells[i];
    }
    body_ += '\n';
}

void CsvWriter::save() {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("CsvWriter: cannot open '" + path_ + "'");
    out << body_;
}

PlotWriter::PlotWriter(std::string path, const std::string& config_hash, std::uint64_t seed)
    : path_(std::move(path)), body_(provenance_header(config_hash, seed)) {}

void PlotWriter::comment(const std::string& line) { body_ += "# " + line + "\n"; }

void PlotWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) body_ += ' ';
        body_ += fmt_double(values[i]);
    }
    body_ += '\n';
}

void PlotWriter::blank() { body_ += '\n'; }

void PlotWriter::save() {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("PlotWriter: cannot open '" + path_ + "'");
    out << body_;
}

}  // namespace pruitt
