#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taxisfv/config.hpp"
#include "taxisfv/grid.hpp"

namespace taxisfv {

/// File-system failure; the message names the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] std::string_view library_version() noexcept;

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] std::string format_double(double x);

/// Columns x,h,level,<species...>.
void write_snapshot_1d(const std::filesystem::path& path, const Grid1D& grid,
                       std::span<const double> w, const std::vector<std::string>& names);

/// Columns x,y,h,level,<species...>, restricted to cells whose centres lie in
/// [lo, hi]^2 (the whole grid when lo > hi).
void write_snapshot_2d(const std::filesystem::path& path, const Grid2D& grid,
                       std::span<const double> w, const std::vector<std::string>& names,
                       double lo = 1.0, double hi = -1.0);

/// Column-oriented CSV contents.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // data[column][row]

    [[nodiscard]] const std::vector<double>& column(std::string_view name) const;
    [[nodiscard]] std::size_t rows() const noexcept { return data.empty() ? 0 : data[0].size(); }
};

/// Reads a numeric CSV with a header line ("nan" and empty fields read as NaN).
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

/// Run-level metadata written as JSON.
struct RunMetadata {
    std::string command;
    RunConfig config;
    std::map<std::string, double> timings;
    std::map<std::string, long long> counts;
    std::vector<std::pair<std::string, ConfigValue>> results;
    std::map<std::string, std::vector<double>> series;
};

void write_metadata_json(const std::filesystem::path& path, const RunMetadata& meta);

/// Streams rows t,dt,mass_<species>...,cells,E.
class MetricsWriter {
public:
    MetricsWriter(const std::filesystem::path& path, const std::vector<std::string>& names);
    void row(double t, double dt, std::span<const double> masses, std::size_t cells, double error);

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t n_species_;
};

/// Writes a CSV with the given header and equally long columns.
void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns);

/// Creates the directory (and parents); throws IoError on failure.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace taxisfv
