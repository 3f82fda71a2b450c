#include "taxisfv/snapshot_io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#ifndef TAXISFV_VERSION
#define TAXISFV_VERSION "0.0.0"
#endif

namespace taxisfv {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

double parse_field(std::string_view f, const std::filesystem::path& path, std::size_t line) {
    if (f.empty() || f == "nan" || f == "NaN") return std::numeric_limits<double>::quiet_NaN();
    double x = 0.0;
    const auto* end = f.data() + f.size();
    const auto [ptr, ec] = std::from_chars(f.data(), end, x);
    if (ec != std::errc() || ptr != end) {
        throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" +
                      std::string(f) + "'");
    }
    return x;
}

nlohmann::json to_json(const ConfigValue& v) {
    return std::visit([](const auto& x) { return nlohmann::json(x); }, v);
}

nlohmann::json finite_or_null(double x) {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace

std::string_view library_version() noexcept { return TAXISFV_VERSION; }

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

void write_snapshot_1d(const std::filesystem::path& path, const Grid1D& grid,
                       std::span<const double> w, const std::vector<std::string>& names) {
    const std::size_t n = names.size();
    if (w.size() != grid.size() * n) throw std::invalid_argument("write_snapshot_1d: size mismatch");
    auto out = open_out(path);
    out << "x,h,level";
    for (const auto& s : names) out << ',' << s;
    out << '\n';
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << format_double(grid.center(i)) << ',' << format_double(grid.width(i)) << ','
            << grid.level(i);
        for (std::size_t s = 0; s < n; ++s) out << ',' << format_double(w[i * n + s]);
        out << '\n';
    }
    finish(out, path);
}

void write_snapshot_2d(const std::filesystem::path& path, const Grid2D& grid,
                       std::span<const double> w, const std::vector<std::string>& names,
                       double lo, double hi) {
    const std::size_t n = names.size();
    if (w.size() != grid.size() * n) throw std::invalid_argument("write_snapshot_2d: size mismatch");
    const bool window = lo <= hi;
    auto out = open_out(path);
    out << "x,y,h,level";
    for (const auto& s : names) out << ',' << s;
    out << '\n';
    for (int j = 1; j <= grid.ny(); ++j) {
        const double y = grid.y(j);
        if (window && (y < lo || y > hi)) continue;
        for (int i = 1; i <= grid.nx(); ++i) {
            const double x = grid.x(i);
            if (window && (x < lo || x > hi)) continue;
            const std::size_t k = grid.index(i, j);
            out << format_double(x) << ',' << format_double(y) << ',' << format_double(grid.hx())
                << ",0";
            for (std::size_t s = 0; s < n; ++s) out << ',' << format_double(w[k * n + s]);
            out << '\n';
        }
    }
    finish(out, path);
}

const std::vector<double>& CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return data[i];
    }
    throw IoError("missing column '" + std::string(name) + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
    {
        std::string_view h = line;
        while (true) {
            const auto c = h.find(',');
            t.columns.emplace_back(h.substr(0, c));
            if (c == std::string_view::npos) break;
            h.remove_prefix(c + 1);
        }
    }
    t.data.resize(t.columns.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::string_view r = line;
        std::size_t col = 0;
        while (true) {
            const auto c = r.find(',');
            if (col >= t.columns.size()) throw IoError(path.string() + ": too many fields");
            t.data[col++].push_back(parse_field(r.substr(0, c), path, line_no));
            if (c == std::string_view::npos) break;
            r.remove_prefix(c + 1);
        }
        if (col != t.columns.size()) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(t.columns.size()) + " fields");
        }
    }
    return t;
}

void write_metadata_json(const std::filesystem::path& path, const RunMetadata& meta) {
    nlohmann::json j;
    j["version"] = std::string(library_version());
    j["command"] = meta.command;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : config_entries(meta.config)) cfg[k] = to_json(v);
    j["config"] = cfg;
    nlohmann::json timings = nlohmann::json::object();
    for (const auto& [k, v] : meta.timings) timings[k] = v;
    j["timings"] = timings;
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [k, v] : meta.counts) counts[k] = v;
    j["counts"] = counts;
    nlohmann::json results = nlohmann::json::object();
    for (const auto& [k, v] : meta.results) {
        if (const double* d = std::get_if<double>(&v)) {
            results[k] = finite_or_null(*d);
        } else {
            results[k] = to_json(v);
        }
    }
    j["results"] = results;
    nlohmann::json series = nlohmann::json::object();
    for (const auto& [k, v] : meta.series) {
        nlohmann::json arr = nlohmann::json::array();
        for (double x : v) arr.push_back(finite_or_null(x));
        series[k] = arr;
    }
    j["series"] = series;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path, const std::vector<std::string>& names)
    : path_(path), out_(open_out(path)), n_species_(names.size()) {
    out_ << "t,dt";
    for (const auto& s : names) out_ << ",mass_" << s;
    out_ << ",cells,E\n";
}

void MetricsWriter::row(double t, double dt, std::span<const double> masses, std::size_t cells,
                        double error) {
    out_ << format_double(t) << ',' << format_double(dt);
    for (std::size_t s = 0; s < n_species_; ++s) out_ << ',' << format_double(masses[s]);
    out_ << ',' << cells << ',' << format_double(error) << '\n';
    if (!out_) throw IoError("write failed for " + path_.string());
}

void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) throw std::invalid_argument("write_columns_csv: header size");
    const std::size_t rows = columns.empty() ? 0 : columns[0].size();
    for (const auto& c : columns) {
        if (c.size() != rows) throw std::invalid_argument("write_columns_csv: ragged columns");
    }
    auto out = open_out(path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out << (i ? "," : "") << format_double(columns[i][r]);
        }
        out << '\n';
    }
    finish(out, path);
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace taxisfv
