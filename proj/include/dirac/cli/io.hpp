#pragma once

// Comma-separated tables with one header row; '#' lines carry scalars.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "dirac/model.hpp"

namespace dirac::cli {

/// %.17g: round-trips every double.
std::string fmt(double v);

struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> cells;
};

struct CsvFile {
    std::string path;
    std::vector<std::string> header;
    std::vector<CsvRow> rows;
};

/// Reads `path`; the first non-comment line must equal `header`.
/// ConfigError names the path (and line) on any problem.
CsvFile read_csv(const std::string& path, const std::vector<std::string>& header);

double cell_number(const CsvFile& f, const CsvRow& row, std::size_t col);
long long cell_integer(const CsvFile& f, const CsvRow& row, std::size_t col);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter() {
        if (f_) std::fclose(f_);
    }
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;
    void comment(const std::string& key, double value);
    void comment(const std::string& text);
    void header(const std::vector<std::string>& cols);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);
    void close();

private:
    std::string path_;
    std::FILE* f_;
};

/// x,p,q at the grid nodes, preceded by `comments` lines.
void write_potential(const std::string& path, const CanonicalPotential& pot, const Grid& grid,
                     const std::vector<std::pair<std::string, double>>& comments = {});

/// Uniform-grid x,p,q table as a sampled potential.
CanonicalPotential read_potential(const std::string& path);

std::vector<std::pair<int, double>> read_index_values(const std::string& path,
                                                      const std::string& value_col);
SurgeryPlan read_plan(const std::string& path, double window_end);

/// path.csv -> path.<tag>.csv
std::string suffixed_path(const std::string& path, const std::string& tag);
/// path.csv -> path.step<k>.csv
std::string sidecar_path(const std::string& path, std::size_t k);

}  // namespace dirac::cli
