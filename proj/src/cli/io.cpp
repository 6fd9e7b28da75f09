#include "dirac/cli/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dirac::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

[[noreturn]] void row_error(const CsvFile& f, const CsvRow& row, const std::string& msg) {
    std::ostringstream os;
    os << f.path << ":" << row.line << ": " << msg;
    throw ConfigError(os.str());
}

}  // namespace

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvFile read_csv(const std::string& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    CsvFile f{path, {}, {}};
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto cells = split_cells(t);
        if (f.header.empty()) {
            if (cells != header) {
                std::ostringstream os;
                os << path << ":" << no << ": expected header '" << join(header) << "'";
                throw ConfigError(os.str());
            }
            f.header = std::move(cells);
            continue;
        }
        CsvRow row{no, std::move(cells)};
        if (row.cells.size() != header.size())
            row_error(f, row, "expected " + std::to_string(header.size()) + " columns");
        f.rows.push_back(std::move(row));
    }
    if (f.header.empty()) throw ConfigError(path + ": missing header '" + join(header) + "'");
    return f;
}

double cell_number(const CsvFile& f, const CsvRow& row, std::size_t col) {
    const std::string& c = row.cells.at(col);
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(c, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != c.size() || !std::isfinite(x))
        row_error(f, row, "column '" + f.header[col] + "' is not a number: '" + c + "'");
    return x;
}

long long cell_integer(const CsvFile& f, const CsvRow& row, std::size_t col) {
    const double x = cell_number(f, row, col);
    if (x != std::floor(x) || std::abs(x) > 1e9)
        row_error(f, row, "column '" + f.header[col] + "' is not an integer");
    return static_cast<long long>(x);
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), f_(std::fopen(path.c_str(), "w")) {
    if (!f_) throw ConfigError("cannot write '" + path + "'");
}

void CsvWriter::comment(const std::string& key, double value) {
    std::fprintf(f_, "# %s=%s\n", key.c_str(), fmt(value).c_str());
}

void CsvWriter::comment(const std::string& text) { std::fprintf(f_, "# %s\n", text.c_str()); }

void CsvWriter::header(const std::vector<std::string>& cols) { std::fprintf(f_, "%s\n", join(cols).c_str()); }

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        std::fprintf(f_, i ? ",%s" : "%s", fmt(values[i]).c_str());
    std::fputc('\n', f_);
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) { std::fprintf(f_, "%s\n", join(cells).c_str()); }

void CsvWriter::close() {
    if (!f_) return;
    const bool bad = std::ferror(f_) != 0;
    std::fclose(f_);
    f_ = nullptr;
    if (bad) throw ConfigError("write error on '" + path_ + "'");
}

void write_potential(const std::string& path, const CanonicalPotential& pot, const Grid& grid,
                     const std::vector<std::pair<std::string, double>>& comments) {
    CsvWriter w(path);
    for (const auto& [k, v] : comments) w.comment(k, v);
    w.header({"x", "p", "q"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        const PQ v = pot.evaluate(x);
        w.row({x, v.p, v.q});
    }
    w.close();
}

CanonicalPotential read_potential(const std::string& path) {
    const CsvFile f = read_csv(path, {"x", "p", "q"});
    if (f.rows.size() < 2) throw ConfigError(path + ": a sampled potential needs at least 2 rows");
    std::vector<double> x, p, q;
    for (const auto& r : f.rows) {
        x.push_back(cell_number(f, r, 0));
        p.push_back(cell_number(f, r, 1));
        q.push_back(cell_number(f, r, 2));
    }
    if (x.front() != 0.0) throw ConfigError(path + ": first node must be x = 0");
    if (!(x.back() > 0.0)) throw ConfigError(path + ": last node must be positive");
    const Grid g(x.back(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - g.x(i)) > 1e-9 * g.x_end()) {
            std::ostringstream os;
            os << path << ":" << f.rows[i].line << ": nodes are not uniformly spaced";
            throw ConfigError(os.str());
        }
    return CanonicalPotential::sampled(SampledField(g, std::move(p), std::move(q)));
}

std::vector<std::pair<int, double>> read_index_values(const std::string& path,
                                                      const std::string& value_col) {
    const CsvFile f = read_csv(path, {"n", value_col});
    std::vector<std::pair<int, double>> out;
    for (const auto& r : f.rows)
        out.emplace_back(static_cast<int>(cell_integer(f, r, 0)), cell_number(f, r, 1));
    return out;
}

SurgeryPlan read_plan(const std::string& path, double window_end) {
    const CsvFile f = read_csv(path, {"op", "nu", "t", "c"});
    SurgeryPlan plan{{}, window_end};
    for (const auto& r : f.rows) {
        SurgeryStep st;
        const std::string& op = r.cells[0];
        if (op == "add") st.op = SurgeryOp::add;
        else if (op == "remove") st.op = SurgeryOp::remove;
        else if (op == "scale") st.op = SurgeryOp::scale;
        else row_error(f, r, "unknown op '" + op + "' (add, remove or scale)");
        st.nu = cell_number(f, r, 1);
        st.t = r.cells[2].empty() ? 0.0 : cell_number(f, r, 2);
        st.c = r.cells[3].empty() ? 1.0 : cell_number(f, r, 3);
        if (!(st.c > 0.0)) row_error(f, r, "c must be positive");
        plan.steps.push_back(st);
    }
    return plan;
}

std::string suffixed_path(const std::string& path, const std::string& tag) {
    const auto dot = path.rfind('.');
    const auto slash = path.find_last_of('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    const std::string stem = has_ext ? path.substr(0, dot) : path;
    const std::string ext = has_ext ? path.substr(dot) : ".csv";
    return stem + "." + tag + ext;
}

std::string sidecar_path(const std::string& path, std::size_t k) {
    return suffixed_path(path, "step" + std::to_string(k));
}

}  // namespace dirac::cli
