#include "optsub/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace optsub {
namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    out.push_back(field);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_field(const std::string& raw, const std::string& name, std::size_t row,
                   std::size_t col) {
    const std::string s = trim(raw);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << name << ": row " << row << ", column " << col << ": cannot parse '" << raw
            << "' as a number";
        throw ParseError(msg.str());
    }
    return value;
}

struct Header {
    std::vector<std::size_t> x_cols;  // x_cols[j] = file column of x(j+1)
    std::size_t y_col = SIZE_MAX;
    std::size_t n_cols = 0;
};

Header parse_header(const std::string& line, const std::string& name) {
    const std::vector<std::string> fields = split_line(line);
    Header h;
    h.n_cols = fields.size();
    std::vector<std::size_t> x_index(fields.size(), SIZE_MAX);
    std::size_t d = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
        const std::string f = trim(fields[c]);
        if (f == "y") {
            if (h.y_col != SIZE_MAX) throw ParseError(name + ": duplicate column 'y'");
            h.y_col = c;
            continue;
        }
        if (f.size() < 2 || f[0] != 'x')
            throw ParseError(name + ": header column " + std::to_string(c + 1) +
                             " must be x1..xd or y, got '" + f + "'");
        std::size_t j = 0;
        const auto [ptr, ec] = std::from_chars(f.data() + 1, f.data() + f.size(), j);
        if (ec != std::errc{} || ptr != f.data() + f.size() || j == 0)
            throw ParseError(name + ": bad covariate column name '" + f + "'");
        if (j > fields.size()) throw ParseError(name + ": column index out of range: " + f);
        if (x_index[j - 1] != SIZE_MAX) throw ParseError(name + ": duplicate column '" + f + "'");
        x_index[j - 1] = c;
        d = std::max(d, j);
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (x_index[j] == SIZE_MAX)
            throw ParseError(name + ": missing column x" + std::to_string(j + 1));
        h.x_cols.push_back(x_index[j]);
    }
    if (h.x_cols.empty()) throw ParseError(name + ": no covariate columns");
    return h;
}

}  // namespace

DataMatrix read_data_csv(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(name + ": empty file");
    const Header h = parse_header(line, name);
    const index_t d = h.x_cols.size();

    DataMatrix x;
    x.d = d;
    std::vector<double> y;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != h.n_cols) {
            std::ostringstream msg;
            msg << name << ": row " << row << ": expected " << h.n_cols << " fields, got "
                << fields.size();
            throw ParseError(msg.str());
        }
        for (index_t j = 0; j < d; ++j)
            x.values.push_back(parse_field(fields[h.x_cols[j]], name, row, h.x_cols[j] + 1));
        if (h.y_col != SIZE_MAX)
            y.push_back(parse_field(fields[h.y_col], name, row, h.y_col + 1));
    }
    x.n = x.values.size() / d;
    if (x.n == 0) throw ParseError(name + ": no data rows");
    if (h.y_col != SIZE_MAX) x.response = std::move(y);
    x.validate();
    return x;
}

DataMatrix read_data_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    return read_data_csv(in, path);
}

CovSpec read_covspec_csv(std::istream& in, const std::string& name) {
    DataMatrix table = read_data_csv(in, name);
    if (table.has_response()) throw ParseError(name + ": covariance file may not contain y");
    const index_t d = table.d;
    if (table.n != d + 1)
        throw ParseError(name + ": expected d+1 rows (mean then dispersion), got " +
                         std::to_string(table.n));
    std::vector<double> mean(table.row(0), table.row(0) + d);
    std::vector<double> disp(table.values.begin() + d, table.values.end());

    CovSpec cov = CovSpec::general(std::move(mean), std::move(disp));
    // detect the structure tag to unlock the fast paths
    bool diagonal = true;
    for (index_t i = 0; i < d && diagonal; ++i)
        for (index_t j = 0; j < d; ++j)
            if (i != j && cov.dispersion[i * d + j] != 0.0) {
                diagonal = false;
                break;
            }
    if (diagonal) {
        cov.structure = CovStructure::Diagonal;
    } else if (d >= 2) {
        const double rho = cov.dispersion[1];
        bool cs = rho > -1.0 / static_cast<double>(d - 1) && rho < 1.0;
        for (index_t i = 0; i < d && cs; ++i)
            for (index_t j = 0; j < d; ++j) {
                const double want = (i == j) ? 1.0 : rho;
                if (std::abs(cov.dispersion[i * d + j] - want) > 1e-12) {
                    cs = false;
                    break;
                }
            }
        if (cs) {
            cov.structure = CovStructure::CompoundSymmetry;
            cov.rho = rho;
        }
    }
    cov.validate();
    return cov;
}

CovSpec read_covspec_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    return read_covspec_csv(in, path);
}

void write_data_csv(const std::string& path, const DataMatrix& x) {
    std::ofstream out(path);
    if (!out) throw Error(path + ": cannot open for writing");
    out.precision(17);
    for (index_t j = 0; j < x.d; ++j) {
        if (j) out << ',';
        out << 'x' << (j + 1);
    }
    if (x.has_response()) out << ",y";
    out << '\n';
    for (index_t i = 0; i < x.n; ++i) {
        const double* row = x.row(i);
        for (index_t j = 0; j < x.d; ++j) {
            if (j) out << ',';
            out << row[j];
        }
        if (x.has_response()) out << ',' << (*x.response)[i];
        out << '\n';
    }
}

}  // namespace optsub
