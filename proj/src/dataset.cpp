#include "pitest/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace pitest {

Dataset::Dataset(RowMatrix rows, std::vector<std::string> columns)
    : rows_(std::move(rows)), columns_(std::move(columns))
{
    if (rows_.rows() < 2) {
        throw DataError("dataset needs at least 2 observations");
    }
    if (static_cast<std::size_t>(rows_.cols()) != columns_.size()) {
        throw DataError("column name count does not match data width");
    }
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
        if (!rows_.row(i).allFinite()) {
            throw DataError("non-finite entry in row " + std::to_string(i), static_cast<long>(i));
        }
    }
}

std::size_t Dataset::column(const std::string& name) const
{
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (columns_[j] == name) {
            return j;
        }
    }
    throw DataError("dataset has no column named '" + name + "'");
}

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

bool parse_number(const std::string& field, double& value)
{
    if (field.empty()) {
        return false;
    }
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (*first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last && std::isfinite(value);
}

[[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& msg)
{
    std::ostringstream os;
    os << "line " << line << ", column " << column << ": " << msg;
    throw DataError(os.str(), static_cast<long>(line));
}

RowMatrix parse_rows(std::istream& in, std::size_t first_line_no, std::size_t width,
                     std::vector<std::string> pending)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = first_line_no;
    auto consume = [&](const std::vector<std::string>& fields) {
        if (width != 0 && fields.size() != width) {
            fail(line_no, fields.size() < width ? fields.size() + 1 : width + 1,
                 "expected " + std::to_string(width) + " fields, found " +
                     std::to_string(fields.size()));
        }
        std::vector<double> r(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (!parse_number(fields[j], r[j])) {
                fail(line_no, j + 1, "not a finite decimal number: '" + fields[j] + "'");
            }
        }
        width = fields.size();
        rows.push_back(std::move(r));
    };
    if (!pending.empty()) {
        consume(pending);
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        consume(split_fields(line));
    }
    RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

} // namespace

Dataset read_csv(std::istream& in)
{
    std::string header;
    std::size_t line_no = 0;
    while (std::getline(in, header)) {
        ++line_no;
        if (!trim(header).empty()) {
            break;
        }
    }
    if (trim(header).empty()) {
        throw DataError("line 1, column 1: missing header line");
    }
    auto names = split_fields(header);
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j].empty()) {
            fail(line_no, j + 1, "empty column name");
        }
    }
    RowMatrix rows = parse_rows(in, line_no, names.size(), {});
    return Dataset(std::move(rows), std::move(names));
}

Dataset read_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open data file '" + path + "'");
    }
    return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data)
{
    const auto& cols = data.columns();
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out << (j ? "," : "") << cols[j];
    }
    out << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < data.n(); ++i) {
        const auto r = data.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            out << (j ? "," : "") << r[j];
        }
        out << '\n';
    }
}

RowMatrix read_numeric_csv(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            break;
        }
    }
    if (trim(line).empty()) {
        throw DataError("line 1, column 1: empty file");
    }
    auto fields = split_fields(line);
    double probe = 0.0;
    const bool header = !parse_number(fields.front(), probe);
    if (header) {
        return parse_rows(in, line_no, fields.size(), {});
    }
    return parse_rows(in, line_no, 0, std::move(fields));
}

RowMatrix read_numeric_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open file '" + path + "'");
    }
    return read_numeric_csv(in);
}

} // namespace pitest
