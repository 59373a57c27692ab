#pragma once

#include "pitest/types.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pitest {

/// n observations of d numeric columns, stored row-major.
class Dataset {
public:
    /// Requires n >= 2 rows and finite entries.
    Dataset(RowMatrix rows, std::vector<std::string> columns);

    std::size_t n() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
    std::size_t d() const noexcept { return static_cast<std::size_t>(rows_.cols()); }

    std::span<const double> row(std::size_t i) const
    {
        return {rows_.data() + i * d(), d()};
    }
    const RowMatrix& rows() const noexcept { return rows_; }
    const std::vector<std::string>& columns() const noexcept { return columns_; }

    /// Index of a named column; DataError if absent.
    std::size_t column(const std::string& name) const;

private:
    RowMatrix rows_;
    std::vector<std::string> columns_;
};

/// Header line, then one row of decimal numerals per line. Errors name the
/// offending line and column.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const Dataset& data);

/// Headerless numeric CSV (a header line is skipped if present).
RowMatrix read_numeric_csv(std::istream& in);
RowMatrix read_numeric_csv_file(const std::string& path);

} // namespace pitest
