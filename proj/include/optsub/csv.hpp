#pragma once

#include <iosfwd>
#include <string>

#include "optsub/types.hpp"

namespace optsub {

/// Reads a covariate table: UTF-8, comma separated, decimal point, first
/// row a header naming the columns x1..xd (any order) plus an optional
/// response column y. Parse failures report the row and column.
DataMatrix read_data_csv(const std::string& path);
DataMatrix read_data_csv(std::istream& in, const std::string& name);

/// Covariance spec file: header x1..xd, then d+1 rows -- the mean vector
/// followed by the d x d dispersion matrix. The structure tag (diagonal /
/// compound symmetry / general) is detected from the entries.
CovSpec read_covspec_csv(const std::string& path);
CovSpec read_covspec_csv(std::istream& in, const std::string& name);

void write_data_csv(const std::string& path, const DataMatrix& x);

}  // namespace optsub
