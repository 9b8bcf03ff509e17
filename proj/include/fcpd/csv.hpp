#pragma once

#include <optional>
#include <string>

#include "fcpd/fseries.hpp"

namespace fcpd {

/// Read a functional sample: one row per curve, comma-separated values,
/// lines starting with '#' ignored. When `first_row_is_grid` the first
/// non-comment row holds the grid points; otherwise the grid defaults to
/// equispaced on [0,1]. Missing or non-finite cells are hard errors with
/// row/column diagnostics.
FSeries read_csv(const std::string& path, bool first_row_is_grid = false);

/// Write curves row-wise with 17 significant digits. `comment`, when given,
/// is emitted first as '#'-prefixed lines; with `grid_row` the grid points
/// are written before the data.
void write_csv(const std::string& path, const FSeries& xs,
               bool grid_row = false,
               const std::optional<std::string>& comment = std::nullopt);

}  // namespace fcpd
