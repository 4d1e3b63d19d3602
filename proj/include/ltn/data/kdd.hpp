#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ltn/data/table.hpp"

namespace ltn {

/// normal, DOS, probe, R2L, U2R
const std::vector<std::string>& kdd_categories();

/// The 23 connection labels (and "portseep") with their category.
const std::vector<std::pair<std::string, std::string>>& kdd_label_table();

/// Maps a connection label, trailing dots ignored, to its category.
/// Throws DataError naming the label if it is not a known one.
std::string map_kdd_category(std::string_view attack_name);

/// Replaces every cell of the label column with its category.
DatasetTable group_kdd_labels(const DatasetTable& table, const std::string& label_column);

}  // namespace ltn
