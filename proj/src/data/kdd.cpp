#include "ltn/data/kdd.hpp"

#include <algorithm>

#include "ltn/error.hpp"

namespace ltn {

const std::vector<std::string>& kdd_categories() {
  static const std::vector<std::string> cats{"normal", "DOS", "probe", "R2L", "U2R"};
  return cats;
}

const std::vector<std::pair<std::string, std::string>>& kdd_label_table() {
  static const std::vector<std::pair<std::string, std::string>> table{
      {"normal", "normal"},
      {"back", "DOS"},
      {"land", "DOS"},
      {"neptune", "DOS"},
      {"pod", "DOS"},
      {"smurf", "DOS"},
      {"teardrop", "DOS"},
      {"ftp_write", "R2L"},
      {"guess_passwd", "R2L"},
      {"imap", "R2L"},
      {"multihop", "R2L"},
      {"phf", "R2L"},
      {"spy", "R2L"},
      {"warezclient", "R2L"},
      {"warezmaster", "R2L"},
      {"buffer_overflow", "U2R"},
      {"loadmodule", "U2R"},
      {"perl", "U2R"},
      {"rootkit", "U2R"},
      {"ipsweep", "probe"},
      {"nmap", "probe"},
      {"portsweep", "probe"},
      {"portseep", "probe"},  // misspelling found in some label lists
      {"satan", "probe"},
  };
  return table;
}

std::string map_kdd_category(std::string_view attack_name) {
  std::string_view name = attack_name;
  while (!name.empty() && name.back() == '.') name.remove_suffix(1);
  const auto& table = kdd_label_table();
  auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; });
  if (it == table.end()) throw DataError("unknown KDD connection label '" + std::string(attack_name) + "'");
  return it->second;
}

DatasetTable group_kdd_labels(const DatasetTable& table, const std::string& label_column) {
  DatasetTable out = table;
  const auto c = out.schema.index_of(label_column);
  for (auto& row : out.rows) {
    if (std::holds_alternative<std::string>(row[c])) row[c] = map_kdd_category(std::get<std::string>(row[c]));
  }
  return out;
}

}  // namespace ltn
