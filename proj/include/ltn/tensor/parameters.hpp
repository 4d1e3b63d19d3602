#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "ltn/tensor/array.hpp"

namespace ltn {

using Gradients = std::map<std::string, Array>;

/// Named trainable arrays. Ordered by name so iteration (and hashing,
/// saving, optimizer updates) is deterministic.
class ParameterStore {
 public:
  void add(const std::string& name, Array value);
  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  const Array& get(const std::string& name) const;
  Array& get_mutable(const std::string& name);

  const std::map<std::string, Array>& all() const { return params_; }
  std::size_t size() const { return params_.size(); }

  /// FNV-1a over names, shapes and value bits.
  std::uint64_t hash() const;

  /// Text format, one parameter per line:
  ///   <name> <rank> <d0> ... <dk> <v0> <v1> ...
  /// with values printed to 17 significant digits.
  void save(const std::filesystem::path& path) const;
  static ParameterStore load(const std::filesystem::path& path);

 private:
  std::map<std::string, Array> params_;
};

}  // namespace ltn
