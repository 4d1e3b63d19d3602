#include "ltn/tensor/parameters.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ltn/error.hpp"

namespace ltn {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

void ParameterStore::add(const std::string& name, Array value) {
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) {
    throw Error("invalid parameter name '" + name + "'");
  }
  if (!params_.emplace(name, std::move(value)).second) {
    throw Error("duplicate parameter '" + name + "'");
  }
}

const Array& ParameterStore::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw Error("unknown parameter '" + name + "'");
  return it->second;
}

Array& ParameterStore::get_mutable(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw Error("unknown parameter '" + name + "'");
  return it->second;
}

std::uint64_t ParameterStore::hash() const {
  std::uint64_t h = kFnvOffset;
  for (const auto& [name, value] : params_) {
    fnv_bytes(h, name.data(), name.size());
    for (auto d : value.shape()) fnv_bytes(h, &d, sizeof d);
    for (double v : value.data()) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      fnv_bytes(h, &bits, sizeof bits);
    }
  }
  return h;
}

void ParameterStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write parameters to " + path.string());
  char buf[32];
  for (const auto& [name, value] : params_) {
    out << name << ' ' << value.rank();
    for (auto d : value.shape()) out << ' ' << d;
    for (double v : value.data()) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ' ' << buf;
    }
    out << '\n';
  }
}

ParameterStore ParameterStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read parameters from " + path.string());
  ParameterStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name;
    std::size_t rank = 0;
    if (!(ls >> name >> rank)) throw Error(path.string() + ":" + std::to_string(line_no) + ": malformed header");
    Shape shape(rank);
    for (auto& d : shape) {
      if (!(ls >> d)) throw Error(path.string() + ":" + std::to_string(line_no) + ": malformed shape");
    }
    std::vector<double> values(shape_size(shape));
    for (auto& v : values) {
      if (!(ls >> v)) throw Error(path.string() + ":" + std::to_string(line_no) + ": too few values");
    }
    store.add(name, Array(std::move(shape), std::move(values)));
  }
  return store;
}

}  // namespace ltn
