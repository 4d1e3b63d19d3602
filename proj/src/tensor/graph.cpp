#include "ltn/tensor/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltn/error.hpp"

namespace ltn {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Input: return "input";
    case Op::Parameter: return "parameter";
    case Op::Constant: return "constant";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::MatMul: return "matmul";
    case Op::Pow: return "pow";
    case Op::Abs: return "abs";
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sum: return "sum";
    case Op::Mean: return "mean";
    case Op::Min: return "min";
    case Op::Sigmoid: return "sigmoid";
    case Op::Elu: return "elu";
    case Op::Relu: return "relu";
    case Op::Softmax: return "softmax";
    case Op::Clamp: return "clamp";
    case Op::Expand: return "expand";
    case Op::Reshape: return "reshape";
    case Op::Concat: return "concat";
    case Op::Select: return "select";
  }
  return "?";
}

namespace {

bool is_suffix(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) return false;
  return std::equal(small.begin(), small.end(), big.end() - static_cast<std::ptrdiff_t>(small.size()));
}

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t n = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.n = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

Shape drop_axis(const Shape& shape, std::size_t axis) {
  Shape out = shape;
  out.erase(out.begin() + static_cast<std::ptrdiff_t>(axis));
  return out;
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

NodeId Graph::push(Node node) {
  for (auto p : node.parents) {
    if (p >= nodes_.size()) throw Error("graph node refers to a missing parent");
    node.requires_grad = node.requires_grad || nodes_[p].requires_grad;
  }
  evaluate(node);
  check_finite(node, nodes_.size());
  nodes_.push_back(std::move(node));
  return NodeId{nodes_.size() - 1};
}

void Graph::check_finite(const Node& node, std::size_t index) const {
  if (!node.value.all_finite()) {
    std::string what = "non-finite value produced by node #" + std::to_string(index) + " (" +
                       std::string(op_name(node.op));
    if (!node.name.empty()) what += " '" + node.name + "'";
    throw NumericError(what + ")");
  }
}

NodeId Graph::input(std::string name, Array value, bool trainable) {
  Node n;
  n.op = Op::Input;
  n.name = std::move(name);
  n.value = std::move(value);
  n.trainable = trainable;
  n.requires_grad = trainable;
  return push(std::move(n));
}

NodeId Graph::constant(Array value) {
  Node n;
  n.op = Op::Constant;
  n.value = std::move(value);
  return push(std::move(n));
}

NodeId Graph::parameter(const std::string& name) {
  if (params_ == nullptr) throw Error("graph has no parameter store for '" + name + "'");
  Node n;
  n.op = Op::Parameter;
  n.name = name;
  n.trainable = true;
  n.requires_grad = true;
  return push(std::move(n));
}

NodeId Graph::unary(Op op, NodeId x, double a, double b) {
  Node n;
  n.op = op;
  n.parents = {x.index};
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

NodeId Graph::binary(Op op, NodeId a, NodeId b) {
  Node n;
  n.op = op;
  n.parents = {a.index, b.index};
  return push(std::move(n));
}

NodeId Graph::reduce(Op op, NodeId x, std::size_t axis) {
  Node n;
  n.op = op;
  n.parents = {x.index};
  n.axis = axis;
  return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) { return binary(Op::Add, a, b); }
NodeId Graph::sub(NodeId a, NodeId b) { return binary(Op::Sub, a, b); }
NodeId Graph::mul(NodeId a, NodeId b) { return binary(Op::Mul, a, b); }
NodeId Graph::div(NodeId a, NodeId b) { return binary(Op::Div, a, b); }
NodeId Graph::matmul(NodeId a, NodeId b) { return binary(Op::MatMul, a, b); }
NodeId Graph::pow(NodeId x, double exponent) { return unary(Op::Pow, x, exponent); }
NodeId Graph::abs(NodeId x) { return unary(Op::Abs, x); }
NodeId Graph::sqrt(NodeId x) { return unary(Op::Sqrt, x); }
NodeId Graph::exp(NodeId x) { return unary(Op::Exp, x); }
NodeId Graph::log(NodeId x) { return unary(Op::Log, x); }
NodeId Graph::sum(NodeId x, std::size_t axis) { return reduce(Op::Sum, x, axis); }
NodeId Graph::mean(NodeId x, std::size_t axis) { return reduce(Op::Mean, x, axis); }
NodeId Graph::min(NodeId x, std::size_t axis) { return reduce(Op::Min, x, axis); }
NodeId Graph::sigmoid(NodeId x) { return unary(Op::Sigmoid, x); }
NodeId Graph::elu(NodeId x, double alpha) { return unary(Op::Elu, x, alpha); }
NodeId Graph::relu(NodeId x) { return unary(Op::Relu, x); }
NodeId Graph::softmax(NodeId x) { return unary(Op::Softmax, x); }

NodeId Graph::clamp(NodeId x, double lo, double hi) {
  if (!(lo <= hi)) throw Error("clamp bounds out of order");
  return unary(Op::Clamp, x, lo, hi);
}

NodeId Graph::expand(NodeId x, Shape out_shape, std::vector<std::size_t> axis_map) {
  Node n;
  n.op = Op::Expand;
  n.parents = {x.index};
  n.shape_attr = std::move(out_shape);
  n.axis_map = std::move(axis_map);
  return push(std::move(n));
}

NodeId Graph::reshape(NodeId x, Shape shape) {
  Node n;
  n.op = Op::Reshape;
  n.parents = {x.index};
  n.shape_attr = std::move(shape);
  return push(std::move(n));
}

NodeId Graph::concat(std::span<const NodeId> parts) {
  if (parts.empty()) throw ShapeError("concat of zero arrays");
  Node n;
  n.op = Op::Concat;
  for (auto p : parts) n.parents.push_back(p.index);
  return push(std::move(n));
}

NodeId Graph::select(NodeId x, std::size_t index) {
  Node n;
  n.op = Op::Select;
  n.parents = {x.index};
  n.axis = index;
  return push(std::move(n));
}

NodeId Graph::sum_all(NodeId x) {
  NodeId cur = x;
  while (!shape(cur).empty()) cur = sum(cur, 0);
  return cur;
}

NodeId Graph::mean_all(NodeId x) {
  NodeId cur = x;
  while (!shape(cur).empty()) cur = mean(cur, 0);
  return cur;
}

void Graph::evaluate(Node& node) const {
  auto arg = [&](std::size_t i) -> const Array& { return nodes_[node.parents[i]].value; };

  switch (node.op) {
    case Op::Input:
    case Op::Constant:
      return;
    case Op::Parameter:
      node.value = params_->get(node.name);
      return;

    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const Array& a = arg(0);
      const Array& b = arg(1);
      const Shape* out_shape = nullptr;
      if (a.shape() == b.shape() || is_suffix(b.shape(), a.shape())) {
        out_shape = &a.shape();
      } else if (is_suffix(a.shape(), b.shape())) {
        out_shape = &b.shape();
      } else {
        throw ShapeError(std::string(op_name(node.op)) + ": cannot broadcast " + shape_string(a.shape()) +
                         " with " + shape_string(b.shape()));
      }
      Array out(*out_shape);
      const auto na = a.size();
      const auto nb = b.size();
      auto o = out.mutable_data();
      for (std::size_t i = 0; i < o.size(); ++i) {
        const double x = a[i % na];
        const double y = b[i % nb];
        switch (node.op) {
          case Op::Add: o[i] = x + y; break;
          case Op::Sub: o[i] = x - y; break;
          case Op::Mul: o[i] = x * y; break;
          default: o[i] = x / y; break;
        }
      }
      node.value = std::move(out);
      return;
    }

    case Op::MatMul: {
      const Array& a = arg(0);
      const Array& b = arg(1);
      if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
        throw ShapeError("matmul: incompatible shapes " + shape_string(a.shape()) + " and " +
                         shape_string(b.shape()));
      }
      const auto n = a.dim(0), k = a.dim(1), m = b.dim(1);
      Array out(Shape{n, m});
      auto o = out.mutable_data();
      const auto ad = a.data();
      const auto bd = b.data();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t kk = 0; kk < k; ++kk) {
          const double av = ad[i * k + kk];
          if (av == 0.0) continue;
          const double* brow = bd.data() + kk * m;
          double* orow = o.data() + i * m;
          for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
      }
      node.value = std::move(out);
      return;
    }

    case Op::Pow:
    case Op::Abs:
    case Op::Sqrt:
    case Op::Exp:
    case Op::Log:
    case Op::Sigmoid:
    case Op::Elu:
    case Op::Relu:
    case Op::Clamp: {
      Array out = arg(0);
      for (double& v : out.mutable_data()) {
        switch (node.op) {
          case Op::Pow: v = std::pow(v, node.a); break;
          case Op::Abs: v = std::fabs(v); break;
          case Op::Sqrt: v = std::sqrt(v); break;
          case Op::Exp: v = std::exp(v); break;
          case Op::Log: v = std::log(v); break;
          case Op::Sigmoid: v = stable_sigmoid(v); break;
          case Op::Elu: v = v > 0 ? v : node.a * std::expm1(v); break;
          case Op::Relu: v = v > 0 ? v : 0.0; break;
          default: v = std::clamp(v, node.a, node.b); break;
        }
      }
      node.value = std::move(out);
      return;
    }

    case Op::Sum:
    case Op::Mean:
    case Op::Min: {
      const Array& x = arg(0);
      if (node.axis >= x.rank()) {
        throw ShapeError(std::string(op_name(node.op)) + ": axis " + std::to_string(node.axis) +
                         " out of range for shape " + shape_string(x.shape()));
      }
      const auto s = split_at(x.shape(), node.axis);
      if (s.n == 0) throw ShapeError(std::string(op_name(node.op)) + " over an empty axis");
      Array out(drop_axis(x.shape(), node.axis));
      auto o = out.mutable_data();
      for (std::size_t oi = 0; oi < s.outer; ++oi) {
        for (std::size_t ii = 0; ii < s.inner; ++ii) {
          double acc = node.op == Op::Min ? std::numeric_limits<double>::infinity() : 0.0;
          for (std::size_t j = 0; j < s.n; ++j) {
            const double v = x[(oi * s.n + j) * s.inner + ii];
            acc = node.op == Op::Min ? std::min(acc, v) : acc + v;
          }
          if (node.op == Op::Mean) acc /= static_cast<double>(s.n);
          o[oi * s.inner + ii] = acc;
        }
      }
      node.value = std::move(out);
      return;
    }

    case Op::Softmax: {
      const Array& x = arg(0);
      if (x.rank() == 0) throw ShapeError("softmax of a scalar");
      const auto c = x.shape().back();
      Array out = x;
      auto o = out.mutable_data();
      for (std::size_t r = 0; r + c <= o.size() && c > 0; r += c) {
        const double mx = *std::max_element(o.begin() + static_cast<std::ptrdiff_t>(r),
                                            o.begin() + static_cast<std::ptrdiff_t>(r + c));
        double total = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
          o[r + j] = std::exp(o[r + j] - mx);
          total += o[r + j];
        }
        for (std::size_t j = 0; j < c; ++j) o[r + j] /= total;
      }
      node.value = std::move(out);
      return;
    }

    case Op::Expand: {
      const Array& x = arg(0);
      const Shape& out_shape = node.shape_attr;
      if (node.axis_map.size() != x.rank()) {
        throw ShapeError("expand: axis map has " + std::to_string(node.axis_map.size()) +
                         " entries for input shape " + shape_string(x.shape()));
      }
      std::vector<std::size_t> in_stride_at_out(out_shape.size(), 0);
      std::size_t stride = 1;
      for (std::size_t i = x.rank(); i-- > 0;) {
        const auto oa = node.axis_map[i];
        if (oa >= out_shape.size() || out_shape[oa] != x.dim(i) || in_stride_at_out[oa] != 0) {
          throw ShapeError("expand: cannot place " + shape_string(x.shape()) + " into " +
                           shape_string(out_shape));
        }
        in_stride_at_out[oa] = stride;
        stride *= x.dim(i);
      }
      const auto total = shape_size(out_shape);
      node.gather.assign(total, 0);
      std::vector<std::size_t> idx(out_shape.size(), 0);
      for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t off = 0;
        for (std::size_t d = 0; d < idx.size(); ++d) off += idx[d] * in_stride_at_out[d];
        node.gather[flat] = off;
        for (std::size_t d = idx.size(); d-- > 0;) {
          if (++idx[d] < out_shape[d]) break;
          idx[d] = 0;
        }
      }
      Array out(out_shape);
      auto o = out.mutable_data();
      for (std::size_t i = 0; i < total; ++i) o[i] = x[node.gather[i]];
      node.value = std::move(out);
      return;
    }

    case Op::Reshape:
      node.value = arg(0).reshaped(node.shape_attr);
      return;

    case Op::Concat: {
      const Array& first = arg(0);
      if (first.rank() == 0) throw ShapeError("concat of scalars");
      Shape lead(first.shape().begin(), first.shape().end() - 1);
      std::size_t width = 0;
      for (std::size_t p = 0; p < node.parents.size(); ++p) {
        const Array& part = arg(p);
        if (part.rank() != first.rank() ||
            !std::equal(lead.begin(), lead.end(), part.shape().begin())) {
          throw ShapeError("concat: mismatched shapes " + shape_string(first.shape()) + " and " +
                           shape_string(part.shape()));
        }
        width += part.shape().back();
      }
      Shape out_shape = lead;
      out_shape.push_back(width);
      Array out(out_shape);
      const auto rows = shape_size(lead);
      auto o = out.mutable_data();
      std::size_t col = 0;
      for (std::size_t p = 0; p < node.parents.size(); ++p) {
        const Array& part = arg(p);
        const auto w = part.shape().back();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t j = 0; j < w; ++j) o[r * width + col + j] = part[r * w + j];
        }
        col += w;
      }
      node.value = std::move(out);
      return;
    }

    case Op::Select: {
      const Array& x = arg(0);
      if (x.rank() == 0 || node.axis >= x.shape().back()) {
        throw ShapeError("select: index " + std::to_string(node.axis) + " out of range for shape " +
                         shape_string(x.shape()));
      }
      const auto c = x.shape().back();
      Array out(Shape(x.shape().begin(), x.shape().end() - 1));
      auto o = out.mutable_data();
      for (std::size_t r = 0; r < o.size(); ++r) o[r] = x[r * c + node.axis];
      node.value = std::move(out);
      return;
    }
  }
}

void Graph::forward(const Feeds& feeds) {
  std::size_t matched = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    Node& node = nodes_[i];
    if (node.op == Op::Input) {
      auto it = feeds.find(node.name);
      if (it != feeds.end()) {
        node.value = it->second;
        ++matched;
      }
    } else {
      evaluate(node);
    }
    check_finite(node, i);
  }
  if (matched < feeds.size()) {
    for (const auto& [name, _] : feeds) {
      const bool known = std::any_of(nodes_.begin(), nodes_.end(),
                                     [&](const Node& n) { return n.op == Op::Input && n.name == name; });
      if (!known) throw Error("feed '" + name + "' does not name an input of the graph");
    }
  }
}

std::vector<Array> Graph::backward(NodeId root) const {
  if (root.index >= nodes_.size()) throw Error("backward: unknown root node");
  if (value(root).size() != 1) {
    throw ShapeError("backward: root must be scalar, got shape " + shape_string(shape(root)));
  }
  std::vector<Array> grads;
  grads.reserve(nodes_.size());
  for (const auto& n : nodes_) grads.emplace_back(n.value.shape());
  grads[root.index][0] = 1.0;

  for (std::size_t i = root.index + 1; i-- > 0;) {
    const Node& node = nodes_[i];
    if (!node.requires_grad || node.parents.empty()) continue;
    for (auto p : node.parents) {
      if (p >= i) throw Error("backward: cycle detected at node #" + std::to_string(i));
    }
    const Array& g = grads[i];
    const Array& y = node.value;
    auto parent_grad = [&](std::size_t k) -> Array& { return grads[node.parents[k]]; };
    auto parent_val = [&](std::size_t k) -> const Array& { return nodes_[node.parents[k]].value; };
    auto wants = [&](std::size_t k) { return nodes_[node.parents[k]].requires_grad; };

    switch (node.op) {
      case Op::Input:
      case Op::Parameter:
      case Op::Constant:
        break;

      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div: {
        const Array& a = parent_val(0);
        const Array& b = parent_val(1);
        const auto na = a.size();
        const auto nb = b.size();
        for (std::size_t k = 0; k < g.size(); ++k) {
          const double gk = g[k];
          if (gk == 0.0) continue;
          const double x = a[k % na];
          const double z = b[k % nb];
          double da = 0.0, db = 0.0;
          switch (node.op) {
            case Op::Add: da = 1.0; db = 1.0; break;
            case Op::Sub: da = 1.0; db = -1.0; break;
            case Op::Mul: da = z; db = x; break;
            default: da = 1.0 / z; db = -x / (z * z); break;
          }
          if (wants(0)) parent_grad(0)[k % na] += gk * da;
          if (wants(1)) parent_grad(1)[k % nb] += gk * db;
        }
        break;
      }

      case Op::MatMul: {
        const Array& a = parent_val(0);
        const Array& b = parent_val(1);
        const auto n = a.dim(0), k = a.dim(1), m = b.dim(1);
        if (wants(0)) {
          Array& ga = parent_grad(0);
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t kk = 0; kk < k; ++kk) {
              double acc = 0.0;
              for (std::size_t j = 0; j < m; ++j) acc += g[r * m + j] * b[kk * m + j];
              ga[r * k + kk] += acc;
            }
        }
        if (wants(1)) {
          Array& gb = parent_grad(1);
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t kk = 0; kk < k; ++kk) {
              const double av = a[r * k + kk];
              if (av == 0.0) continue;
              for (std::size_t j = 0; j < m; ++j) gb[kk * m + j] += av * g[r * m + j];
            }
        }
        break;
      }

      case Op::Pow:
      case Op::Abs:
      case Op::Sqrt:
      case Op::Exp:
      case Op::Log:
      case Op::Sigmoid:
      case Op::Elu:
      case Op::Relu:
      case Op::Clamp: {
        if (!wants(0)) break;
        const Array& x = parent_val(0);
        Array& gx = parent_grad(0);
        for (std::size_t k = 0; k < g.size(); ++k) {
          const double xv = x[k];
          double d = 0.0;
          switch (node.op) {
            case Op::Pow:
              // At a zero base with exponent below one the derivative is
              // unbounded; take the zero subgradient instead.
              if (xv == 0.0 && node.a < 1.0) {
                d = 0.0;
              } else {
                d = node.a * std::pow(xv, node.a - 1.0);
              }
              break;
            case Op::Abs: d = xv > 0 ? 1.0 : (xv < 0 ? -1.0 : 0.0); break;
            case Op::Sqrt: d = y[k] > 0 ? 0.5 / y[k] : 0.0; break;
            case Op::Exp: d = y[k]; break;
            case Op::Log: d = 1.0 / xv; break;
            case Op::Sigmoid: d = y[k] * (1.0 - y[k]); break;
            case Op::Elu: d = xv > 0 ? 1.0 : y[k] + node.a; break;
            case Op::Relu: d = xv > 0 ? 1.0 : 0.0; break;
            default: d = (xv >= node.a && xv <= node.b) ? 1.0 : 0.0; break;
          }
          gx[k] += g[k] * d;
        }
        break;
      }

      case Op::Sum:
      case Op::Mean:
      case Op::Min: {
        if (!wants(0)) break;
        const Array& x = parent_val(0);
        Array& gx = parent_grad(0);
        const auto s = split_at(x.shape(), node.axis);
        const double scale = node.op == Op::Mean ? 1.0 / static_cast<double>(s.n) : 1.0;
        for (std::size_t oi = 0; oi < s.outer; ++oi) {
          for (std::size_t ii = 0; ii < s.inner; ++ii) {
            const double go = g[oi * s.inner + ii];
            if (node.op == Op::Min) {
              const double target = y[oi * s.inner + ii];
              for (std::size_t j = 0; j < s.n; ++j) {
                const auto idx = (oi * s.n + j) * s.inner + ii;
                if (x[idx] == target) {
                  gx[idx] += go;
                  break;
                }
              }
            } else {
              for (std::size_t j = 0; j < s.n; ++j) gx[(oi * s.n + j) * s.inner + ii] += go * scale;
            }
          }
        }
        break;
      }

      case Op::Softmax: {
        if (!wants(0)) break;
        Array& gx = parent_grad(0);
        const auto c = y.shape().back();
        for (std::size_t r = 0; r + c <= y.size() && c > 0; r += c) {
          double dot = 0.0;
          for (std::size_t j = 0; j < c; ++j) dot += g[r + j] * y[r + j];
          for (std::size_t j = 0; j < c; ++j) gx[r + j] += y[r + j] * (g[r + j] - dot);
        }
        break;
      }

      case Op::Expand: {
        if (!wants(0)) break;
        Array& gx = parent_grad(0);
        for (std::size_t k = 0; k < g.size(); ++k) gx[node.gather[k]] += g[k];
        break;
      }

      case Op::Reshape: {
        if (!wants(0)) break;
        Array& gx = parent_grad(0);
        for (std::size_t k = 0; k < g.size(); ++k) gx[k] += g[k];
        break;
      }

      case Op::Concat: {
        const auto width = y.shape().back();
        const auto rows = width == 0 ? 0 : y.size() / width;
        std::size_t col = 0;
        for (std::size_t p = 0; p < node.parents.size(); ++p) {
          const auto w = parent_val(p).shape().back();
          if (wants(p)) {
            Array& gp = parent_grad(p);
            for (std::size_t r = 0; r < rows; ++r)
              for (std::size_t j = 0; j < w; ++j) gp[r * w + j] += g[r * width + col + j];
          }
          col += w;
        }
        break;
      }

      case Op::Select: {
        if (!wants(0)) break;
        Array& gx = parent_grad(0);
        const auto c = parent_val(0).shape().back();
        for (std::size_t r = 0; r < g.size(); ++r) gx[r * c + node.axis] += g[r];
        break;
      }
    }
  }

  return grads;
}

Gradients Graph::parameter_gradients(const std::vector<Array>& grads) const {
  Gradients out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].op != Op::Parameter) continue;
    auto [it, inserted] = out.try_emplace(nodes_[i].name, grads.at(i));
    if (!inserted) {
      auto dst = it->second.mutable_data();
      const auto src = grads[i].data();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
  }
  return out;
}

}  // namespace ltn
