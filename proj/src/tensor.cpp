#include "sccl/tensor.hpp"

#include <numeric>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "sccl/error.hpp"

namespace sccl {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::size_t b) { return a * b; });
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace detail {

bool AdjointContext::wants(std::size_t i) const { return inputs[i]->requires_grad; }

std::span<double> AdjointContext::input_grad(std::size_t i) const {
  inputs[i]->ensure_grad();
  return inputs[i]->grad;
}

std::span<const double> AdjointContext::input_value(std::size_t i) const {
  return inputs[i]->value;
}

const std::vector<std::size_t>& AdjointContext::input_shape(std::size_t i) const {
  return inputs[i]->shape;
}

}  // namespace detail

namespace {

std::shared_ptr<detail::Node> make_leaf(Shape shape, std::vector<double> values, bool trainable) {
  for (auto d : shape) {
    if (d == 0) throw ShapeError("tensor: zero extent in shape " + shape_str(shape));
  }
  if (values.size() != shape_size(shape)) {
    throw ShapeError("tensor: " + std::to_string(values.size()) + " values for shape " +
                     shape_str(shape));
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->trainable = trainable;
  node->requires_grad = trainable;
  return node;
}

}  // namespace

Tensor Tensor::zeros(Shape shape) {
  const auto n = shape_size(shape);
  return Tensor(make_leaf(std::move(shape), std::vector<double>(n, 0.0), false));
}

Tensor Tensor::constant(Shape shape, std::vector<double> values) {
  return Tensor(make_leaf(std::move(shape), std::move(values), false));
}

Tensor Tensor::parameter(Shape shape, std::vector<double> values) {
  return Tensor(make_leaf(std::move(shape), std::move(values), true));
}

Tensor Tensor::scalar(double value) { return constant({}, {value}); }

const Shape& Tensor::shape() const { return node_->shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= node_->shape.size()) {
    throw ShapeError("tensor: axis " + std::to_string(axis) + " out of range for " +
                     shape_str(node_->shape));
  }
  return node_->shape[axis];
}

std::size_t Tensor::size() const { return node_->value.size(); }

std::span<const double> Tensor::data() const { return node_->value; }

std::span<double> Tensor::mutable_data() { return node_->value; }

std::span<const double> Tensor::grad() const { return node_->grad; }

std::span<double> Tensor::mutable_grad() {
  node_->ensure_grad();
  return node_->grad;
}

double Tensor::item() const {
  if (node_->value.size() != 1) {
    throw ShapeError("item: tensor of shape " + shape_str(node_->shape) + " is not a scalar");
  }
  return node_->value[0];
}

bool Tensor::trainable() const { return node_->trainable; }

bool Tensor::requires_grad() const { return node_->requires_grad; }

const char* Tensor::op_name() const { return node_->op; }

void Tensor::zero_grad() { node_->grad.assign(node_->value.size(), 0.0); }

std::vector<double> Tensor::to_vector() const { return node_->value; }

Tensor record(const char* op, Shape shape, std::vector<double> value,
              const std::vector<Tensor>& inputs, detail::Adjoint adjoint) {
  auto node = std::make_shared<detail::Node>();
  node->op = op;
  node->shape = std::move(shape);
  node->value = std::move(value);
  for (const auto& in : inputs) {
    if (in.defined() && in.requires_grad()) {
      node->requires_grad = true;
      break;
    }
  }
  if (node->requires_grad) {
    node->parents.reserve(inputs.size());
    node->parent_ptrs.reserve(inputs.size());
    for (const auto& in : inputs) {
      node->parents.push_back(in.node_);
      node->parent_ptrs.push_back(in.node_.get());
    }
    node->adjoint = std::move(adjoint);
  }
  return Tensor(std::move(node));
}

Graph::Graph(Tensor output) : output_(std::move(output)) {
  // Iterative post-order DFS; parents always precede children in order_.
  std::unordered_set<detail::Node*> seen;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(output_.node(), 0);
  seen.insert(output_.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parent_ptrs.size()) {
      detail::Node* p = node->parent_ptrs[next++];
      if (p && p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order_.push_back(node);
      stack.pop_back();
    }
  }
}

void Graph::backward() {
  if (output_.size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got shape " + shape_str(output_.shape()));
  }
  for (auto* node : order_) {
    if (!node->parent_ptrs.empty()) node->grad.assign(node->value.size(), 0.0);
  }
  detail::Node* out = output_.node();
  out->ensure_grad();
  out->grad[0] += 1.0;
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    detail::Node* node = *it;
    if (!node->adjoint) continue;
    detail::AdjointContext ctx{node->grad, node->value, node->parent_ptrs};
    node->adjoint(ctx);
  }
}

void backward(const Tensor& loss) { Graph(loss).backward(); }

}  // namespace sccl
