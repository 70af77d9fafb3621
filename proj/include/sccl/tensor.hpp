#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sccl {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

struct Node;

/// Handed to an adjoint when the output gradient is ready.
struct AdjointContext {
  std::span<const double> grad;   // dL/d(output)
  std::span<const double> value;  // output value
  std::span<Node* const> inputs;

  bool wants(std::size_t i) const;
  std::span<double> input_grad(std::size_t i) const;
  std::span<const double> input_value(std::size_t i) const;
  const std::vector<std::size_t>& input_shape(std::size_t i) const;
};

using Adjoint = std::function<void(const AdjointContext&)>;

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool trainable = false;
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::vector<Node*> parent_ptrs;
  Adjoint adjoint;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

}  // namespace detail

/// Dense row-major double tensor. Copies share the underlying node; values
/// are immutable once created except through mutable_data() on leaves
/// (parameter updates) and gradient accumulation.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape);
  static Tensor constant(Shape shape, std::vector<double> values);
  static Tensor parameter(Shape shape, std::vector<double> values);
  static Tensor scalar(double value);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const;

  std::span<const double> data() const;
  std::span<double> mutable_data();
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  double item() const;
  double operator[](std::size_t i) const { return data()[i]; }

  bool trainable() const;
  bool requires_grad() const;
  const char* op_name() const;
  void zero_grad();

  std::vector<double> to_vector() const;
  bool same_node(const Tensor& other) const { return node_ == other.node_; }
  detail::Node* node() const { return node_.get(); }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;

  friend Tensor record(const char* op, Shape shape, std::vector<double> value,
                       const std::vector<Tensor>& inputs, detail::Adjoint adjoint);
};

/// Records one primitive application on the dynamic graph. When no input
/// requires a gradient the result is a plain constant and the adjoint is
/// dropped.
Tensor record(const char* op, Shape shape, std::vector<double> value,
              const std::vector<Tensor>& inputs, detail::Adjoint adjoint);

/// Topologically ordered view of everything that feeds one output.
class Graph {
 public:
  explicit Graph(Tensor output);

  std::size_t size() const { return order_.size(); }
  std::span<detail::Node* const> nodes() const { return order_; }
  const Tensor& output() const { return output_; }

  /// Reverse accumulation from a scalar output. Intermediate gradients are
  /// reset; leaf gradients accumulate so several losses can be summed.
  void backward();

 private:
  Tensor output_;
  std::vector<detail::Node*> order_;
};

void backward(const Tensor& loss);

}  // namespace sccl
