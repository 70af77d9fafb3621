#include "sccl/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sccl/error.hpp"

namespace sccl {

namespace {

[[noreturn]] void shape_fail(const char* op, const std::string& detail) {
  throw ShapeError(std::string(op) + ": " + detail);
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    shape_fail(op, "shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

// Splits a shape around `axis` into (outer, extent, inner) for axis-wise loops.
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

AxisSplit split_axis(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

template <class F, class DF>
Tensor unary(const char* op, const Tensor& x, F f, DF df_from_y_x) {
  auto xs = x.data();
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
  return record(op, x.shape(), std::move(out), {x},
                [df_from_y_x](const detail::AdjointContext& ctx) {
                  if (!ctx.wants(0)) return;
                  auto gx = ctx.input_grad(0);
                  auto xv = ctx.input_value(0);
                  for (std::size_t i = 0; i < gx.size(); ++i) {
                    gx[i] += ctx.grad[i] * df_from_y_x(ctx.value[i], xv[i]);
                  }
                });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || (b.rank() != 1 && b.rank() != 2) || a.dim(1) != b.dim(0)) {
    shape_fail("matmul", "cannot multiply " + shape_str(a.shape()) + " by " + shape_str(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1);
  const std::size_t n = b.rank() == 2 ? b.dim(1) : 1;
  auto av = a.data();
  auto bv = b.data();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      const double* brow = bv.data() + p * n;
      double* orow = out.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  Shape shape = b.rank() == 2 ? Shape{m, n} : Shape{m};
  return record("matmul", std::move(shape), std::move(out), {a, b},
                [m, k, n](const detail::AdjointContext& ctx) {
                  auto av = ctx.input_value(0);
                  auto bv = ctx.input_value(1);
                  const auto& g = ctx.grad;
                  if (ctx.wants(0)) {
                    auto ga = ctx.input_grad(0);
                    for (std::size_t i = 0; i < m; ++i)
                      for (std::size_t p = 0; p < k; ++p) {
                        double acc = 0.0;
                        for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * bv[p * n + j];
                        ga[i * k + p] += acc;
                      }
                  }
                  if (ctx.wants(1)) {
                    auto gb = ctx.input_grad(1);
                    for (std::size_t i = 0; i < m; ++i)
                      for (std::size_t p = 0; p < k; ++p) {
                        const double aip = av[i * k + p];
                        for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
                      }
                  }
                });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  auto av = a.data();
  auto bv = b.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return record("add", a.shape(), std::move(out), {a, b}, [](const detail::AdjointContext& ctx) {
    for (std::size_t s = 0; s < 2; ++s) {
      if (!ctx.wants(s)) continue;
      auto g = ctx.input_grad(s);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += ctx.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  auto av = a.data();
  auto bv = b.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return record("sub", a.shape(), std::move(out), {a, b}, [](const detail::AdjointContext& ctx) {
    if (ctx.wants(0)) {
      auto g = ctx.input_grad(0);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += ctx.grad[i];
    }
    if (ctx.wants(1)) {
      auto g = ctx.input_grad(1);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= ctx.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  auto av = a.data();
  auto bv = b.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return record("mul", a.shape(), std::move(out), {a, b}, [](const detail::AdjointContext& ctx) {
    auto av = ctx.input_value(0);
    auto bv = ctx.input_value(1);
    if (ctx.wants(0)) {
      auto g = ctx.input_grad(0);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += ctx.grad[i] * bv[i];
    }
    if (ctx.wants(1)) {
      auto g = ctx.input_grad(1);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += ctx.grad[i] * av[i];
    }
  });
}

Tensor scale(const Tensor& x, double factor) {
  return unary("scale", x, [factor](double v) { return factor * v; },
               [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& x, double offset) {
  return unary("add_scalar", x, [offset](double v) { return v + offset; },
               [](double, double) { return 1.0; });
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) shape_fail("concat", "no inputs");
  const Shape& ref = parts.front().shape();
  if (axis >= ref.size()) shape_fail("concat", "axis " + std::to_string(axis) + " out of range for " + shape_str(ref));
  Shape out_shape = ref;
  out_shape[axis] = 0;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == ref.size();
    for (std::size_t i = 0; ok && i < s.size(); ++i) ok = i == axis || s[i] == ref[i];
    if (!ok) shape_fail("concat", "incompatible parts " + shape_str(ref) + " and " + shape_str(s));
    out_shape[axis] += s[axis];
  }
  const AxisSplit outs = split_axis(out_shape, axis);
  std::vector<std::size_t> widths;
  widths.reserve(parts.size());
  for (const auto& p : parts) widths.push_back(p.dim(axis) * outs.inner);
  const std::size_t row = outs.extent * outs.inner;
  std::vector<double> out(shape_size(out_shape));
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto v = parts[k].data();
    for (std::size_t o = 0; o < outs.outer; ++o) {
      std::copy_n(v.data() + o * widths[k], widths[k], out.data() + o * row + offset);
    }
    offset += widths[k];
  }
  return record("concat", std::move(out_shape), std::move(out), parts,
                [widths, row, outer = outs.outer](const detail::AdjointContext& ctx) {
                  std::size_t off = 0;
                  for (std::size_t k = 0; k < widths.size(); ++k) {
                    if (ctx.wants(k)) {
                      auto g = ctx.input_grad(k);
                      for (std::size_t o = 0; o < outer; ++o)
                        for (std::size_t i = 0; i < widths[k]; ++i)
                          g[o * widths[k] + i] += ctx.grad[o * row + off + i];
                    }
                    off += widths[k];
                  }
                });
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end) {
  if (axis >= x.rank() || begin >= end || end > x.dim(axis)) {
    shape_fail("slice", "range [" + std::to_string(begin) + "," + std::to_string(end) + ") on axis " +
                            std::to_string(axis) + " of " + shape_str(x.shape()));
  }
  const AxisSplit in = split_axis(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape[axis] = end - begin;
  const std::size_t width = (end - begin) * in.inner;
  const std::size_t row = in.extent * in.inner;
  const std::size_t start = begin * in.inner;
  auto v = x.data();
  std::vector<double> out(in.outer * width);
  for (std::size_t o = 0; o < in.outer; ++o) {
    std::copy_n(v.data() + o * row + start, width, out.data() + o * width);
  }
  return record("slice", std::move(out_shape), std::move(out), {x},
                [outer = in.outer, width, row, start](const detail::AdjointContext& ctx) {
                  if (!ctx.wants(0)) return;
                  auto g = ctx.input_grad(0);
                  for (std::size_t o = 0; o < outer; ++o)
                    for (std::size_t i = 0; i < width; ++i) g[o * row + start + i] += ctx.grad[o * width + i];
                });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) {
    shape_fail("reshape", "cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
  }
  auto v = x.data();
  return record("reshape", std::move(shape), std::vector<double>(v.begin(), v.end()), {x},
                [](const detail::AdjointContext& ctx) {
                  if (!ctx.wants(0)) return;
                  auto g = ctx.input_grad(0);
                  for (std::size_t i = 0; i < g.size(); ++i) g[i] += ctx.grad[i];
                });
}

Tensor gather_rows(const Tensor& table, std::span<const std::size_t> indices) {
  if (table.rank() != 2) shape_fail("gather_rows", "table must be 2-D, got " + shape_str(table.shape()));
  const std::size_t rows = table.dim(0), width = table.dim(1);
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  auto v = table.data();
  std::vector<double> out(idx.size() * width);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] >= rows) {
      shape_fail("gather_rows", "row " + std::to_string(idx[r]) + " outside table " + shape_str(table.shape()));
    }
    std::copy_n(v.data() + idx[r] * width, width, out.data() + r * width);
  }
  return record("gather_rows", Shape{idx.size(), width}, std::move(out), {table},
                [idx, width](const detail::AdjointContext& ctx) {
                  if (!ctx.wants(0)) return;
                  auto g = ctx.input_grad(0);
                  for (std::size_t r = 0; r < idx.size(); ++r)
                    for (std::size_t c = 0; c < width; ++c) g[idx[r] * width + c] += ctx.grad[r * width + c];
                });
}

Tensor sigmoid(const Tensor& x) {
  return unary("sigmoid", x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
               [](double y, double) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& x) {
  return unary("tanh", x, [](double v) { return std::tanh(v); },
               [](double y, double) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& x) {
  return unary("relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
               [](double, double v) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor softmax(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank()) shape_fail("softmax", "axis " + std::to_string(axis) + " out of range for " + shape_str(x.shape()));
  const AxisSplit s = split_axis(x.shape(), axis);
  auto v = x.data();
  std::vector<double> out(v.size());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.extent * s.inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < s.extent; ++j) mx = std::max(mx, v[base + j * s.inner]);
      double z = 0.0;
      for (std::size_t j = 0; j < s.extent; ++j) {
        const double e = std::exp(v[base + j * s.inner] - mx);
        out[base + j * s.inner] = e;
        z += e;
      }
      for (std::size_t j = 0; j < s.extent; ++j) out[base + j * s.inner] /= z;
    }
  }
  return record("softmax", x.shape(), std::move(out), {x}, [s](const detail::AdjointContext& ctx) {
    if (!ctx.wants(0)) return;
    auto g = ctx.input_grad(0);
    const auto& y = ctx.value;
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t in = 0; in < s.inner; ++in) {
        const std::size_t base = o * s.extent * s.inner + in;
        double dot = 0.0;
        for (std::size_t j = 0; j < s.extent; ++j) dot += ctx.grad[base + j * s.inner] * y[base + j * s.inner];
        for (std::size_t j = 0; j < s.extent; ++j) {
          const std::size_t at = base + j * s.inner;
          g[at] += y[at] * (ctx.grad[at] - dot);
        }
      }
    }
  });
}

Tensor conv1d(const Tensor& input, const Tensor& kernels, const Tensor& bias) {
  if (input.rank() != 2 || kernels.rank() != 3 || kernels.dim(2) != input.dim(1) ||
      kernels.dim(1) > input.dim(0) || kernels.dim(1) == 0) {
    shape_fail("conv1d", "input " + shape_str(input.shape()) + " incompatible with kernels " +
                             shape_str(kernels.shape()));
  }
  const std::size_t len = input.dim(0), ch = input.dim(1);
  const std::size_t filters = kernels.dim(0), width = kernels.dim(1);
  const bool has_bias = bias.defined();
  if (has_bias && (bias.rank() != 1 || bias.dim(0) != filters)) {
    shape_fail("conv1d", "bias " + shape_str(bias.shape()) + " does not match " + std::to_string(filters) + " filters");
  }
  const std::size_t out_len = len - width + 1;
  const std::size_t span = width * ch;  // a window is contiguous in row-major input
  auto x = input.data();
  auto w = kernels.data();
  std::vector<double> out(out_len * filters);
  for (std::size_t t = 0; t < out_len; ++t) {
    const double* window = x.data() + t * ch;
    for (std::size_t f = 0; f < filters; ++f) {
      const double* kf = w.data() + f * span;
      double acc = has_bias ? bias.data()[f] : 0.0;
      for (std::size_t i = 0; i < span; ++i) acc += window[i] * kf[i];
      out[t * filters + f] = acc;
    }
  }
  std::vector<Tensor> inputs{input, kernels};
  if (has_bias) inputs.push_back(bias);
  return record("conv1d", Shape{out_len, filters}, std::move(out), inputs,
                [out_len, filters, span, ch, has_bias](const detail::AdjointContext& ctx) {
                  auto x = ctx.input_value(0);
                  auto w = ctx.input_value(1);
                  const bool gx_on = ctx.wants(0), gw_on = ctx.wants(1);
                  std::span<double> gx, gw;
                  if (gx_on) gx = ctx.input_grad(0);
                  if (gw_on) gw = ctx.input_grad(1);
                  for (std::size_t t = 0; t < out_len; ++t) {
                    for (std::size_t f = 0; f < filters; ++f) {
                      const double g = ctx.grad[t * filters + f];
                      if (g == 0.0) continue;
                      if (gx_on)
                        for (std::size_t i = 0; i < span; ++i) gx[t * ch + i] += g * w[f * span + i];
                      if (gw_on)
                        for (std::size_t i = 0; i < span; ++i) gw[f * span + i] += g * x[t * ch + i];
                    }
                  }
                  if (has_bias && ctx.wants(2)) {
                    auto gb = ctx.input_grad(2);
                    for (std::size_t t = 0; t < out_len; ++t)
                      for (std::size_t f = 0; f < filters; ++f) gb[f] += ctx.grad[t * filters + f];
                  }
                });
}

Tensor maxpool1d(const Tensor& x, std::size_t valid_rows) {
  if (x.rank() != 2) shape_fail("maxpool1d", "input must be 2-D, got " + shape_str(x.shape()));
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (valid_rows == 0) valid_rows = rows;
  if (valid_rows > rows) {
    shape_fail("maxpool1d", std::to_string(valid_rows) + " valid rows exceed input " + shape_str(x.shape()));
  }
  auto v = x.data();
  std::vector<double> out(cols);
  std::vector<std::size_t> arg(cols, 0);
  for (std::size_t c = 0; c < cols; ++c) {
    double best = v[c];
    for (std::size_t r = 1; r < valid_rows; ++r) {
      if (v[r * cols + c] > best) {
        best = v[r * cols + c];
        arg[c] = r;
      }
    }
    out[c] = best;
  }
  return record("maxpool1d", Shape{cols}, std::move(out), {x}, [arg, cols](const detail::AdjointContext& ctx) {
    if (!ctx.wants(0)) return;
    auto g = ctx.input_grad(0);
    for (std::size_t c = 0; c < cols; ++c) g[arg[c] * cols + c] += ctx.grad[c];
  });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  return record("sum", Shape{}, {total}, {x}, [](const detail::AdjointContext& ctx) {
    if (!ctx.wants(0)) return;
    auto g = ctx.input_grad(0);
    for (auto& gi : g) gi += ctx.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  const double n = static_cast<double>(x.size());
  double total = 0.0;
  for (double v : x.data()) total += v;
  return record("mean", Shape{}, {total / n}, {x}, [n](const detail::AdjointContext& ctx) {
    if (!ctx.wants(0)) return;
    auto g = ctx.input_grad(0);
    for (auto& gi : g) gi += ctx.grad[0] / n;
  });
}

Tensor mean(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank()) shape_fail("mean", "axis " + std::to_string(axis) + " out of range for " + shape_str(x.shape()));
  const AxisSplit s = split_axis(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  auto v = x.data();
  std::vector<double> out(s.outer * s.inner, 0.0);
  const double n = static_cast<double>(s.extent);
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t j = 0; j < s.extent; ++j)
      for (std::size_t in = 0; in < s.inner; ++in) out[o * s.inner + in] += v[(o * s.extent + j) * s.inner + in];
  for (auto& e : out) e /= n;
  return record("mean_axis", std::move(out_shape), std::move(out), {x}, [s, n](const detail::AdjointContext& ctx) {
    if (!ctx.wants(0)) return;
    auto g = ctx.input_grad(0);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t j = 0; j < s.extent; ++j)
        for (std::size_t in = 0; in < s.inner; ++in)
          g[(o * s.extent + j) * s.inner + in] += ctx.grad[o * s.inner + in] / n;
  });
}

Tensor l2_norm(const Tensor& x) {
  double sq = 0.0;
  for (double v : x.data()) sq += v * v;
  const double norm = std::sqrt(sq);
  return record("l2_norm", Shape{}, {norm}, {x}, [](const detail::AdjointContext& ctx) {
    if (!ctx.wants(0) || ctx.value[0] == 0.0) return;
    auto g = ctx.input_grad(0);
    auto xv = ctx.input_value(0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += ctx.grad[0] * xv[i] / ctx.value[0];
  });
}

Tensor softmax_cross_entropy(const Tensor& logits, std::size_t label) {
  if (logits.rank() != 1 || label >= logits.dim(0)) {
    shape_fail("softmax_cross_entropy", "label " + std::to_string(label) + " invalid for logits " +
                                            shape_str(logits.shape()));
  }
  auto z = logits.data();
  const double mx = *std::max_element(z.begin(), z.end());
  std::vector<double> probs(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    probs[i] = std::exp(z[i] - mx);
    total += probs[i];
  }
  for (auto& p : probs) p /= total;
  const double loss = -(z[label] - mx - std::log(total));
  return record("softmax_cross_entropy", Shape{}, {loss}, {logits},
                [probs = std::move(probs), label](const detail::AdjointContext& ctx) {
                  if (!ctx.wants(0)) return;
                  auto g = ctx.input_grad(0);
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    g[i] += ctx.grad[0] * (probs[i] - (i == label ? 1.0 : 0.0));
                  }
                });
}

Tensor nll(const Tensor& probs, std::size_t label, double eps) {
  if (probs.rank() != 1 || label >= probs.dim(0)) {
    shape_fail("nll", "label " + std::to_string(label) + " invalid for probabilities " + shape_str(probs.shape()));
  }
  const double p = probs.data()[label];
  const bool clamped = p < eps;
  const double loss = -std::log(clamped ? eps : p);
  return record("nll", Shape{}, {loss}, {probs}, [label, p, clamped](const detail::AdjointContext& ctx) {
    if (!ctx.wants(0) || clamped) return;
    ctx.input_grad(0)[label] -= ctx.grad[0] / p;
  });
}

}  // namespace sccl
