#include "dsparse/autodiff.hpp"

#include "dsparse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsparse::ad {

const Tensor& Var::value() const {
    if (tape == nullptr) throw std::logic_error("Var is not bound to a tape");
    return tape->value(*this);
}

const Tensor& Gradients::at(std::size_t id) const {
    if (!contains(id)) throw std::out_of_range("no gradient recorded for node " + std::to_string(id));
    return *grads_[id];
}

Var Tape::leaf(Tensor value, std::string name) {
    Node n;
    n.id = nodes_.size();
    n.op = std::move(name);
    n.value = std::move(value);
    n.is_leaf = true;
    n.requires_grad = true;
    nodes_.push_back(std::move(n));
    return {this, nodes_.size() - 1};
}

Var Tape::constant(Tensor value) {
    Node n;
    n.id = nodes_.size();
    n.op = "constant";
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return {this, nodes_.size() - 1};
}

Var Tape::record(std::string op, std::vector<std::size_t> inputs, Tensor value, BackwardFn backward) {
    Node n;
    n.id = nodes_.size();
    n.op = std::move(op);
    for (auto in : inputs) {
        if (in >= n.id) throw std::logic_error("node input must reference an earlier node");
        n.requires_grad = n.requires_grad || nodes_[in].requires_grad;
    }
    n.inputs = std::move(inputs);
    n.value = std::move(value);
    n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return {this, nodes_.size() - 1};
}

namespace {

void accumulate(std::optional<Tensor>& slot, const Tensor& g) {
    if (!slot) {
        slot = g;
        return;
    }
    std::vector<double> sum(slot->values());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g[i];
    slot = Tensor(slot->shape(), std::move(sum));
}

} // namespace

Gradients Tape::backward(Var root) const {
    if (root.tape != this) throw std::invalid_argument("backward root belongs to a different tape");
    const Tensor& root_value = value(root);
    if (!root_value.is_scalar()) {
        throw ShapeError("backward root must be scalar, got shape " + to_string(root_value.shape()));
    }
    std::vector<std::optional<Tensor>> grads(nodes_.size());
    grads[root.id] = Tensor::filled(root_value.shape(), 1.0);

    for (std::size_t k = root.id + 1; k-- > 0;) {
        const Node& n = nodes_[k];
        if (!grads[k] || !n.requires_grad || n.inputs.empty()) continue;
        auto input_grads = n.backward(*this, *grads[k]);
        for (std::size_t j = 0; j < n.inputs.size(); ++j) {
            const Node& in = nodes_[n.inputs[j]];
            if (!in.requires_grad) continue;
            if (input_grads[j].shape() != in.value.shape()) {
                throw ShapeError("backward of '" + n.op + "' produced gradient of shape " +
                                 to_string(input_grads[j].shape()) + " for input of shape " +
                                 to_string(in.value.shape()));
            }
            accumulate(grads[n.inputs[j]], input_grads[j]);
        }
    }
    for (const Node& n : nodes_) {
        if (n.is_leaf && !grads[n.id]) grads[n.id] = Tensor::zeros(n.value.shape());
    }
    return Gradients(std::move(grads));
}

// ---------------------------------------------------------------------------

ElementwiseFn relu_fn() {
    return {"relu", [](double x) { return x > 0.0 ? x : 0.0; },
            [](double x) { return x > 0.0 ? 1.0 : 0.0; }};
}

ElementwiseFn elu_fn() {
    return {"elu", [](double x) { return x >= 0.0 ? x : std::expm1(x); },
            [](double x) { return x >= 0.0 ? 1.0 : std::exp(x); }};
}

namespace {

Tape* same_tape(Var a, Var b) {
    if (a.tape == nullptr || a.tape != b.tape) throw std::invalid_argument("operands live on different tapes");
    return a.tape;
}

Tensor make_result(std::string_view op, Shape shape, std::vector<double> data) {
    for (double v : data) {
        if (!std::isfinite(v)) throw NonFiniteError(std::string(op) + " produced a non-finite value");
    }
    return Tensor(std::move(shape), std::move(data));
}

template <class F, class DF>
Var unary(std::string op, Var x, F f, DF df) {
    const Tensor& xv = x.value();
    std::vector<double> out(xv.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(xv[i]);
    Tensor y = make_result(op, xv.shape(), std::move(out));
    return x.tape->record(std::move(op), {x.id}, std::move(y),
                          [xid = x.id, yid = x.tape->size(), df](const Tape& t, const Tensor& up) {
                              const Tensor& xv = t.node(xid).value;
                              const Tensor& yv = t.node(yid).value;
                              std::vector<double> g(up.numel());
                              for (std::size_t i = 0; i < g.size(); ++i) g[i] = up[i] * df(xv[i], yv[i]);
                              return std::vector<Tensor>{Tensor(xv.shape(), std::move(g))};
                          });
}

// dfa/dfb return the partial derivative w.r.t. a/b at (a, b).
template <class F, class DFA, class DFB>
Var binary(std::string op, Var a, Var b, F f, DFA dfa, DFB dfb) {
    Tape* tape = same_tape(a, b);
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    Shape shape;
    if (av.shape() == bv.shape()) {
        shape = av.shape();
    } else if (bv.is_scalar()) {
        shape = av.shape();
    } else if (av.is_scalar()) {
        shape = bv.shape();
    } else {
        throw ShapeError(op + ": shape mismatch " + to_string(av.shape()) + " vs " + to_string(bv.shape()));
    }
    const std::size_t n = shape_numel(shape);
    const bool a_bcast = av.numel() != n;
    const bool b_bcast = bv.numel() != n;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f(av[a_bcast ? 0 : i], bv[b_bcast ? 0 : i]);
    Tensor y = make_result(op, shape, std::move(out));
    return tape->record(std::move(op), {a.id, b.id}, std::move(y),
                        [aid = a.id, bid = b.id, a_bcast, b_bcast, dfa, dfb](const Tape& t, const Tensor& up) {
                            const Tensor& av = t.node(aid).value;
                            const Tensor& bv = t.node(bid).value;
                            std::vector<double> ga(av.numel(), 0.0);
                            std::vector<double> gb(bv.numel(), 0.0);
                            for (std::size_t i = 0; i < up.numel(); ++i) {
                                const double x = av[a_bcast ? 0 : i];
                                const double z = bv[b_bcast ? 0 : i];
                                ga[a_bcast ? 0 : i] += up[i] * dfa(x, z);
                                gb[b_bcast ? 0 : i] += up[i] * dfb(x, z);
                            }
                            return std::vector<Tensor>{Tensor(av.shape(), std::move(ga)),
                                                       Tensor(bv.shape(), std::move(gb))};
                        });
}

double sigmoid_value(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void require_matrix(std::string_view op, const Tensor& t) {
    if (t.rank() != 2) throw ShapeError(std::string(op) + " requires a matrix, got " + to_string(t.shape()));
}

} // namespace

Var add(Var a, Var b) {
    return binary("add", a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
                  [](double, double) { return 1.0; });
}

Var sub(Var a, Var b) {
    return binary("sub", a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
                  [](double, double) { return -1.0; });
}

Var mul(Var a, Var b) {
    return binary("mul", a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
                  [](double x, double) { return x; });
}

Var div(Var a, Var b) {
    return binary("div", a, b, [](double x, double y) { return x / y; },
                  [](double, double y) { return 1.0 / y; }, [](double x, double y) { return -x / (y * y); });
}

Var neg(Var x) {
    return unary("neg", x, [](double v) { return -v; }, [](double, double) { return -1.0; });
}

Var abs(Var x) {
    return unary("abs", x, [](double v) { return std::fabs(v); },
                 [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Var sign(Var x) {
    return unary("sign", x, [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); },
                 [](double, double) { return 0.0; });
}

Var exp(Var x) {
    return unary("exp", x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Var log(Var x) {
    return unary("log", x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Var sigmoid(Var x) {
    return unary("sigmoid", x, sigmoid_value, [](double, double y) { return y * (1.0 - y); });
}

Var relu(Var x) {
    return unary("relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
                 [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var elu(Var x) {
    return unary("elu", x, [](double v) { return v >= 0.0 ? v : std::expm1(v); },
                 [](double v, double) { return v >= 0.0 ? 1.0 : std::exp(v); });
}

Var tanh(Var x) {
    return unary("tanh", x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Var square(Var x) {
    return unary("square", x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Var sqrt(Var x) {
    return unary("sqrt", x, [](double v) { return std::sqrt(v); }, [](double, double y) { return 0.5 / y; });
}

Var pow(Var x, double exponent) {
    return unary("pow", x, [exponent](double v) { return std::pow(v, exponent); },
                 [exponent](double v, double) { return exponent * std::pow(v, exponent - 1.0); });
}

Var canonical_zero(Var x) {
    return unary("canonical_zero", x, [](double v) { return v == 0.0 ? 0.0 : v; },
                 [](double, double) { return 1.0; });
}

Var custom_grad(Var x, const ElementwiseFn& forward, const ElementwiseFn& backward) {
    return unary("custom_grad(" + forward.name + "/" + backward.name + ")", x, forward.value,
                 [d = backward.derivative](double v, double) { return d(v); });
}

Var sum(Var x) {
    const Tensor& xv = x.value();
    double s = 0.0;
    for (double v : xv.data()) s += v;
    return x.tape->record("sum", {x.id}, make_result("sum", {1}, {s}), [xid = x.id](const Tape& t, const Tensor& up) {
        return std::vector<Tensor>{Tensor::filled(t.node(xid).value.shape(), up[0])};
    });
}

Var mean(Var x) { return sum(x) * (1.0 / static_cast<double>(x.value().numel())); }

Var sum_squares(Var x) {
    const Tensor& xv = x.value();
    double s = 0.0;
    for (double v : xv.data()) s += v * v;
    return x.tape->record("sum_squares", {x.id}, make_result("sum_squares", {1}, {s}),
                          [xid = x.id](const Tape& t, const Tensor& up) {
                              const Tensor& xv = t.node(xid).value;
                              std::vector<double> g(xv.numel());
                              for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * xv[i] * up[0];
                              return std::vector<Tensor>{Tensor(xv.shape(), std::move(g))};
                          });
}

Var norm2(Var x) {
    const Tensor& xv = x.value();
    double s = 0.0;
    for (double v : xv.data()) s += v * v;
    return x.tape->record("norm2", {x.id}, make_result("norm2", {1}, {std::sqrt(s)}),
                          [xid = x.id, yid = x.tape->size()](const Tape& t, const Tensor& up) {
                              const Tensor& xv = t.node(xid).value;
                              const double norm = t.node(yid).value[0];
                              std::vector<double> g(xv.numel(), 0.0);
                              if (norm > 0.0) {
                                  for (std::size_t i = 0; i < g.size(); ++i) g[i] = up[0] * xv[i] / norm;
                              }
                              return std::vector<Tensor>{Tensor(xv.shape(), std::move(g))};
                          });
}

namespace {

// c = a * b for row-major matrices, with optional transposition of either side.
std::vector<double> gemm(const Tensor& a, bool ta, const Tensor& b, bool tb, std::size_t& rows, std::size_t& cols) {
    const std::size_t ar = ta ? a.cols() : a.rows();
    const std::size_t ac = ta ? a.rows() : a.cols();
    const std::size_t br = tb ? b.cols() : b.rows();
    const std::size_t bc = tb ? b.rows() : b.cols();
    if (ac != br) {
        throw ShapeError("matmul: inner dimensions differ for " + to_string(a.shape()) + " and " +
                         to_string(b.shape()));
    }
    rows = ar;
    cols = bc;
    std::vector<double> c(ar * bc, 0.0);
    const auto A = a.data();
    const auto B = b.data();
    for (std::size_t i = 0; i < ar; ++i) {
        for (std::size_t k = 0; k < ac; ++k) {
            const double aik = ta ? A[k * a.cols() + i] : A[i * a.cols() + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < bc; ++j) {
                const double bkj = tb ? B[j * b.cols() + k] : B[k * b.cols() + j];
                c[i * bc + j] += aik * bkj;
            }
        }
    }
    return c;
}

} // namespace

Var matmul(Var a, Var b) {
    Tape* tape = same_tape(a, b);
    require_matrix("matmul", a.value());
    require_matrix("matmul", b.value());
    std::size_t r = 0, c = 0;
    auto out = gemm(a.value(), false, b.value(), false, r, c);
    return tape->record("matmul", {a.id, b.id}, make_result("matmul", {r, c}, std::move(out)),
                        [aid = a.id, bid = b.id](const Tape& t, const Tensor& up) {
                            const Tensor& av = t.node(aid).value;
                            const Tensor& bv = t.node(bid).value;
                            std::size_t r1 = 0, c1 = 0, r2 = 0, c2 = 0;
                            auto ga = gemm(up, false, bv, true, r1, c1);
                            auto gb = gemm(av, true, up, false, r2, c2);
                            return std::vector<Tensor>{Tensor({r1, c1}, std::move(ga)), Tensor({r2, c2}, std::move(gb))};
                        });
}

namespace {

std::vector<double> transposed(const Tensor& m) {
    const std::size_t r = m.rows(), c = m.cols();
    std::vector<double> out(r * c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out[j * r + i] = m[i * c + j];
    return out;
}

} // namespace

Var transpose(Var m) {
    require_matrix("transpose", m.value());
    const std::size_t r = m.value().rows(), c = m.value().cols();
    return m.tape->record("transpose", {m.id}, Tensor({c, r}, transposed(m.value())),
                          [r, c](const Tape&, const Tensor& up) {
                              return std::vector<Tensor>{Tensor({r, c}, transposed(up))};
                          });
}

Var reshape(Var x, Shape shape) {
    if (shape_numel(shape) != x.value().numel()) {
        throw ShapeError("reshape: cannot view " + to_string(x.shape()) + " as " + to_string(shape));
    }
    Shape original = x.shape();
    return x.tape->record("reshape", {x.id}, x.value().reshaped(std::move(shape)),
                          [original](const Tape&, const Tensor& up) {
                              return std::vector<Tensor>{up.reshaped(original)};
                          });
}

Var stack_rows(std::span<const Var> rows) {
    if (rows.empty()) throw ShapeError("stack_rows: no rows given");
    Tape* tape = rows.front().tape;
    const std::size_t width = rows.front().value().numel();
    std::vector<std::size_t> ids;
    std::vector<Shape> shapes;
    std::vector<double> out;
    out.reserve(rows.size() * width);
    for (Var v : rows) {
        same_tape(rows.front(), v);
        if (v.value().numel() != width) {
            throw ShapeError("stack_rows: row shapes differ, " + to_string(rows.front().shape()) + " vs " +
                             to_string(v.shape()));
        }
        ids.push_back(v.id);
        shapes.push_back(v.shape());
        out.insert(out.end(), v.value().data().begin(), v.value().data().end());
    }
    const Shape shape{rows.size(), width};
    return tape->record("stack_rows", std::move(ids), Tensor(shape, std::move(out)),
                        [shapes, width](const Tape&, const Tensor& up) {
                            std::vector<Tensor> grads;
                            for (std::size_t i = 0; i < shapes.size(); ++i) {
                                auto first = up.data().begin() + static_cast<std::ptrdiff_t>(i * width);
                                grads.emplace_back(shapes[i], std::vector<double>(first, first + static_cast<std::ptrdiff_t>(width)));
                            }
                            return grads;
                        });
}

Var concat(std::span<const Var> parts) {
    if (parts.empty()) throw ShapeError("concat: no parts given");
    Tape* tape = parts.front().tape;
    std::vector<std::size_t> ids;
    std::vector<Shape> shapes;
    std::vector<double> out;
    for (Var v : parts) {
        same_tape(parts.front(), v);
        ids.push_back(v.id);
        shapes.push_back(v.shape());
        out.insert(out.end(), v.value().data().begin(), v.value().data().end());
    }
    const Shape shape{out.size()};
    return tape->record("concat", std::move(ids), Tensor(shape, std::move(out)),
                        [shapes](const Tape&, const Tensor& up) {
                            std::vector<Tensor> grads;
                            std::size_t offset = 0;
                            for (const auto& s : shapes) {
                                const std::size_t n = shape_numel(s);
                                auto first = up.data().begin() + static_cast<std::ptrdiff_t>(offset);
                                grads.emplace_back(s, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n)));
                                offset += n;
                            }
                            return grads;
                        });
}

Var hcat(Var a, Var b) {
    Tape* tape = same_tape(a, b);
    require_matrix("hcat", a.value());
    require_matrix("hcat", b.value());
    const std::size_t r = a.value().rows(), ca = a.value().cols(), cb = b.value().cols();
    if (b.value().rows() != r) {
        throw ShapeError("hcat: row counts differ, " + to_string(a.shape()) + " vs " + to_string(b.shape()));
    }
    std::vector<double> out;
    out.reserve(r * (ca + cb));
    for (std::size_t i = 0; i < r; ++i) {
        auto ra = a.value().data().subspan(i * ca, ca);
        auto rb = b.value().data().subspan(i * cb, cb);
        out.insert(out.end(), ra.begin(), ra.end());
        out.insert(out.end(), rb.begin(), rb.end());
    }
    return tape->record("hcat", {a.id, b.id}, Tensor({r, ca + cb}, std::move(out)),
                        [r, ca, cb](const Tape&, const Tensor& up) {
                            std::vector<double> ga, gb;
                            ga.reserve(r * ca);
                            gb.reserve(r * cb);
                            for (std::size_t i = 0; i < r; ++i) {
                                auto row = up.data().subspan(i * (ca + cb), ca + cb);
                                ga.insert(ga.end(), row.begin(), row.begin() + static_cast<std::ptrdiff_t>(ca));
                                gb.insert(gb.end(), row.begin() + static_cast<std::ptrdiff_t>(ca), row.end());
                            }
                            return std::vector<Tensor>{Tensor({r, ca}, std::move(ga)), Tensor({r, cb}, std::move(gb))};
                        });
}

Var append_ones_col(Var m) {
    require_matrix("append_ones_col", m.value());
    const std::size_t r = m.value().rows(), c = m.value().cols();
    std::vector<double> out;
    out.reserve(r * (c + 1));
    for (std::size_t i = 0; i < r; ++i) {
        auto row = m.value().data().subspan(i * c, c);
        out.insert(out.end(), row.begin(), row.end());
        out.push_back(1.0);
    }
    return m.tape->record("append_ones_col", {m.id}, Tensor({r, c + 1}, std::move(out)),
                          [r, c](const Tape&, const Tensor& up) {
                              std::vector<double> g;
                              g.reserve(r * c);
                              for (std::size_t i = 0; i < r; ++i) {
                                  auto row = up.data().subspan(i * (c + 1), c);
                                  g.insert(g.end(), row.begin(), row.end());
                              }
                              return std::vector<Tensor>{Tensor({r, c}, std::move(g))};
                          });
}

Var scale_cols(Var m, Var v) {
    Tape* tape = same_tape(m, v);
    require_matrix("scale_cols", m.value());
    const std::size_t r = m.value().rows(), c = m.value().cols();
    if (v.value().numel() != c) {
        throw ShapeError("scale_cols: " + to_string(m.shape()) + " cannot be scaled by " + to_string(v.shape()));
    }
    std::vector<double> out(r * c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out[i * c + j] = m.value()[i * c + j] * v.value()[j];
    return tape->record("scale_cols", {m.id, v.id}, make_result("scale_cols", {r, c}, std::move(out)),
                        [mid = m.id, vid = v.id, r, c](const Tape& t, const Tensor& up) {
                            const Tensor& mv = t.node(mid).value;
                            const Tensor& vv = t.node(vid).value;
                            std::vector<double> gm(r * c), gv(c, 0.0);
                            for (std::size_t i = 0; i < r; ++i) {
                                for (std::size_t j = 0; j < c; ++j) {
                                    gm[i * c + j] = up[i * c + j] * vv[j];
                                    gv[j] += up[i * c + j] * mv[i * c + j];
                                }
                            }
                            return std::vector<Tensor>{Tensor({r, c}, std::move(gm)), Tensor(vv.shape(), std::move(gv))};
                        });
}

Var mse(Var prediction, const Tensor& target) {
    if (prediction.value().numel() != target.numel()) {
        throw ShapeError("mse: prediction " + to_string(prediction.shape()) + " vs target " + to_string(target.shape()));
    }
    Var t = prediction.tape->constant(target.reshaped(prediction.shape()));
    return mean(square(prediction - t));
}

Var softmax_cross_entropy(Var logits, std::span<const std::size_t> labels) {
    const Tensor& z = logits.value();
    require_matrix("softmax_cross_entropy", z);
    const std::size_t r = z.rows(), c = z.cols();
    if (labels.size() != r) {
        throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for logits " +
                         to_string(z.shape()));
    }
    std::vector<double> probs(r * c);
    double total = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        if (labels[i] >= c) throw std::out_of_range("softmax_cross_entropy: label out of range");
        double mx = z[i * c];
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, z[i * c + j]);
        double s = 0.0;
        for (std::size_t j = 0; j < c; ++j) s += std::exp(z[i * c + j] - mx);
        for (std::size_t j = 0; j < c; ++j) probs[i * c + j] = std::exp(z[i * c + j] - mx) / s;
        total += -(z[i * c + labels[i]] - mx - std::log(s));
    }
    std::vector<std::size_t> lab(labels.begin(), labels.end());
    return logits.tape->record(
        "softmax_cross_entropy", {logits.id}, make_result("softmax_cross_entropy", {1}, {total / static_cast<double>(r)}),
        [probs = std::move(probs), lab = std::move(lab), r, c](const Tape&, const Tensor& up) {
            std::vector<double> g(probs);
            for (std::size_t i = 0; i < r; ++i) g[i * c + lab[i]] -= 1.0;
            const double scale = up[0] / static_cast<double>(r);
            for (double& v : g) v *= scale;
            return std::vector<Tensor>{Tensor({r, c}, std::move(g))};
        });
}

Var operator+(Var a, Var b) { return add(a, b); }
Var operator-(Var a, Var b) { return sub(a, b); }
Var operator*(Var a, Var b) { return mul(a, b); }
Var operator/(Var a, Var b) { return div(a, b); }
Var operator-(Var x) { return neg(x); }
Var operator+(Var a, double b) { return add(a, a.tape->constant(b)); }
Var operator-(Var a, double b) { return sub(a, a.tape->constant(b)); }
Var operator*(Var a, double b) { return mul(a, a.tape->constant(b)); }
Var operator/(Var a, double b) { return div(a, a.tape->constant(b)); }
Var operator+(double a, Var b) { return add(b.tape->constant(a), b); }
Var operator-(double a, Var b) { return sub(b.tape->constant(a), b); }
Var operator*(double a, Var b) { return mul(b.tape->constant(a), b); }

} // namespace dsparse::ad
