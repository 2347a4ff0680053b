#include "nnkit/graph.hpp"

#include <cmath>

#include <Eigen/Core>

namespace seam::nn {

namespace {

template <typename T>
void axpy(TensorT<T>& dst, const TensorT<T>& src) {
  for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

int clip_rel(int delta, int d) { return delta < -d ? -d : (delta > d ? d : delta); }

// Contiguous row-major views for the matmul kernels; Eigen does the GEMM.
template <typename T>
using MatMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename T>
using ConstMatMap =
    Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

template <typename T>
void gemm_forward(const T* a, const T* b, T* c, int n, int k, int m) {
  MatMap<T>(c, n, m).noalias() = ConstMatMap<T>(a, n, k) * ConstMatMap<T>(b, k, m);
}

template <typename T>
void gemm_grad_a(T* da, const T* dc, const T* b, int n, int k, int m) {
  MatMap<T>(da, n, k).noalias() += ConstMatMap<T>(dc, n, m) * ConstMatMap<T>(b, k, m).transpose();
}

template <typename T>
void gemm_grad_b(T* db, const T* a, const T* dc, int n, int k, int m) {
  MatMap<T>(db, k, m).noalias() += ConstMatMap<T>(a, n, k).transpose() * ConstMatMap<T>(dc, n, m);
}

}  // namespace

template <typename T>
typename GraphT<T>::Var GraphT<T>::make(TensorT<T> value, bool needs,
                                        std::function<void(GraphT&)> back, std::string op) {
  check_finite(value, op);
  Node n;
  n.value = std::move(value);
  n.needs = track_ && needs;
  if (n.needs) n.back = std::move(back);
  n.op = std::move(op);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

template <typename T>
typename GraphT<T>::Node& GraphT<T>::node(Var v) {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
    raise(ErrorKind::Numeric, "invalid graph variable");
  }
  return nodes_[static_cast<std::size_t>(v.id)];
}

template <typename T>
const typename GraphT<T>::Node& GraphT<T>::node(Var v) const {
  return const_cast<GraphT*>(this)->node(v);
}

template <typename T>
const TensorT<T>& GraphT<T>::value(Var v) const {
  return node(v).value;
}

template <typename T>
const TensorT<T>& GraphT<T>::grad(Var v) const {
  const Node& n = node(v);
  if (n.grad.data.empty()) raise(ErrorKind::Numeric, "no gradient recorded for " + n.op);
  return n.grad;
}

template <typename T>
void GraphT<T>::backward(Var loss) {
  if (!track_) raise(ErrorKind::Numeric, "backward on a forward-only graph");
  if (swept_) raise(ErrorKind::Numeric, "backward called twice on one graph");
  swept_ = true;
  Node& top = node(loss);
  if (top.value.numel() != 1) {
    raise(ErrorKind::Numeric, "backward needs a scalar loss, got " + shape_text(top.value.shape));
  }
  for (int id = 0; id <= loss.id; ++id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.needs) n.grad = TensorT<T>(n.value.shape);
  }
  if (!top.needs) return;
  top.grad.data[0] = T(1);
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.needs && n.back) n.back(*this);
  }
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::input(TensorT<T> v, bool needs_grad) {
  return make(std::move(v), needs_grad, {}, "input");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::param(ParameterStoreT<T>& store, const std::string& name) {
  TensorT<T> v = store.value(name);
  const int out = static_cast<int>(nodes_.size());
  ParameterStoreT<T>* sp = &store;
  auto back = [sp, name, out](GraphT& g) {
    axpy(sp->grad(name), g.nodes_[static_cast<std::size_t>(out)].grad);
  };
  return make(std::move(v), true, back, "param:" + name);
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::matmul(Var a, Var b) {
  const TensorT<T>& A = value(a);
  const TensorT<T>& B = value(b);
  if (A.rank() != 2 || B.rank() != 2 || A.shape[1] != B.shape[0]) {
    raise(ErrorKind::Numeric,
          "matmul shape mismatch " + shape_text(A.shape) + " x " + shape_text(B.shape));
  }
  const int n = A.shape[0], k = A.shape[1], m = B.shape[1];
  TensorT<T> C({n, m});
  gemm_forward(A.data.data(), B.data.data(), C.data.data(), n, k, m);
  const int out = static_cast<int>(nodes_.size());
  auto back = [a, b, out, n, k, m](GraphT& g) {
    const T* dc = g.nodes_[static_cast<std::size_t>(out)].grad.data.data();
    const T* ap = g.nodes_[static_cast<std::size_t>(a.id)].value.data.data();
    const T* bp = g.nodes_[static_cast<std::size_t>(b.id)].value.data.data();
    if (g.nodes_[static_cast<std::size_t>(a.id)].needs) {
      gemm_grad_a(g.nodes_[static_cast<std::size_t>(a.id)].grad.data.data(), dc, bp, n, k, m);
    }
    if (g.nodes_[static_cast<std::size_t>(b.id)].needs) {
      gemm_grad_b(g.nodes_[static_cast<std::size_t>(b.id)].grad.data.data(), ap, dc, n, k, m);
    }
  };
  return make(std::move(C), wants(a) || wants(b), back, "matmul");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::bmm(Var a, Var b) {
  const TensorT<T>& A = value(a);
  const TensorT<T>& B = value(b);
  if (A.rank() != 3 || B.rank() != 3 || A.shape[0] != B.shape[0] || A.shape[2] != B.shape[1]) {
    raise(ErrorKind::Numeric,
          "bmm shape mismatch " + shape_text(A.shape) + " x " + shape_text(B.shape));
  }
  const int bs = A.shape[0], n = A.shape[1], k = A.shape[2], m = B.shape[2];
  TensorT<T> C({bs, n, m});
  for (int ib = 0; ib < bs; ++ib) {
    gemm_forward(A.data.data() + static_cast<std::size_t>(ib) * n * k,
                 B.data.data() + static_cast<std::size_t>(ib) * k * m,
                 C.data.data() + static_cast<std::size_t>(ib) * n * m, n, k, m);
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [a, b, out, bs, n, k, m](GraphT& g) {
    const bool na = g.nodes_[static_cast<std::size_t>(a.id)].needs;
    const bool nb = g.nodes_[static_cast<std::size_t>(b.id)].needs;
    for (int ib = 0; ib < bs; ++ib) {
      const T* dc = g.nodes_[static_cast<std::size_t>(out)].grad.data.data() +
                    static_cast<std::size_t>(ib) * n * m;
      const T* ap = g.nodes_[static_cast<std::size_t>(a.id)].value.data.data() +
                    static_cast<std::size_t>(ib) * n * k;
      const T* bp = g.nodes_[static_cast<std::size_t>(b.id)].value.data.data() +
                    static_cast<std::size_t>(ib) * k * m;
      if (na) {
        gemm_grad_a(g.nodes_[static_cast<std::size_t>(a.id)].grad.data.data() +
                        static_cast<std::size_t>(ib) * n * k,
                    dc, bp, n, k, m);
      }
      if (nb) {
        gemm_grad_b(g.nodes_[static_cast<std::size_t>(b.id)].grad.data.data() +
                        static_cast<std::size_t>(ib) * k * m,
                    ap, dc, n, k, m);
      }
    }
  };
  return make(std::move(C), wants(a) || wants(b), back, "bmm");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::transpose(Var x) {
  const TensorT<T>& X = value(x);
  if (X.rank() != 2 && X.rank() != 3) {
    raise(ErrorKind::Numeric, "transpose expects rank 2 or 3, got " + shape_text(X.shape));
  }
  const int bs = X.rank() == 3 ? X.shape[0] : 1;
  const int n = X.shape[X.rank() - 2], m = X.shape[X.rank() - 1];
  TensorT<T> Y(X.rank() == 3 ? std::vector<int>{bs, m, n} : std::vector<int>{m, n});
  for (int ib = 0; ib < bs; ++ib) {
    const T* xp = X.data.data() + static_cast<std::size_t>(ib) * n * m;
    T* yp = Y.data.data() + static_cast<std::size_t>(ib) * n * m;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        yp[static_cast<std::size_t>(j) * n + i] = xp[static_cast<std::size_t>(i) * m + j];
      }
    }
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, out, bs, n, m](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(x.id)].needs) return;
    for (int ib = 0; ib < bs; ++ib) {
      const T* dy = g.nodes_[static_cast<std::size_t>(out)].grad.data.data() +
                    static_cast<std::size_t>(ib) * n * m;
      T* dx = g.nodes_[static_cast<std::size_t>(x.id)].grad.data.data() +
              static_cast<std::size_t>(ib) * n * m;
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) {
          dx[static_cast<std::size_t>(i) * m + j] += dy[static_cast<std::size_t>(j) * n + i];
        }
      }
    }
  };
  return make(std::move(Y), wants(x), back, "transpose");
}

namespace {

// add/mul support two layouts: identical shapes, or a rank-1 right operand
// broadcast across the rows of the left one (its length matching the last
// axis). Returns the broadcast row count, or -1 for the same-shape case.
template <typename T>
int broadcast_rows(const TensorT<T>& a, const TensorT<T>& b, const char* op) {
  if (a.same_shape(b)) return -1;
  if (b.rank() == 1 && a.rank() >= 1 && a.shape.back() == b.shape[0]) {
    return static_cast<int>(a.numel() / b.shape[0]);
  }
  raise(ErrorKind::Numeric, std::string(op) + " shape mismatch " + shape_text(a.shape) + " vs " +
                                shape_text(b.shape));
}

}  // namespace

template <typename T>
typename GraphT<T>::Var GraphT<T>::add(Var a, Var b) {
  const TensorT<T>& A = value(a);
  const TensorT<T>& B = value(b);
  const int rows = broadcast_rows(A, B, "add");
  TensorT<T> Y = A;
  if (rows < 0) {
    axpy(Y, B);
  } else {
    const int d = B.shape[0];
    for (int r = 0; r < rows; ++r) {
      T* yrow = Y.data.data() + static_cast<std::size_t>(r) * d;
      for (int j = 0; j < d; ++j) yrow[j] += B.data[static_cast<std::size_t>(j)];
    }
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [a, b, out, rows](GraphT& g) {
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    if (g.nodes_[static_cast<std::size_t>(a.id)].needs) {
      axpy(g.nodes_[static_cast<std::size_t>(a.id)].grad, dy);
    }
    if (g.nodes_[static_cast<std::size_t>(b.id)].needs) {
      TensorT<T>& db = g.nodes_[static_cast<std::size_t>(b.id)].grad;
      if (rows < 0) {
        axpy(db, dy);
      } else {
        const int d = db.shape[0];
        for (int r = 0; r < rows; ++r) {
          const T* dyrow = dy.data.data() + static_cast<std::size_t>(r) * d;
          for (int j = 0; j < d; ++j) db.data[static_cast<std::size_t>(j)] += dyrow[j];
        }
      }
    }
  };
  return make(std::move(Y), wants(a) || wants(b), back, "add");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::mul(Var a, Var b) {
  const TensorT<T>& A = value(a);
  const TensorT<T>& B = value(b);
  const int rows = broadcast_rows(A, B, "mul");
  TensorT<T> Y = A;
  if (rows < 0) {
    for (std::size_t i = 0; i < Y.data.size(); ++i) Y.data[i] *= B.data[i];
  } else {
    const int d = B.shape[0];
    for (int r = 0; r < rows; ++r) {
      T* yrow = Y.data.data() + static_cast<std::size_t>(r) * d;
      for (int j = 0; j < d; ++j) yrow[j] *= B.data[static_cast<std::size_t>(j)];
    }
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [a, b, out, rows](GraphT& g) {
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    const TensorT<T>& av = g.nodes_[static_cast<std::size_t>(a.id)].value;
    const TensorT<T>& bv = g.nodes_[static_cast<std::size_t>(b.id)].value;
    const bool na = g.nodes_[static_cast<std::size_t>(a.id)].needs;
    const bool nb = g.nodes_[static_cast<std::size_t>(b.id)].needs;
    if (rows < 0) {
      for (std::size_t i = 0; i < dy.data.size(); ++i) {
        if (na) g.nodes_[static_cast<std::size_t>(a.id)].grad.data[i] += dy.data[i] * bv.data[i];
        if (nb) g.nodes_[static_cast<std::size_t>(b.id)].grad.data[i] += dy.data[i] * av.data[i];
      }
    } else {
      const int d = bv.shape[0];
      const int nrows = rows;
      for (int r = 0; r < nrows; ++r) {
        const std::size_t off = static_cast<std::size_t>(r) * d;
        for (int j = 0; j < d; ++j) {
          if (na) {
            g.nodes_[static_cast<std::size_t>(a.id)].grad.data[off + j] +=
                dy.data[off + j] * bv.data[static_cast<std::size_t>(j)];
          }
          if (nb) {
            g.nodes_[static_cast<std::size_t>(b.id)].grad.data[static_cast<std::size_t>(j)] +=
                dy.data[off + j] * av.data[off + j];
          }
        }
      }
    }
  };
  return make(std::move(Y), wants(a) || wants(b), back, "mul");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::mul_batch(Var x, Var m) {
  const TensorT<T>& X = value(x);
  const TensorT<T>& M = value(m);
  if (X.rank() != 3 || M.rank() != 2 || X.shape[1] != M.shape[0] || X.shape[2] != M.shape[1]) {
    raise(ErrorKind::Numeric,
          "mul_batch shape mismatch " + shape_text(X.shape) + " vs " + shape_text(M.shape));
  }
  const int bs = X.shape[0];
  const std::size_t plane = M.data.size();
  TensorT<T> Y = X;
  for (int ib = 0; ib < bs; ++ib) {
    T* yp = Y.data.data() + static_cast<std::size_t>(ib) * plane;
    for (std::size_t i = 0; i < plane; ++i) yp[i] *= M.data[i];
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, m, out, bs, plane](GraphT& g) {
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    const TensorT<T>& xv = g.nodes_[static_cast<std::size_t>(x.id)].value;
    const TensorT<T>& mv = g.nodes_[static_cast<std::size_t>(m.id)].value;
    for (int ib = 0; ib < bs; ++ib) {
      const std::size_t off = static_cast<std::size_t>(ib) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        if (g.nodes_[static_cast<std::size_t>(x.id)].needs) {
          g.nodes_[static_cast<std::size_t>(x.id)].grad.data[off + i] +=
              dy.data[off + i] * mv.data[i];
        }
        if (g.nodes_[static_cast<std::size_t>(m.id)].needs) {
          g.nodes_[static_cast<std::size_t>(m.id)].grad.data[i] +=
              dy.data[off + i] * xv.data[off + i];
        }
      }
    }
  };
  return make(std::move(Y), wants(x) || wants(m), back, "mul_batch");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::scale(Var x, double c) {
  TensorT<T> Y = value(x);
  const T cv = static_cast<T>(c);
  for (T& v : Y.data) v *= cv;
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, out, cv](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(x.id)].needs) return;
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    TensorT<T>& dx = g.nodes_[static_cast<std::size_t>(x.id)].grad;
    for (std::size_t i = 0; i < dy.data.size(); ++i) dx.data[i] += cv * dy.data[i];
  };
  return make(std::move(Y), wants(x), back, "scale");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::concat_cols(Var a, Var b) {
  const TensorT<T>& A = value(a);
  const TensorT<T>& B = value(b);
  TensorT<T> Y;
  if (A.rank() == 1 && B.rank() == 1) {
    Y = TensorT<T>({A.shape[0] + B.shape[0]});
    std::copy(A.data.begin(), A.data.end(), Y.data.begin());
    std::copy(B.data.begin(), B.data.end(), Y.data.begin() + A.shape[0]);
  } else if (A.rank() == 2 && B.rank() == 2 && A.shape[0] == B.shape[0]) {
    const int n = A.shape[0], p = A.shape[1], q = B.shape[1];
    Y = TensorT<T>({n, p + q});
    for (int i = 0; i < n; ++i) {
      std::copy(A.data.begin() + static_cast<std::size_t>(i) * p,
                A.data.begin() + static_cast<std::size_t>(i + 1) * p,
                Y.data.begin() + static_cast<std::size_t>(i) * (p + q));
      std::copy(B.data.begin() + static_cast<std::size_t>(i) * q,
                B.data.begin() + static_cast<std::size_t>(i + 1) * q,
                Y.data.begin() + static_cast<std::size_t>(i) * (p + q) + p);
    }
  } else {
    raise(ErrorKind::Numeric,
          "concat_cols shape mismatch " + shape_text(A.shape) + " vs " + shape_text(B.shape));
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [a, b, out](GraphT& g) {
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    TensorT<T>& av = g.nodes_[static_cast<std::size_t>(a.id)].value;
    const bool na = g.nodes_[static_cast<std::size_t>(a.id)].needs;
    const bool nb = g.nodes_[static_cast<std::size_t>(b.id)].needs;
    if (av.rank() == 1) {
      const int p = av.shape[0];
      const int q = static_cast<int>(dy.data.size()) - p;
      for (int j = 0; j < p; ++j) {
        if (na) {
          g.nodes_[static_cast<std::size_t>(a.id)].grad.data[static_cast<std::size_t>(j)] +=
              dy.data[static_cast<std::size_t>(j)];
        }
      }
      for (int j = 0; j < q; ++j) {
        if (nb) {
          g.nodes_[static_cast<std::size_t>(b.id)].grad.data[static_cast<std::size_t>(j)] +=
              dy.data[static_cast<std::size_t>(p + j)];
        }
      }
    } else {
      const int n = av.shape[0], p = av.shape[1];
      const int q = dy.shape[1] - p;
      for (int i = 0; i < n; ++i) {
        const T* dyrow = dy.data.data() + static_cast<std::size_t>(i) * (p + q);
        if (na) {
          T* da = g.nodes_[static_cast<std::size_t>(a.id)].grad.data.data() +
                  static_cast<std::size_t>(i) * p;
          for (int j = 0; j < p; ++j) da[j] += dyrow[j];
        }
        if (nb) {
          T* db = g.nodes_[static_cast<std::size_t>(b.id)].grad.data.data() +
                  static_cast<std::size_t>(i) * q;
          for (int j = 0; j < q; ++j) db[j] += dyrow[p + j];
        }
      }
    }
  };
  return make(std::move(Y), wants(a) || wants(b), back, "concat_cols");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::stack_rows(const std::vector<Var>& rows) {
  if (rows.empty()) raise(ErrorKind::Numeric, "stack_rows needs at least one row");
  const int d = value(rows[0]).rank() == 1 ? value(rows[0]).shape[0] : -1;
  for (Var r : rows) {
    const TensorT<T>& R = value(r);
    if (R.rank() != 1 || R.shape[0] != d) {
      raise(ErrorKind::Numeric, "stack_rows expects rank-1 rows of equal length, got " +
                                    shape_text(R.shape));
    }
  }
  const int k = static_cast<int>(rows.size());
  TensorT<T> Y({k, d});
  for (int i = 0; i < k; ++i) {
    const TensorT<T>& R = value(rows[i]);
    std::copy(R.data.begin(), R.data.end(), Y.data.begin() + static_cast<std::size_t>(i) * d);
  }
  const int out = static_cast<int>(nodes_.size());
  bool any = false;
  for (Var r : rows) any = any || wants(r);
  auto back = [rows, out, d](GraphT& g) {
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto& rn = g.nodes_[static_cast<std::size_t>(rows[i].id)];
      if (!rn.needs) continue;
      const T* src = dy.data.data() + i * static_cast<std::size_t>(d);
      for (int j = 0; j < d; ++j) rn.grad.data[static_cast<std::size_t>(j)] += src[j];
    }
  };
  return make(std::move(Y), any, back, "stack_rows");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::mean_axis(Var x, int axis) {
  const TensorT<T>& X = value(x);
  TensorT<T> Y;
  if (X.rank() == 1 && axis == 0) {
    Y = TensorT<T>({1});
    T s = 0;
    for (T v : X.data) s += v;
    Y.data[0] = s / static_cast<T>(X.shape[0]);
  } else if (X.rank() == 2 && axis == 0) {
    const int n = X.shape[0], m = X.shape[1];
    Y = TensorT<T>({m});
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) Y.data[static_cast<std::size_t>(j)] += X.at(i, j);
    }
    for (T& v : Y.data) v /= static_cast<T>(n);
  } else if (X.rank() == 2 && axis == 1) {
    const int n = X.shape[0], m = X.shape[1];
    Y = TensorT<T>({n});
    for (int i = 0; i < n; ++i) {
      T s = 0;
      for (int j = 0; j < m; ++j) s += X.at(i, j);
      Y.data[static_cast<std::size_t>(i)] = s / static_cast<T>(m);
    }
  } else {
    raise(ErrorKind::Numeric, "mean_axis axis " + std::to_string(axis) + " unsupported for " +
                                  shape_text(X.shape));
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, out, axis](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(x.id)].needs) return;
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    TensorT<T>& dx = g.nodes_[static_cast<std::size_t>(x.id)].grad;
    if (dx.rank() == 1) {
      const T w = dy.data[0] / static_cast<T>(dx.shape[0]);
      for (T& v : dx.data) v += w;
    } else if (axis == 0) {
      const int n = dx.shape[0], m = dx.shape[1];
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          dx.data[static_cast<std::size_t>(i) * m + j] +=
              dy.data[static_cast<std::size_t>(j)] / static_cast<T>(n);
        }
      }
    } else {
      const int n = dx.shape[0], m = dx.shape[1];
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          dx.data[static_cast<std::size_t>(i) * m + j] +=
              dy.data[static_cast<std::size_t>(i)] / static_cast<T>(m);
        }
      }
    }
  };
  return make(std::move(Y), wants(x), back, "mean_axis");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::embedding(Var table, const std::vector<int>& ids) {
  const TensorT<T>& Tb = value(table);
  if (Tb.rank() != 2) raise(ErrorKind::Numeric, "embedding table must be rank 2");
  if (ids.empty()) raise(ErrorKind::Numeric, "embedding of zero indices");
  const int V = Tb.shape[0], d = Tb.shape[1];
  for (int id : ids) {
    if (id < 0 || id >= V) {
      raise(ErrorKind::Numeric, "embedding index " + std::to_string(id) + " out of range [0," +
                                    std::to_string(V) + ")");
    }
  }
  const int n = static_cast<int>(ids.size());
  TensorT<T> Y({n, d});
  for (int r = 0; r < n; ++r) {
    std::copy(Tb.data.begin() + static_cast<std::size_t>(ids[static_cast<std::size_t>(r)]) * d,
              Tb.data.begin() + static_cast<std::size_t>(ids[static_cast<std::size_t>(r)] + 1) * d,
              Y.data.begin() + static_cast<std::size_t>(r) * d);
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [table, out, ids, d](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(table.id)].needs) return;
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    TensorT<T>& dt = g.nodes_[static_cast<std::size_t>(table.id)].grad;
    for (std::size_t r = 0; r < ids.size(); ++r) {
      T* drow = dt.data.data() + static_cast<std::size_t>(ids[r]) * d;
      const T* dyrow = dy.data.data() + r * d;
      for (int j = 0; j < d; ++j) drow[j] += dyrow[j];
    }
  };
  return make(std::move(Y), wants(table), back, "embedding");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::layer_norm(Var x) {
  const TensorT<T>& X = value(x);
  if (X.rank() < 1) raise(ErrorKind::Numeric, "layer_norm needs rank >= 1");
  const int d = X.shape.back();
  const int rows = static_cast<int>(X.numel() / d);
  const double eps = 1e-5;
  TensorT<T> Y(X.shape);
  std::vector<T> inv_s(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    const T* xrow = X.data.data() + static_cast<std::size_t>(r) * d;
    T* yrow = Y.data.data() + static_cast<std::size_t>(r) * d;
    double mu = 0;
    for (int j = 0; j < d; ++j) mu += xrow[j];
    mu /= d;
    double var = 0;
    for (int j = 0; j < d; ++j) var += (xrow[j] - mu) * (xrow[j] - mu);
    var /= d;
    const double s = 1.0 / std::sqrt(var + eps);
    inv_s[static_cast<std::size_t>(r)] = static_cast<T>(s);
    for (int j = 0; j < d; ++j) yrow[j] = static_cast<T>((xrow[j] - mu) * s);
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, out, rows, d, inv_s](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(x.id)].needs) return;
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    const TensorT<T>& y = g.nodes_[static_cast<std::size_t>(out)].value;
    TensorT<T>& dx = g.nodes_[static_cast<std::size_t>(x.id)].grad;
    for (int r = 0; r < rows; ++r) {
      const std::size_t off = static_cast<std::size_t>(r) * d;
      double mean_dy = 0, mean_dyy = 0;
      for (int j = 0; j < d; ++j) {
        mean_dy += dy.data[off + j];
        mean_dyy += static_cast<double>(dy.data[off + j]) * y.data[off + j];
      }
      mean_dy /= d;
      mean_dyy /= d;
      const double s = inv_s[static_cast<std::size_t>(r)];
      for (int j = 0; j < d; ++j) {
        dx.data[off + j] +=
            static_cast<T>(s * (dy.data[off + j] - mean_dy - y.data[off + j] * mean_dyy));
      }
    }
  };
  return make(std::move(Y), wants(x), back, "layer_norm");
}

namespace {

// Shared softmax backward: dx = y * (dy - sum(dy*y)) per row.
template <typename T>
void softmax_backward_rows(const TensorT<T>& y, const TensorT<T>& dy, TensorT<T>& dx, int d) {
  const int rows = static_cast<int>(y.numel() / d);
  for (int r = 0; r < rows; ++r) {
    const std::size_t off = static_cast<std::size_t>(r) * d;
    double dot = 0;
    for (int j = 0; j < d; ++j) dot += static_cast<double>(dy.data[off + j]) * y.data[off + j];
    for (int j = 0; j < d; ++j) {
      dx.data[off + j] += static_cast<T>(y.data[off + j] * (dy.data[off + j] - dot));
    }
  }
}

}  // namespace

template <typename T>
typename GraphT<T>::Var GraphT<T>::softmax(Var x) {
  const TensorT<T>& X = value(x);
  if (X.rank() < 1 || X.rank() > 3) raise(ErrorKind::Numeric, "softmax needs rank 1..3");
  const int d = X.shape.back();
  const int rows = static_cast<int>(X.numel() / d);
  TensorT<T> Y(X.shape);
  for (int r = 0; r < rows; ++r) {
    const T* xrow = X.data.data() + static_cast<std::size_t>(r) * d;
    T* yrow = Y.data.data() + static_cast<std::size_t>(r) * d;
    double mx = xrow[0];
    for (int j = 1; j < d; ++j) mx = std::max<double>(mx, xrow[j]);
    double sum = 0;
    for (int j = 0; j < d; ++j) {
      const double e = std::exp(static_cast<double>(xrow[j]) - mx);
      yrow[j] = static_cast<T>(e);
      sum += e;
    }
    for (int j = 0; j < d; ++j) yrow[j] = static_cast<T>(yrow[j] / sum);
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, out, d](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(x.id)].needs) return;
    softmax_backward_rows(g.nodes_[static_cast<std::size_t>(out)].value,
                          g.nodes_[static_cast<std::size_t>(out)].grad,
                          g.nodes_[static_cast<std::size_t>(x.id)].grad, d);
  };
  return make(std::move(Y), wants(x), back, "softmax");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::masked_softmax(Var x, const TensorT<T>& mask) {
  const TensorT<T>& X = value(x);
  if (mask.rank() != 2) raise(ErrorKind::Numeric, "masked_softmax mask must be rank 2");
  const int n = mask.shape[0], m = mask.shape[1];
  const bool batched = X.rank() == 3;
  if (!(batched ? (X.shape[1] == n && X.shape[2] == m)
                : (X.rank() == 2 && X.shape[0] == n && X.shape[1] == m))) {
    raise(ErrorKind::Numeric, "masked_softmax shape mismatch " + shape_text(X.shape) + " vs mask " +
                                  shape_text(mask.shape));
  }
  for (T v : mask.data) {
    if (v != T(0) && v != T(1)) raise(ErrorKind::Numeric, "mask entries must be 0 or 1");
  }
  for (int i = 0; i < n; ++i) {
    bool any = false;
    for (int j = 0; j < m && !any; ++j) any = mask.data[static_cast<std::size_t>(i) * m + j] == T(1);
    if (!any) {
      raise(ErrorKind::Numeric,
            "mask row " + std::to_string(i) + " has no attendable position");
    }
  }
  const int bs = batched ? X.shape[0] : 1;
  TensorT<T> Y(X.shape);
  for (int ib = 0; ib < bs; ++ib) {
    for (int i = 0; i < n; ++i) {
      const std::size_t off = (static_cast<std::size_t>(ib) * n + i) * m;
      const T* mrow = mask.data.data() + static_cast<std::size_t>(i) * m;
      double mx = 0;
      bool seen = false;
      for (int j = 0; j < m; ++j) {
        if (mrow[j] == T(1) && (!seen || X.data[off + j] > mx)) {
          mx = X.data[off + j];
          seen = true;
        }
      }
      double sum = 0;
      for (int j = 0; j < m; ++j) {
        if (mrow[j] == T(1)) {
          const double e = std::exp(static_cast<double>(X.data[off + j]) - mx);
          Y.data[off + j] = static_cast<T>(e);
          sum += e;
        } else {
          Y.data[off + j] = T(0);
        }
      }
      for (int j = 0; j < m; ++j) Y.data[off + j] = static_cast<T>(Y.data[off + j] / sum);
    }
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, out, m](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(x.id)].needs) return;
    softmax_backward_rows(g.nodes_[static_cast<std::size_t>(out)].value,
                          g.nodes_[static_cast<std::size_t>(out)].grad,
                          g.nodes_[static_cast<std::size_t>(x.id)].grad, m);
  };
  return make(std::move(Y), wants(x), back, "masked_softmax");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::relu(Var x) {
  TensorT<T> Y = value(x);
  for (T& v : Y.data) v = v > T(0) ? v : T(0);
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, out](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(x.id)].needs) return;
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    const TensorT<T>& xv = g.nodes_[static_cast<std::size_t>(x.id)].value;
    TensorT<T>& dx = g.nodes_[static_cast<std::size_t>(x.id)].grad;
    for (std::size_t i = 0; i < dy.data.size(); ++i) {
      if (xv.data[i] > T(0)) dx.data[i] += dy.data[i];
    }
  };
  return make(std::move(Y), wants(x), back, "relu");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::sigmoid(Var x) {
  TensorT<T> Y = value(x);
  for (T& v : Y.data) v = static_cast<T>(1.0 / (1.0 + std::exp(-static_cast<double>(v))));
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, out](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(x.id)].needs) return;
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    const TensorT<T>& y = g.nodes_[static_cast<std::size_t>(out)].value;
    TensorT<T>& dx = g.nodes_[static_cast<std::size_t>(x.id)].grad;
    for (std::size_t i = 0; i < dy.data.size(); ++i) {
      dx.data[i] += dy.data[i] * y.data[i] * (T(1) - y.data[i]);
    }
  };
  return make(std::move(Y), wants(x), back, "sigmoid");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::tanh_(Var x) {
  TensorT<T> Y = value(x);
  for (T& v : Y.data) v = static_cast<T>(std::tanh(static_cast<double>(v)));
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, out](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(x.id)].needs) return;
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    const TensorT<T>& y = g.nodes_[static_cast<std::size_t>(out)].value;
    TensorT<T>& dx = g.nodes_[static_cast<std::size_t>(x.id)].grad;
    for (std::size_t i = 0; i < dy.data.size(); ++i) {
      dx.data[i] += dy.data[i] * (T(1) - y.data[i] * y.data[i]);
    }
  };
  return make(std::move(Y), wants(x), back, "tanh");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::cross_entropy(Var logits, const std::vector<int>& targets) {
  const TensorT<T>& X = value(logits);
  if (X.rank() != 2) raise(ErrorKind::Numeric, "cross_entropy logits must be rank 2");
  const int n = X.shape[0], V = X.shape[1];
  if (static_cast<int>(targets.size()) != n) {
    raise(ErrorKind::Numeric, "cross_entropy target count " + std::to_string(targets.size()) +
                                  " != rows " + std::to_string(n));
  }
  for (int t : targets) {
    if (t < 0 || t >= V) raise(ErrorKind::Numeric, "cross_entropy target out of range");
  }
  std::vector<T> probs(X.data.size());
  double loss = 0;
  for (int i = 0; i < n; ++i) {
    const std::size_t off = static_cast<std::size_t>(i) * V;
    double mx = X.data[off];
    for (int j = 1; j < V; ++j) mx = std::max<double>(mx, X.data[off + j]);
    double sum = 0;
    for (int j = 0; j < V; ++j) {
      const double e = std::exp(static_cast<double>(X.data[off + j]) - mx);
      probs[off + j] = static_cast<T>(e);
      sum += e;
    }
    for (int j = 0; j < V; ++j) probs[off + j] = static_cast<T>(probs[off + j] / sum);
    loss += mx + std::log(sum) - X.data[off + static_cast<std::size_t>(targets[static_cast<std::size_t>(i)])];
  }
  TensorT<T> Y({1});
  Y.data[0] = static_cast<T>(loss / n);
  const int out = static_cast<int>(nodes_.size());
  auto back = [logits, out, targets, n, V, probs](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(logits.id)].needs) return;
    const T dy = g.nodes_[static_cast<std::size_t>(out)].grad.data[0];
    TensorT<T>& dx = g.nodes_[static_cast<std::size_t>(logits.id)].grad;
    for (int i = 0; i < n; ++i) {
      const std::size_t off = static_cast<std::size_t>(i) * V;
      for (int j = 0; j < V; ++j) {
        T p = probs[off + j];
        if (j == targets[static_cast<std::size_t>(i)]) p -= T(1);
        dx.data[off + j] += dy * p / static_cast<T>(n);
      }
    }
  };
  return make(std::move(Y), wants(logits), back, "cross_entropy");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::add_relative_bias(Var x, Var table, int clip_dist) {
  const TensorT<T>& X = value(x);
  const TensorT<T>& Tb = value(table);
  if (clip_dist < 1) raise(ErrorKind::Numeric, "relative clip distance must be >= 1");
  if (X.rank() != 3) raise(ErrorKind::Numeric, "add_relative_bias expects (H,n,m) logits");
  const int H = X.shape[0], n = X.shape[1], m = X.shape[2];
  if (Tb.rank() != 2 || Tb.shape[0] != H || Tb.shape[1] != 2 * clip_dist + 1) {
    raise(ErrorKind::Numeric, "relative bias table must be (heads, 2*clip+1), got " +
                                  shape_text(Tb.shape));
  }
  TensorT<T> Y = X;
  for (int h = 0; h < H; ++h) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        const int c = clip_rel(j - i, clip_dist) + clip_dist;
        Y.data[(static_cast<std::size_t>(h) * n + i) * m + j] +=
            Tb.data[static_cast<std::size_t>(h) * (2 * clip_dist + 1) + c];
      }
    }
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, table, out, H, n, m, clip_dist](GraphT& g) {
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    if (g.nodes_[static_cast<std::size_t>(x.id)].needs) {
      axpy(g.nodes_[static_cast<std::size_t>(x.id)].grad, dy);
    }
    if (g.nodes_[static_cast<std::size_t>(table.id)].needs) {
      TensorT<T>& dt = g.nodes_[static_cast<std::size_t>(table.id)].grad;
      for (int h = 0; h < H; ++h) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < m; ++j) {
            const int c = clip_rel(j - i, clip_dist) + clip_dist;
            dt.data[static_cast<std::size_t>(h) * (2 * clip_dist + 1) + c] +=
                dy.data[(static_cast<std::size_t>(h) * n + i) * m + j];
          }
        }
      }
    }
  };
  return make(std::move(Y), wants(x) || wants(table), back, "add_relative_bias");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::split_heads(Var x, int heads) {
  const TensorT<T>& X = value(x);
  if (X.rank() != 2) raise(ErrorKind::Numeric, "split_heads expects rank 2");
  const int n = X.shape[0], d = X.shape[1];
  if (heads < 1 || d % heads != 0) {
    raise(ErrorKind::Numeric, "width " + std::to_string(d) + " not divisible by " +
                                  std::to_string(heads) + " heads");
  }
  const int dh = d / heads;
  TensorT<T> Y({heads, n, dh});
  for (int h = 0; h < heads; ++h) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < dh; ++c) {
        Y.data[(static_cast<std::size_t>(h) * n + r) * dh + c] =
            X.data[static_cast<std::size_t>(r) * d + h * dh + c];
      }
    }
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, out, heads, n, dh](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(x.id)].needs) return;
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    TensorT<T>& dx = g.nodes_[static_cast<std::size_t>(x.id)].grad;
    const int d = heads * dh;
    for (int h = 0; h < heads; ++h) {
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < dh; ++c) {
          dx.data[static_cast<std::size_t>(r) * d + h * dh + c] +=
              dy.data[(static_cast<std::size_t>(h) * n + r) * dh + c];
        }
      }
    }
  };
  return make(std::move(Y), wants(x), back, "split_heads");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::merge_heads(Var x) {
  const TensorT<T>& X = value(x);
  if (X.rank() != 3) raise(ErrorKind::Numeric, "merge_heads expects rank 3");
  const int heads = X.shape[0], n = X.shape[1], dh = X.shape[2];
  const int d = heads * dh;
  TensorT<T> Y({n, d});
  for (int h = 0; h < heads; ++h) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < dh; ++c) {
        Y.data[static_cast<std::size_t>(r) * d + h * dh + c] =
            X.data[(static_cast<std::size_t>(h) * n + r) * dh + c];
      }
    }
  }
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, out, heads, n, dh, d](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(x.id)].needs) return;
    const TensorT<T>& dy = g.nodes_[static_cast<std::size_t>(out)].grad;
    TensorT<T>& dx = g.nodes_[static_cast<std::size_t>(x.id)].grad;
    for (int h = 0; h < heads; ++h) {
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < dh; ++c) {
          dx.data[(static_cast<std::size_t>(h) * n + r) * dh + c] +=
              dy.data[static_cast<std::size_t>(r) * d + h * dh + c];
        }
      }
    }
  };
  return make(std::move(Y), wants(x), back, "merge_heads");
}

template <typename T>
typename GraphT<T>::Var GraphT<T>::sum_all(Var x) {
  const TensorT<T>& X = value(x);
  TensorT<T> Y({1});
  double s = 0;
  for (T v : X.data) s += v;
  Y.data[0] = static_cast<T>(s);
  const int out = static_cast<int>(nodes_.size());
  auto back = [x, out](GraphT& g) {
    if (!g.nodes_[static_cast<std::size_t>(x.id)].needs) return;
    const T dy = g.nodes_[static_cast<std::size_t>(out)].grad.data[0];
    for (T& v : g.nodes_[static_cast<std::size_t>(x.id)].grad.data) v += dy;
  };
  return make(std::move(Y), wants(x), back, "sum_all");
}

template class GraphT<float>;
template class GraphT<double>;

}  // namespace seam::nn
