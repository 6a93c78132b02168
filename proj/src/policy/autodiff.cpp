#include "covnav/policy/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace covnav::ad {

namespace {
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}

int Tape::constant(Eigen::VectorXd v) {
  Node n;
  n.op = Op::kConst;
  n.val = std::move(v);
  return push(std::move(n));
}

int Tape::param_vector(int offset, int len) {
  Node n;
  n.op = Op::kParamVec;
  n.offset = offset;
  n.rows = len;
  n.val = params_->segment(offset, len);
  return push(std::move(n));
}

int Tape::param_matvec(int offset, int rows, int cols, int x) {
  Node n;
  n.op = Op::kParamMatvec;
  n.offset = offset;
  n.rows = rows;
  n.cols = cols;
  n.a = x;
  Eigen::Map<const RowMajor> W(params_->data() + offset, rows, cols);
  n.val = W * nodes_[x].val;
  return push(std::move(n));
}

int Tape::const_matvec_t(const double* m, int rows, int cols, int x) {
  Node n;
  n.op = Op::kConstMatvecT;
  n.ext = m;
  n.rows = rows;
  n.cols = cols;
  n.a = x;
  Eigen::Map<const Eigen::MatrixXd> M(m, rows, cols);
  n.val = M.transpose() * nodes_[x].val;
  return push(std::move(n));
}

int Tape::mix_columns(const double* m, int rows, int cols, int w) {
  Node n;
  n.op = Op::kMixColumns;
  n.ext = m;
  n.rows = rows;
  n.cols = cols;
  n.a = w;
  Eigen::Map<const Eigen::MatrixXd> M(m, rows, cols);
  n.val = M * nodes_[w].val;
  return push(std::move(n));
}

int Tape::add(int a, int b) {
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.val = nodes_[a].val + nodes_[b].val;
  return push(std::move(n));
}

int Tape::add3(int a, int b, int c) {
  Node n;
  n.op = Op::kAdd3;
  n.a = a;
  n.b = b;
  n.c = c;
  n.val = nodes_[a].val + nodes_[b].val + nodes_[c].val;
  return push(std::move(n));
}

int Tape::sub(int a, int b) {
  Node n;
  n.op = Op::kSub;
  n.a = a;
  n.b = b;
  n.val = nodes_[a].val - nodes_[b].val;
  return push(std::move(n));
}

int Tape::hadamard(int a, int b) {
  Node n;
  n.op = Op::kHadamard;
  n.a = a;
  n.b = b;
  n.val = nodes_[a].val.cwiseProduct(nodes_[b].val);
  return push(std::move(n));
}

int Tape::scale(int a, double c) {
  Node n;
  n.op = Op::kScale;
  n.a = a;
  n.x0 = c;
  n.val = c * nodes_[a].val;
  return push(std::move(n));
}

int Tape::one_minus(int a) {
  Node n;
  n.op = Op::kOneMinus;
  n.a = a;
  n.val = (1.0 - nodes_[a].val.array()).matrix();
  return push(std::move(n));
}

int Tape::concat(int a, int b) {
  Node n;
  n.op = Op::kConcat;
  n.a = a;
  n.b = b;
  n.val.resize(nodes_[a].val.size() + nodes_[b].val.size());
  n.val << nodes_[a].val, nodes_[b].val;
  return push(std::move(n));
}

int Tape::concat3(int a, int b, int c) {
  Node n;
  n.op = Op::kConcat3;
  n.a = a;
  n.b = b;
  n.c = c;
  n.val.resize(nodes_[a].val.size() + nodes_[b].val.size() + nodes_[c].val.size());
  n.val << nodes_[a].val, nodes_[b].val, nodes_[c].val;
  return push(std::move(n));
}

int Tape::slice(int a, int start, int len) {
  Node n;
  n.op = Op::kSlice;
  n.a = a;
  n.offset = start;
  n.rows = len;
  n.val = nodes_[a].val.segment(start, len);
  return push(std::move(n));
}

int Tape::tanh_(int a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a;
  n.val = nodes_[a].val.array().tanh().matrix();
  return push(std::move(n));
}

int Tape::sigmoid_(int a) {
  Node n;
  n.op = Op::kSigmoid;
  n.a = a;
  n.val = (1.0 / (1.0 + (-nodes_[a].val.array()).exp())).matrix();
  return push(std::move(n));
}

int Tape::exp_(int a) {
  Node n;
  n.op = Op::kExp;
  n.a = a;
  n.val = nodes_[a].val.array().exp().matrix();
  return push(std::move(n));
}

int Tape::clamp_(int a, double lo, double hi) {
  Node n;
  n.op = Op::kClamp;
  n.a = a;
  n.x0 = lo;
  n.x1 = hi;
  n.val = nodes_[a].val.array().max(lo).min(hi).matrix();
  return push(std::move(n));
}

int Tape::dot(int a, int b) {
  Node n;
  n.op = Op::kDot;
  n.a = a;
  n.b = b;
  n.val = Eigen::VectorXd::Constant(1, nodes_[a].val.dot(nodes_[b].val));
  return push(std::move(n));
}

int Tape::sum(int a) {
  Node n;
  n.op = Op::kSum;
  n.a = a;
  n.val = Eigen::VectorXd::Constant(1, nodes_[a].val.sum());
  return push(std::move(n));
}

int Tape::mean(int a) {
  Node n;
  n.op = Op::kMean;
  n.a = a;
  n.val = Eigen::VectorXd::Constant(1, nodes_[a].val.mean());
  return push(std::move(n));
}

int Tape::softmax(int a) {
  Node n;
  n.op = Op::kSoftmax;
  n.a = a;
  const double mx = nodes_[a].val.maxCoeff();
  Eigen::VectorXd e = (nodes_[a].val.array() - mx).exp();
  n.val = e / e.sum();
  return push(std::move(n));
}

int Tape::smul_vec(int vec, int scalar_node) {
  Node n;
  n.op = Op::kSMulVec;
  n.a = vec;
  n.b = scalar_node;
  n.val = nodes_[scalar_node].val[0] * nodes_[vec].val;
  return push(std::move(n));
}

int Tape::smin(int a, int b) {
  Node n;
  n.op = Op::kSMin;
  n.a = a;
  n.b = b;
  n.val = Eigen::VectorXd::Constant(1, std::min(nodes_[a].val[0], nodes_[b].val[0]));
  return push(std::move(n));
}

void Tape::backward(int node, double seed, Eigen::VectorXd* param_grad) {
  if (nodes_[node].val.size() != 1) throw std::logic_error("backward seed must be scalar node");
  for (auto& n : nodes_) n.adj = Eigen::VectorXd::Zero(n.val.size());
  nodes_[node].adj[0] = seed;

  for (int i = node; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.adj.isZero(0.0)) continue;
    const Eigen::VectorXd& g = n.adj;
    switch (n.op) {
      case Op::kConst:
        break;
      case Op::kParamVec:
        param_grad->segment(n.offset, n.rows) += g;
        break;
      case Op::kParamMatvec: {
        const Eigen::VectorXd& x = nodes_[n.a].val;
        Eigen::Map<const RowMajor> W(params_->data() + n.offset, n.rows, n.cols);
        Eigen::Map<RowMajor> dW(param_grad->data() + n.offset, n.rows, n.cols);
        dW.noalias() += g * x.transpose();
        nodes_[n.a].adj.noalias() += W.transpose() * g;
        break;
      }
      case Op::kConstMatvecT: {
        Eigen::Map<const Eigen::MatrixXd> M(n.ext, n.rows, n.cols);
        nodes_[n.a].adj.noalias() += M * g;
        break;
      }
      case Op::kMixColumns: {
        Eigen::Map<const Eigen::MatrixXd> M(n.ext, n.rows, n.cols);
        nodes_[n.a].adj.noalias() += M.transpose() * g;
        break;
      }
      case Op::kAdd:
        nodes_[n.a].adj += g;
        nodes_[n.b].adj += g;
        break;
      case Op::kAdd3:
        nodes_[n.a].adj += g;
        nodes_[n.b].adj += g;
        nodes_[n.c].adj += g;
        break;
      case Op::kSub:
        nodes_[n.a].adj += g;
        nodes_[n.b].adj -= g;
        break;
      case Op::kHadamard:
        nodes_[n.a].adj += g.cwiseProduct(nodes_[n.b].val);
        nodes_[n.b].adj += g.cwiseProduct(nodes_[n.a].val);
        break;
      case Op::kScale:
        nodes_[n.a].adj += n.x0 * g;
        break;
      case Op::kOneMinus:
        nodes_[n.a].adj -= g;
        break;
      case Op::kConcat: {
        const int la = static_cast<int>(nodes_[n.a].val.size());
        nodes_[n.a].adj += g.head(la);
        nodes_[n.b].adj += g.tail(g.size() - la);
        break;
      }
      case Op::kConcat3: {
        const int la = static_cast<int>(nodes_[n.a].val.size());
        const int lb = static_cast<int>(nodes_[n.b].val.size());
        const int lc = static_cast<int>(nodes_[n.c].val.size());
        if (la > 0) nodes_[n.a].adj += g.head(la);
        if (lb > 0) nodes_[n.b].adj += g.segment(la, lb);
        if (lc > 0) nodes_[n.c].adj += g.tail(lc);
        break;
      }
      case Op::kSlice:
        nodes_[n.a].adj.segment(n.offset, n.rows) += g;
        break;
      case Op::kTanh:
        nodes_[n.a].adj += g.cwiseProduct((1.0 - n.val.array().square()).matrix());
        break;
      case Op::kSigmoid:
        nodes_[n.a].adj += g.cwiseProduct((n.val.array() * (1.0 - n.val.array())).matrix());
        break;
      case Op::kExp:
        nodes_[n.a].adj += g.cwiseProduct(n.val);
        break;
      case Op::kClamp: {
        const Eigen::VectorXd& x = nodes_[n.a].val;
        for (int k = 0; k < x.size(); ++k) {
          if (x[k] > n.x0 && x[k] < n.x1) nodes_[n.a].adj[k] += g[k];
        }
        break;
      }
      case Op::kDot:
        nodes_[n.a].adj += g[0] * nodes_[n.b].val;
        nodes_[n.b].adj += g[0] * nodes_[n.a].val;
        break;
      case Op::kSum:
        nodes_[n.a].adj.array() += g[0];
        break;
      case Op::kMean:
        nodes_[n.a].adj.array() += g[0] / static_cast<double>(nodes_[n.a].val.size());
        break;
      case Op::kSoftmax: {
        const Eigen::VectorXd& s = n.val;
        const double gs = g.dot(s);
        nodes_[n.a].adj += s.cwiseProduct(g) - gs * s;
        break;
      }
      case Op::kSMulVec:
        nodes_[n.a].adj += nodes_[n.b].val[0] * g;
        nodes_[n.b].adj[0] += g.dot(nodes_[n.a].val);
        break;
      case Op::kSMin:
        if (nodes_[n.a].val[0] <= nodes_[n.b].val[0]) {
          nodes_[n.a].adj[0] += g[0];
        } else {
          nodes_[n.b].adj[0] += g[0];
        }
        break;
    }
  }
}

}  // namespace covnav::ad
