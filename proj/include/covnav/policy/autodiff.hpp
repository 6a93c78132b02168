#pragma once

#include <Eigen/Dense>

#include <vector>

namespace covnav::ad {

// Reverse-mode tape over vector-valued nodes. Parameters live in one flat
// vector outside the tape; gradients accumulate into a caller-owned vector
// of the same size. Built per sample and cleared, so nodes stay small.
class Tape {
 public:
  explicit Tape(const Eigen::VectorXd& params) : params_(&params) {}

  int constant(Eigen::VectorXd v);
  int scalar(double v) { return constant(Eigen::VectorXd::Constant(1, v)); }
  // Leaf view of params[offset : offset+n].
  int param_vector(int offset, int n);
  // Row-major weight matrix (rows x cols) at `offset` times node x.
  int param_matvec(int offset, int rows, int cols, int x);
  // Fixed (non-parameter) matrix products. Data must outlive the tape.
  // const_matvec_t computes M^T x for column-major M (rows x cols).
  int const_matvec_t(const double* m, int rows, int cols, int x);
  // mix_columns computes M w for column-major M (rows x cols).
  int mix_columns(const double* m, int rows, int cols, int w);

  int add(int a, int b);
  int add3(int a, int b, int c);
  int sub(int a, int b);
  int hadamard(int a, int b);
  int scale(int a, double c);
  int one_minus(int a);
  int concat(int a, int b);
  int concat3(int a, int b, int c);
  int slice(int a, int start, int len);
  int tanh_(int a);
  int sigmoid_(int a);
  int exp_(int a);
  int clamp_(int a, double lo, double hi);
  int dot(int a, int b);
  int sum(int a);
  int mean(int a);
  int softmax(int a);
  // scalar-node times vector-node
  int smul_vec(int vec, int scalar_node);
  // min of two size-1 nodes; gradient follows the chosen branch (ties: a)
  int smin(int a, int b);

  const Eigen::VectorXd& value(int i) const { return nodes_[i].val; }

  // Accumulates d(seed * node)/d(params) into param_grad (+=).
  void backward(int node, double seed, Eigen::VectorXd* param_grad);

  void clear() { nodes_.clear(); }
  size_t size() const { return nodes_.size(); }

 private:
  enum class Op {
    kConst, kParamVec, kParamMatvec, kConstMatvecT, kMixColumns,
    kAdd, kAdd3, kSub, kHadamard, kScale, kOneMinus, kConcat, kConcat3,
    kSlice, kTanh, kSigmoid, kExp, kClamp, kDot, kSum, kMean, kSoftmax,
    kSMulVec, kSMin,
  };
  struct Node {
    Eigen::VectorXd val;
    Eigen::VectorXd adj;
    Op op = Op::kConst;
    int a = -1, b = -1, c = -1;
    double x0 = 0.0, x1 = 0.0;
    int offset = 0, rows = 0, cols = 0;
    const double* ext = nullptr;
  };

  int push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  const Eigen::VectorXd* params_;
  std::vector<Node> nodes_;
};

}  // namespace covnav::ad
