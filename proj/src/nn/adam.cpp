#include <cmath>

#include "vulpath/error.hpp"
#include "vulpath/nn/adam.hpp"

namespace vulpath::nn {

void adam_step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads, AdamState& state) {
  if (params.size() != grads.size()) throw ShapeMismatch("parameter and gradient counts differ");
  if (state.m.empty()) {
    for (const Matrix* p : params) {
      state.m.push_back(Matrix::Zero(p->rows(), p->cols()));
      state.v.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (state.m.size() != params.size()) throw ShapeMismatch("optimizer state does not match parameters");
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = grads[i];
    if (g.rows() != p.rows() || g.cols() != p.cols()) throw ShapeMismatch("gradient shape differs from parameter");
    state.m[i] = state.beta1 * state.m[i] + (1 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1 - state.beta2) * g.cwiseAbs2();
    p.array() -= state.lr * (state.m[i].array() / c1) / ((state.v[i].array() / c2).sqrt() + state.eps);
  }
}

}  // namespace vulpath::nn
