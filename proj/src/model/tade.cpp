#include "ssmgan/model/tade.hpp"

#include "ssmgan/error.hpp"

namespace ssmgan::model {

void modulate(ConstMatrixView content, ConstMatrixView gamma, ConstMatrixView beta, float eps, MatrixView out) {
  if (gamma.rows() != content.rows() || gamma.cols() != content.cols() || beta.rows() != content.rows() ||
      beta.cols() != content.cols()) {
    throw ShapeError("modulation parameters do not match the content shape");
  }
  dsp::channel_norm(content, eps, out);
  for (std::size_t t = 0; t < out.rows(); ++t) {
    auto o = out.row(t);
    auto g = gamma.row(t);
    auto b = beta.row(t);
    for (std::size_t c = 0; c < o.size(); ++c) o[c] = g[c] * o[c] + b[c];
  }
}

TadeOutput tade_modulate(ConstMatrixView cond, ConstMatrixView content, const TadeParams& params, float eps) {
  if (cond.rows() != content.rows()) throw ShapeError("TADE conditioning and content lengths differ");
  if (params.gamma.out_channels() != content.cols() || params.beta.out_channels() != content.cols()) {
    throw ShapeError("TADE gamma/beta width does not match the content channels");
  }
  const Matrix hidden = dsp::causal_conv_offline(cond, params.cond);
  TadeOutput out;
  out.gamma = dsp::causal_conv_offline(hidden, params.gamma);
  out.beta = dsp::causal_conv_offline(hidden, params.beta);
  out.styled = Matrix(content.rows(), content.cols());
  modulate(content, out.gamma, out.beta, eps, out.styled);
  return out;
}

std::size_t ResBlockParams::parameter_count() const {
  return tade.cond.parameter_count() + tade.gamma.parameter_count() + tade.beta.parameter_count() +
         conv1.parameter_count() + conv2.parameter_count();
}

std::size_t ResBlockParams::macs_per_sample() const {
  return tade.cond.macs_per_step() + tade.gamma.macs_per_step() + tade.beta.macs_per_step() + conv1.macs_per_step() +
         conv2.macs_per_step();
}

namespace {

void gate(ConstMatrixView wide, MatrixView out) {
  const std::size_t L = out.cols();
  dsp::gated_activation(wide.cols_slice(0, L), wide.cols_slice(L, L), out);
}

}  // namespace

Matrix resblock_offline(const ResBlockParams& params, ConstMatrixView cond, ConstMatrixView x, ResBlockTrace* trace) {
  const std::size_t T = x.rows();
  const std::size_t L = params.hidden_channels();
  if (x.cols() != L) throw ShapeError("resblock input width does not match hidden channels");

  auto tade = tade_modulate(cond, x, params.tade);
  const Matrix& m1 = tade.styled;
  const Matrix c1 = dsp::causal_conv_offline(m1, params.conv1);
  Matrix g1(T, L);
  gate(c1, g1);
  Matrix m2(T, L);
  modulate(g1, tade.gamma, tade.beta, dsp::kChannelNormEps, m2);
  const Matrix c2 = dsp::causal_conv_offline(m2, params.conv2);
  Matrix g2(T, L);
  gate(c2, g2);

  Matrix out(T, L);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t c = 0; c < L; ++c) out(t, c) = x(t, c) + g2(t, c);

  if (trace) {
    trace->gamma = std::move(tade.gamma);
    trace->beta = std::move(tade.beta);
    trace->modulated1 = std::move(tade.styled);
    trace->gated1 = std::move(g1);
    trace->modulated2 = std::move(m2);
    trace->gated2 = std::move(g2);
  }
  return out;
}

ResBlockState::ResBlockState(const ResBlockParams& params, std::size_t max_rows)
    : max_rows_(max_rows),
      cond_(params.tade.cond),
      gamma_(params.tade.gamma),
      beta_(params.tade.beta),
      conv1_(params.conv1),
      conv2_(params.conv2),
      hidden_(max_rows, params.tade.cond.out_channels()),
      gamma_buf_(max_rows, params.hidden_channels()),
      beta_buf_(max_rows, params.hidden_channels()),
      work_(max_rows, params.hidden_channels()),
      wide_(max_rows, 2 * params.hidden_channels()) {}

void ResBlockState::reset() {
  for (auto* s : {&cond_, &gamma_, &beta_, &conv1_, &conv2_}) s->reset();
}

bool ResBlockState::belongs_to(const ResBlockParams& params) const {
  return cond_.belongs_to(params.tade.cond) && gamma_.belongs_to(params.tade.gamma) &&
         beta_.belongs_to(params.tade.beta) && conv1_.belongs_to(params.conv1) && conv2_.belongs_to(params.conv2) &&
         work_.cols() == params.hidden_channels();
}

void tade_resblock_step(ResBlockState& state, const ResBlockParams& params, ConstMatrixView cond_frame,
                        ConstMatrixView x_frame, MatrixView out) {
  if (!state.belongs_to(params)) throw StateError("resblock state does not belong to this block");
  const std::size_t T = x_frame.rows();
  const std::size_t L = params.hidden_channels();
  if (T > state.max_rows_) throw ShapeError("resblock frame exceeds the preallocated size");
  if (cond_frame.rows() != T || x_frame.cols() != L || out.rows() != T || out.cols() != L) {
    throw ShapeError("resblock frame shapes disagree");
  }

  MatrixView hidden = state.hidden_.view().rows_slice(0, T);
  MatrixView gamma = state.gamma_buf_.view().rows_slice(0, T);
  MatrixView beta = state.beta_buf_.view().rows_slice(0, T);
  MatrixView work = state.work_.view().rows_slice(0, T);
  MatrixView wide = state.wide_.view().rows_slice(0, T);

  dsp::causal_conv_step(state.cond_, cond_frame, params.tade.cond, hidden);
  dsp::causal_conv_step(state.gamma_, hidden, params.tade.gamma, gamma);
  dsp::causal_conv_step(state.beta_, hidden, params.tade.beta, beta);

  modulate(x_frame, gamma, beta, dsp::kChannelNormEps, work);
  dsp::causal_conv_step(state.conv1_, work, params.conv1, wide);
  gate(wide, work);
  modulate(work, gamma, beta, dsp::kChannelNormEps, work);
  dsp::causal_conv_step(state.conv2_, work, params.conv2, wide);
  gate(wide, out);
  for (std::size_t t = 0; t < T; ++t) {
    auto o = out.row(t);
    auto x = x_frame.row(t);
    for (std::size_t c = 0; c < L; ++c) o[c] += x[c];
  }
}

}  // namespace ssmgan::model
