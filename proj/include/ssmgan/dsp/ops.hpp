#pragma once

#include <cstddef>

#include "ssmgan/tensor.hpp"

namespace ssmgan::dsp {

inline constexpr float kChannelNormEps = 1e-5f;

// Normalizes every time step across its channels:
// (x[t] - mean(x[t])) / sqrt(var(x[t]) + eps), population variance.
// Stateless in time, so streaming needs no history. `out` may alias `x`.
void channel_norm(ConstMatrixView x, float eps, MatrixView out);
Matrix channel_norm(ConstMatrixView x, float eps = kChannelNormEps);

// out = tanh(a) * softmax(b), softmax taken over channels per time step.
void gated_activation(ConstMatrixView a, ConstMatrixView b, MatrixView out);
Matrix gated_activation(ConstMatrixView a, ConstMatrixView b);

// Sample-and-hold rational resampling: repeat each row `up` times and keep
// every `down`-th row starting at 0, i.e. out[j] = x[floor(j * down / up)].
// Output has floor(rows * up / down) rows.
Matrix upsample_rational(ConstMatrixView x, std::size_t up, std::size_t down);

// Streaming form. Phase stays aligned across frames as long as every frame
// holds a multiple of `down / gcd(up, down)` rows, which makes the frame-local
// mapping identical to the global one. Throws InternalError otherwise.
void upsample_rational(ConstMatrixView x, std::size_t up, std::size_t down, MatrixView out);

}  // namespace ssmgan::dsp
