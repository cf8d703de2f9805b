#pragma once

#include <array>

#include "panogan/ad/tape.hpp"
#include "panogan/kernels/kernels.hpp"

// Differentiable ops. Each returns the id of a new tape node. Binary
// elementwise ops broadcast axes of size 1 on either side; the backward pass
// sums gradients back over broadcast axes.
namespace panogan::ad {

Shape broadcast_shape(const Shape& a, const Shape& b);

template <class T> int add(Tape<T>& t, int a, int b);
template <class T> int sub(Tape<T>& t, int a, int b);
template <class T> int mul(Tape<T>& t, int a, int b);
template <class T> int div(Tape<T>& t, int a, int b);

template <class T> int scale(Tape<T>& t, int x, double c);
template <class T> int add_const(Tape<T>& t, int x, double c);
template <class T> int neg(Tape<T>& t, int x);
template <class T> int square(Tape<T>& t, int x);
template <class T> int sqrt_op(Tape<T>& t, int x);
template <class T> int tanh_op(Tape<T>& t, int x);
template <class T> int leaky_relu(Tape<T>& t, int x, double slope);
template <class T> int relu(Tape<T>& t, int x);

// Sum over the axes whose flag is set, keeping them as size 1.
template <class T> int sum_axes(Tape<T>& t, int x, std::array<bool, 4> axes);
// Broadcast-materialize x to target (axes of size 1 may grow).
template <class T> int expand(Tape<T>& t, int x, Shape target);
// Sum gradients of gy back to `target` (identity when shapes match).
template <class T> int reduce_to(Tape<T>& t, int gy, Shape target);

template <class T> int sum_all(Tape<T>& t, int x);
template <class T> int mean_all(Tape<T>& t, int x);

template <class T> int reshape(Tape<T>& t, int x, Shape s);
template <class T> int concat_c(Tape<T>& t, int a, int b);
template <class T> int slice_c(Tape<T>& t, int x, int64_t c0, int64_t len);
// Place x into a zero tensor of `total_c` channels at offset c0.
template <class T> int embed_c(Tape<T>& t, int x, int64_t c0, int64_t total_c);

// 2-D matrix product of op(a) and op(b); tensors are viewed as
// (rows = shape.n, cols = numel / n). Transposed operands are read
// transposed in place.
template <class T> int matmul(Tape<T>& t, int a, int b, bool ta, bool tb);

// Convolution without bias (add a (1,co,1,1) bias tensor separately).
template <class T> int conv2d(Tape<T>& t, int x, int w, kernels::ConvGeom g);
template <class T>
int conv2d_igrad_op(Tape<T>& t, int gy, int w, kernels::ConvGeom g, Shape xshape);
template <class T>
int conv2d_wgrad_op(Tape<T>& t, int x, int gy, kernels::ConvGeom g, Shape wshape);

template <class T> int avgpool2(Tape<T>& t, int x);
template <class T> int upsample2(Tape<T>& t, int x);

// v / sqrt(mean_c(v^2) + eps) per pixel.
template <class T> int pixel_norm(Tape<T>& t, int x, double eps = 1e-8);

}  // namespace panogan::ad
