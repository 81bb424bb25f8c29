#pragma once

// Training objective: mean per-joint Euclidean distance over the predicted
// window (the training-time analogue of the evaluation metric) plus the same
// reduction applied to adjacent-frame velocities. Velocities are the N-1
// differences inside the prediction window, so adding a constant offset to
// every predicted frame leaves the velocity term unchanged.

#include <cmath>

#include "simlpe/error.hpp"
#include "simlpe/matrix.hpp"

namespace simlpe {

struct LossWeights {
  double w_re = 1.0;
  double w_v = 1.0;
};

template <typename S>
struct LossValue {
  S total = S(0);
  S re = S(0);
  S v = S(0);
  bool velocity_defined = true;   // false when the window has < 2 frames
  Matrix<S> grad;                 // d total / d pred
};

template <typename S>
void check_loss_shapes(const Matrix<S>& pred, const Matrix<S>& gt) {
  if (!pred.same_shape(gt))
    throw ShapeError("loss: pred is " + pred.shape_str() + ", gt is " +
                     gt.shape_str());
  if (pred.cols() % 3 != 0)
    throw ShapeError("loss: channel count " + std::to_string(pred.cols()) +
                     " is not a multiple of 3");
}

// Mean over all (frame, joint) pairs of |pred_joint - gt_joint|.
template <typename S>
S loss_re(const Matrix<S>& pred, const Matrix<S>& gt) {
  check_loss_shapes(pred, gt);
  const int joints = pred.cols() / 3;
  double sum = 0;
  for (int t = 0; t < pred.rows(); ++t) {
    const S* p = pred.row(t);
    const S* g = gt.row(t);
    for (int k = 0; k < joints; ++k) {
      double d2 = 0;
      for (int a = 0; a < 3; ++a) {
        const double d = static_cast<double>(p[3 * k + a]) - g[3 * k + a];
        d2 += d * d;
      }
      sum += std::sqrt(d2);
    }
  }
  return static_cast<S>(sum / (static_cast<double>(pred.rows()) * joints));
}

template <typename S>
S loss_v(const Matrix<S>& pred, const Matrix<S>& gt, bool* defined = nullptr) {
  check_loss_shapes(pred, gt);
  if (pred.rows() < 2) {
    if (defined) *defined = false;
    return S(0);
  }
  if (defined) *defined = true;
  const int joints = pred.cols() / 3;
  const int vframes = pred.rows() - 1;
  double sum = 0;
  for (int t = 0; t < vframes; ++t) {
    const S* p0 = pred.row(t);
    const S* p1 = pred.row(t + 1);
    const S* g0 = gt.row(t);
    const S* g1 = gt.row(t + 1);
    for (int k = 0; k < joints; ++k) {
      double d2 = 0;
      for (int a = 0; a < 3; ++a) {
        const double vp = static_cast<double>(p1[3 * k + a]) - p0[3 * k + a];
        const double vg = static_cast<double>(g1[3 * k + a]) - g0[3 * k + a];
        d2 += (vp - vg) * (vp - vg);
      }
      sum += std::sqrt(d2);
    }
  }
  return static_cast<S>(sum / (static_cast<double>(vframes) * joints));
}

// Weighted sum of the two terms with its exact gradient with respect to pred.
// Each distance contributes its unit direction; a zero distance contributes a
// zero gradient.
template <typename S>
LossValue<S> total_loss(const LossWeights& w, const Matrix<S>& pred,
                        const Matrix<S>& gt) {
  check_loss_shapes(pred, gt);
  LossValue<S> out;
  out.grad = Matrix<S>(pred.rows(), pred.cols());
  const int joints = pred.cols() / 3;
  const int frames = pred.rows();

  double sum_re = 0;
  const double re_scale = w.w_re / (static_cast<double>(frames) * joints);
  for (int t = 0; t < frames; ++t) {
    const S* p = pred.row(t);
    const S* g = gt.row(t);
    S* gr = out.grad.row(t);
    for (int k = 0; k < joints; ++k) {
      double d[3];
      double d2 = 0;
      for (int a = 0; a < 3; ++a) {
        d[a] = static_cast<double>(p[3 * k + a]) - g[3 * k + a];
        d2 += d[a] * d[a];
      }
      const double dist = std::sqrt(d2);
      sum_re += dist;
      if (dist > 0)
        for (int a = 0; a < 3; ++a)
          gr[3 * k + a] += static_cast<S>(re_scale * d[a] / dist);
    }
  }
  out.re = static_cast<S>(sum_re / (static_cast<double>(frames) * joints));

  double sum_v = 0;
  if (frames >= 2) {
    const int vframes = frames - 1;
    const double v_scale = w.w_v / (static_cast<double>(vframes) * joints);
    for (int t = 0; t < vframes; ++t) {
      const S* p0 = pred.row(t);
      const S* p1 = pred.row(t + 1);
      const S* g0 = gt.row(t);
      const S* g1 = gt.row(t + 1);
      S* gr0 = out.grad.row(t);
      S* gr1 = out.grad.row(t + 1);
      for (int k = 0; k < joints; ++k) {
        double d[3];
        double d2 = 0;
        for (int a = 0; a < 3; ++a) {
          const double vp = static_cast<double>(p1[3 * k + a]) - p0[3 * k + a];
          const double vg = static_cast<double>(g1[3 * k + a]) - g0[3 * k + a];
          d[a] = vp - vg;
          d2 += d[a] * d[a];
        }
        const double dist = std::sqrt(d2);
        sum_v += dist;
        if (dist > 0) {
          for (int a = 0; a < 3; ++a) {
            const S u = static_cast<S>(v_scale * d[a] / dist);
            gr1[3 * k + a] += u;
            gr0[3 * k + a] -= u;
          }
        }
      }
    }
    out.v = static_cast<S>(sum_v / (static_cast<double>(vframes) * joints));
  } else {
    out.velocity_defined = false;
  }

  out.total = static_cast<S>(w.w_re * out.re + w.w_v * out.v);
  return out;
}

}  // namespace simlpe
