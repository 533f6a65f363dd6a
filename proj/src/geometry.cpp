#include "trackadapt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "trackadapt/errors.hpp"

namespace trackadapt {

BoundingBox::BoundingBox(double cx, double cy, double w, double h) : cx_(cx), cy_(cy), w_(w), h_(h) {
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) || !std::isfinite(h)) {
    throw DomainError("bounding box coordinates must be finite");
  }
  if (w < 0.0 || h < 0.0) {
    throw DomainError("bounding box size must be non-negative, got w=" + std::to_string(w) +
                      " h=" + std::to_string(h));
  }
}

BoundingBox BoundingBox::from_top_left(double x, double y, double w, double h) {
  return BoundingBox(x + 0.5 * w, y + 0.5 * h, w, h);
}

BoundingBox BoundingBox::from_corners(double x1, double y1, double x2, double y2) {
  return BoundingBox(0.5 * (x1 + x2), 0.5 * (y1 + y2), x2 - x1, y2 - y1);
}

BoundingBox BoundingBox::translated(double dx, double dy) const {
  return BoundingBox(cx_ + dx, cy_ + dy, w_, h_);
}

BoundingBox BoundingBox::scaled(double s) const {
  return BoundingBox(cx_ * s, cy_ * s, w_ * s, h_ * s);
}

BinaryMask::BinaryMask(std::size_t width, std::size_t height)
    : width_(width), height_(height), bits_(width * height, 0) {}

BinaryMask::BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (bits_.size() != width * height) {
    throw DomainError("mask bit count does not match width*height");
  }
}

BinaryMask BinaryMask::from_box(std::size_t width, std::size_t height, const BoundingBox& box) {
  BinaryMask m(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    const double py = static_cast<double>(y) + 0.5;
    if (py < box.top() || py >= box.bottom()) continue;
    for (std::size_t x = 0; x < width; ++x) {
      const double px = static_cast<double>(x) + 0.5;
      if (px >= box.left() && px < box.right()) m.set(x, y);
    }
  }
  return m;
}

bool BinaryMask::empty() const {
  return std::none_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  if (a.degenerate() || b.degenerate()) return 0.0;
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  // areas from the same corner arithmetic, so iou(a, a) is exactly 1
  const double area_a = (a.right() - a.left()) * (a.bottom() - a.top());
  const double area_b = (b.right() - b.left()) * (b.bottom() - b.top());
  return std::clamp(inter / (area_a + area_b - inter), 0.0, 1.0);
}

double iou(const MaybeBox& a, const MaybeBox& b) {
  if (!a || !b) return 0.0;
  return iou(*a, *b);
}

double sim_ratio(double x, double y) {
  if (std::isnan(x) || std::isnan(y) || x < 0.0 || y < 0.0) {
    throw DomainError("sim_ratio expects non-negative inputs");
  }
  const double hi = std::max(x, y);
  if (hi == 0.0) return 1.0;
  return std::min(x, y) / hi;
}

double aspect_ratio(const BoundingBox& b) {
  if (b.degenerate()) throw DomainError("aspect ratio of a degenerate box");
  return b.w() / b.h();
}

ShapeSimilarity shape_similarity(const BoundingBox& a, const BoundingBox& b) {
  if (a.degenerate() || b.degenerate()) return {};
  return {sim_ratio(aspect_ratio(a), aspect_ratio(b)), sim_ratio(a.area(), b.area())};
}

namespace {

constexpr double kAspectCoeff = 4.0 / (std::numbers::pi * std::numbers::pi);

void require_gt(const BoundingBox& gt) {
  if (gt.degenerate()) throw DomainError("loss ground truth box is degenerate");
}

// Overlap term with its gradient w.r.t. pred (cx, cy, w, h).
struct OverlapTerms {
  double iou = 0.0;
  BoxGrad d_iou{};
};

// One axis of the intersection: length and derivative w.r.t. (center, size) of pred.
struct AxisOverlap {
  double len = 0.0;
  double d_center = 0.0;
  double d_size = 0.0;
};

AxisOverlap axis_overlap(double p_lo, double p_hi, double g_lo, double g_hi) {
  AxisOverlap o;
  const double hi = std::min(p_hi, g_hi);
  const double lo = std::max(p_lo, g_lo);
  o.len = hi - lo;
  if (o.len <= 0.0) {
    o.len = 0.0;
    return o;
  }
  const double dhi_c = p_hi < g_hi ? 1.0 : 0.0;
  const double dlo_c = p_lo > g_lo ? 1.0 : 0.0;
  o.d_center = dhi_c - dlo_c;
  o.d_size = 0.5 * dhi_c + 0.5 * dlo_c;
  return o;
}

OverlapTerms overlap_terms(const BoundingBox& p, const BoundingBox& g) {
  OverlapTerms t;
  if (p.degenerate()) return t;
  const AxisOverlap ox = axis_overlap(p.left(), p.right(), g.left(), g.right());
  const AxisOverlap oy = axis_overlap(p.top(), p.bottom(), g.top(), g.bottom());
  const double inter = ox.len * oy.len;
  if (inter <= 0.0) return t;
  const double uni = p.area() + g.area() - inter;
  t.iou = inter / uni;

  const BoxGrad d_inter{ox.d_center * oy.len, oy.d_center * ox.len, ox.d_size * oy.len, oy.d_size * ox.len};
  const BoxGrad d_area{0.0, 0.0, p.h(), p.w()};
  for (int i = 0; i < 4; ++i) {
    const double d_uni = d_area[i] - d_inter[i];
    t.d_iou[i] = (d_inter[i] * uni - inter * d_uni) / (uni * uni);
  }
  return t;
}

// rho^2 / c^2: squared center distance over squared diagonal of the enclosing box.
struct DistanceTerms {
  double value = 0.0;
  BoxGrad grad{};
};

DistanceTerms distance_terms(const BoundingBox& p, const BoundingBox& g) {
  DistanceTerms t;
  const double dx = p.cx() - g.cx();
  const double dy = p.cy() - g.cy();
  const double rho2 = dx * dx + dy * dy;

  const double ew = std::max(p.right(), g.right()) - std::min(p.left(), g.left());
  const double eh = std::max(p.bottom(), g.bottom()) - std::min(p.top(), g.top());
  const double c2 = ew * ew + eh * eh;
  t.value = rho2 / c2;

  const double dew_c = (p.right() > g.right() ? 1.0 : 0.0) - (p.left() < g.left() ? 1.0 : 0.0);
  const double dew_w = 0.5 * (p.right() > g.right() ? 1.0 : 0.0) + 0.5 * (p.left() < g.left() ? 1.0 : 0.0);
  const double deh_c = (p.bottom() > g.bottom() ? 1.0 : 0.0) - (p.top() < g.top() ? 1.0 : 0.0);
  const double deh_h = 0.5 * (p.bottom() > g.bottom() ? 1.0 : 0.0) + 0.5 * (p.top() < g.top() ? 1.0 : 0.0);

  const BoxGrad d_rho2{2.0 * dx, 2.0 * dy, 0.0, 0.0};
  const BoxGrad d_c2{2.0 * ew * dew_c, 2.0 * eh * deh_c, 2.0 * ew * dew_w, 2.0 * eh * deh_h};
  for (int i = 0; i < 4; ++i) {
    t.grad[i] = (d_rho2[i] * c2 - rho2 * d_c2[i]) / (c2 * c2);
  }
  return t;
}

// v = 4/pi^2 (atan(wg/hg) - atan(w/h))^2
struct AspectTerms {
  double v = 0.0;
  BoxGrad grad{};
};

AspectTerms aspect_terms(const BoundingBox& p, const BoundingBox& g) {
  AspectTerms t;
  const double diff = std::atan2(g.w(), g.h()) - std::atan2(p.w(), p.h());
  t.v = kAspectCoeff * diff * diff;
  const double n2 = p.w() * p.w() + p.h() * p.h();
  if (n2 > 0.0) {
    // d atan2(w, h) / dw = h / (w^2 + h^2), / dh = -w / (w^2 + h^2)
    const double scale = -2.0 * kAspectCoeff * diff;
    t.grad[2] = scale * p.h() / n2;
    t.grad[3] = scale * -p.w() / n2;
  }
  return t;
}

double alpha_from(double iou_value, double v) {
  const double denom = (1.0 - iou_value) + v;
  return denom > 0.0 ? v / denom : 0.0;
}

}  // namespace

double iou_loss(const BoundingBox& pred, const BoundingBox& gt) {
  return iou_loss_grad(pred, gt).value;
}

double diou_loss(const BoundingBox& pred, const BoundingBox& gt) {
  return diou_loss_grad(pred, gt).value;
}

double ciou_loss(const BoundingBox& pred, const BoundingBox& gt) {
  return ciou_loss_grad(pred, gt).value;
}

LossValue iou_loss_grad(const BoundingBox& pred, const BoundingBox& gt) {
  require_gt(gt);
  const OverlapTerms o = overlap_terms(pred, gt);
  LossValue out;
  out.value = 1.0 - o.iou;
  for (int i = 0; i < 4; ++i) out.grad[i] = -o.d_iou[i];
  return out;
}

LossValue diou_loss_grad(const BoundingBox& pred, const BoundingBox& gt) {
  LossValue out = iou_loss_grad(pred, gt);
  const DistanceTerms d = distance_terms(pred, gt);
  out.value += d.value;
  for (int i = 0; i < 4; ++i) out.grad[i] += d.grad[i];
  return out;
}

LossValue ciou_loss_grad(const BoundingBox& pred, const BoundingBox& gt) {
  return ciou_loss_grad(pred, gt, ciou_alpha(pred, gt));
}

LossValue ciou_loss_grad(const BoundingBox& pred, const BoundingBox& gt, double alpha) {
  LossValue out = diou_loss_grad(pred, gt);
  const AspectTerms a = aspect_terms(pred, gt);
  out.value += alpha * a.v;
  for (int i = 0; i < 4; ++i) out.grad[i] += alpha * a.grad[i];
  return out;
}

double ciou_alpha(const BoundingBox& pred, const BoundingBox& gt) {
  require_gt(gt);
  return alpha_from(overlap_terms(pred, gt).iou, aspect_terms(pred, gt).v);
}

MaybeBox box_from_mask(const BinaryMask& m) {
  std::size_t x0 = m.width(), y0 = m.height(), x1 = 0, y1 = 0;
  bool any = false;
  for (std::size_t y = 0; y < m.height(); ++y) {
    for (std::size_t x = 0; x < m.width(); ++x) {
      if (!m.at(x, y)) continue;
      any = true;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (!any) return std::nullopt;
  return BoundingBox::from_corners(static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1 + 1),
                                   static_cast<double>(y1 + 1));
}

}  // namespace trackadapt
