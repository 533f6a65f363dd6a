#include "trackadapt/sim/motion_script.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "trackadapt/errors.hpp"

namespace trackadapt::sim {

std::string to_string(MotionType t) {
  switch (t) {
    case MotionType::linear: return "linear";
    case MotionType::sinusoid: return "sinusoid";
    case MotionType::reversal: return "reversal";
    case MotionType::ramp: return "ramp";
    case MotionType::turn: return "turn";
  }
  return "unknown";
}

MotionType parse_motion_type(const std::string& name) {
  if (name == "linear") return MotionType::linear;
  if (name == "sinusoid") return MotionType::sinusoid;
  if (name == "reversal") return MotionType::reversal;
  if (name == "ramp") return MotionType::ramp;
  if (name == "turn") return MotionType::turn;
  throw ConfigError("unknown motion type '" + name + "' (expected linear|sinusoid|reversal|ramp|turn)");
}

void MotionScript::validate() const {
  for (double v : {x0, y0, w0, h0, vx, vy, dw, dh, amplitude, period, phase, ax, ay, turn_rate}) {
    if (!std::isfinite(v)) throw ConfigError("motion parameters must be finite");
  }
  if (!(w0 > 0.0) || !(h0 > 0.0)) throw ConfigError("motion start size must be positive");
  if ((type == MotionType::sinusoid || type == MotionType::reversal) && !(period > 0.0)) {
    throw ConfigError(to_string(type) + " motion needs a positive period");
  }
}

std::vector<BoundingBox> render(const MotionScript& m, int frames) {
  m.validate();
  if (frames < 1) throw ConfigError("a trajectory needs at least one frame");
  std::vector<BoundingBox> out;
  out.reserve(static_cast<std::size_t>(frames));
  double px = m.x0, py = m.y0, vx = m.vx, vy = m.vy;
  const double speed = std::hypot(m.vx, m.vy);
  const double nx = speed > 0.0 ? -m.vy / speed : 0.0;
  const double ny = speed > 0.0 ? m.vx / speed : 1.0;
  const double c = std::cos(m.turn_rate), s = std::sin(m.turn_rate);
  for (int t = 0; t < frames; ++t) {
    const double td = static_cast<double>(t);
    double x = 0.0, y = 0.0;
    switch (m.type) {
      case MotionType::linear:
        x = m.x0 + m.vx * td;
        y = m.y0 + m.vy * td;
        break;
      case MotionType::sinusoid: {
        const double off = m.amplitude * (std::sin(2.0 * std::numbers::pi * td / m.period + m.phase) - std::sin(m.phase));
        x = m.x0 + m.vx * td + nx * off;
        y = m.y0 + m.vy * td + ny * off;
        break;
      }
      case MotionType::reversal:
        if (t > 0) {
          const long leg = static_cast<long>(std::floor((td - 1.0) / m.period));
          const double sign = leg % 2 == 0 ? 1.0 : -1.0;
          px += sign * m.vx;
          py += sign * m.vy;
        }
        x = px;
        y = py;
        break;
      case MotionType::ramp:
        x = m.x0 + m.vx * td + 0.5 * m.ax * td * td;
        y = m.y0 + m.vy * td + 0.5 * m.ay * td * td;
        break;
      case MotionType::turn:
        if (t > 0) {
          const double rx = c * vx - s * vy;
          const double ry = s * vx + c * vy;
          vx = rx;
          vy = ry;
          px += vx;
          py += vy;
        }
        x = px;
        y = py;
        break;
    }
    const double w = std::max(m.w0 + m.dw * td, 1.0);
    const double h = std::max(m.h0 + m.dh * td, 1.0);
    out.emplace_back(x, y, w, h);
  }
  return out;
}

bool inside(const std::vector<BoundingBox>& boxes, ImageSize image) {
  for (const auto& b : boxes) {
    if (b.left() < 0.0 || b.top() < 0.0 || b.right() > image.width || b.bottom() > image.height) return false;
  }
  return true;
}

MotionScript random_script(MotionType type, Rng& rng, ImageSize image, int frames) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    MotionScript m;
    m.type = type;
    m.w0 = rng.uniform(20.0, 56.0);
    m.h0 = m.w0 * rng.uniform(0.6, 1.6);
    m.x0 = rng.uniform(0.2, 0.8) * image.width;
    m.y0 = rng.uniform(0.2, 0.8) * image.height;
    const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double speed = rng.uniform(1.0, 5.0);
    switch (type) {
      case MotionType::linear: break;
      case MotionType::sinusoid:
        speed = rng.uniform(0.0, 3.0);
        m.amplitude = rng.uniform(15.0, 45.0);
        m.period = rng.uniform(16.0, 36.0);
        m.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        break;
      case MotionType::reversal:
        speed = rng.uniform(3.0, 7.0);
        m.period = std::floor(rng.uniform(5.0, 12.0));
        break;
      case MotionType::ramp: {
        // decelerate through zero speed and come back, so the path stays compact
        const double span = static_cast<double>(frames) / 100.0;
        const double acc = rng.uniform(0.06, 0.12) / (span * span);
        m.ax = acc * std::cos(heading + std::numbers::pi);
        m.ay = acc * std::sin(heading + std::numbers::pi);
        speed = acc * frames * rng.uniform(0.35, 0.65);
        break;
      }
      case MotionType::turn:
        speed = rng.uniform(3.0, 6.0);
        m.turn_rate = rng.uniform(0.08, 0.2) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        break;
    }
    m.vx = speed * std::cos(heading);
    m.vy = speed * std::sin(heading);
    if (type != MotionType::reversal) {
      const double scale = rng.uniform(-0.15, 0.15);
      m.dw = scale * m.w0 / frames;
      m.dh = scale * m.h0 / frames;
    }
    if (inside(render(m, frames), image)) return m;
  }
  throw ConfigError("could not fit a " + to_string(type) + " trajectory of " + std::to_string(frames) +
                    " frames inside the image");
}

std::vector<TrajectoryAnnotation> synthetic_corpus(CorpusKind kind, int count, int frames, std::uint64_t seed,
                                                   ImageSize image, const std::string& prefix) {
  static constexpr MotionType kNonlinear[] = {MotionType::sinusoid, MotionType::reversal, MotionType::ramp};
  std::vector<TrajectoryAnnotation> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(i));
    MotionType type = MotionType::linear;
    if (kind == CorpusKind::nonlinear) type = kNonlinear[i % 3];
    if (kind == CorpusKind::mixed && i % 2 == 1) type = kNonlinear[(i / 2) % 3];
    const MotionScript m = random_script(type, rng, image, frames);
    TrajectoryAnnotation t;
    char name[32];
    std::snprintf(name, sizeof name, "_%03d", i);
    t.id = prefix + name;
    t.image = image;
    for (const auto& b : render(m, frames)) t.frames.emplace_back(b);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace trackadapt::sim
