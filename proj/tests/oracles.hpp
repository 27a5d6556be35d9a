#pragma once

// Independent reference implementations used to check the production code.
// These stay deliberately naive (dense convolution, exhaustive candidate
// circles, double-precision formulas) and must not share code with the
// library paths they verify.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "swarmsim/imaging.hpp"

namespace oracles {

// Dense 5x5 convolution with the binomial kernel, replicated edges, rounding
// half away from zero.
inline swarmsim::ImageBuffer blur_reference(const swarmsim::ImageBuffer& img) {
  static const double kKernel[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  swarmsim::ImageBuffer out = swarmsim::ImageBuffer::filled(img.width, img.height, img.channels, 0);
  const auto clampi = [](int v, int n) { return v < 0 ? 0 : (v >= n ? n - 1 : v); };
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        double sum = 0.0;
        for (int ky = -2; ky <= 2; ++ky) {
          for (int kx = -2; kx <= 2; ++kx) {
            sum += kKernel[ky + 2] * kKernel[kx + 2] *
                   img.at(clampi(x + kx, img.width), clampi(y + ky, img.height), c);
          }
        }
        const double rounded = std::round(sum);
        out.at(x, y, c) = static_cast<std::uint8_t>(std::min(255.0, std::max(0.0, rounded)));
      }
    }
  }
  return out;
}

// Scalar double-precision RGB -> HSV with H on the [0,180) half-degree scale.
inline void hsv_reference(int r, int g, int b, int& h_out, int& s_out, int& v_out) {
  const int big = std::max({r, g, b});
  const int small = std::min({r, g, b});
  const int delta = big - small;
  v_out = big;
  s_out = big == 0 ? 0 : static_cast<int>(std::round(255.0 * delta / big));
  if (delta == 0) {
    h_out = 0;
    return;
  }
  double deg;
  if (big == r) {
    deg = std::fmod(60.0 * (g - b) / delta, 360.0);
    if (deg < 0.0) deg += 360.0;
  } else if (big == g) {
    deg = 60.0 * (b - r) / delta + 120.0;
  } else {
    deg = 60.0 * (r - g) / delta + 240.0;
  }
  h_out = static_cast<int>(std::round(deg / 2.0)) % 180;
}

// Exhaustive smallest enclosing circle: every 2-point diameter circle and
// every 3-point circumcircle is a candidate.
inline swarmsim::Circle mec_brute_force(const std::vector<swarmsim::Point2>& pts) {
  using swarmsim::Circle;
  using swarmsim::Point2;
  const double slack = 1e-9;
  const auto contains_all = [&](const Circle& c) {
    for (const Point2& p : pts) {
      const double dx = p.x - c.center.x;
      const double dy = p.y - c.center.y;
      if (std::sqrt(dx * dx + dy * dy) > c.radius + slack) return false;
    }
    return true;
  };

  Circle best{{pts[0].x, pts[0].y}, std::numeric_limits<double>::infinity()};
  if (pts.size() == 1) return {{pts[0].x, pts[0].y}, 0.0};

  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Circle c{{0.5 * (pts[i].x + pts[j].x), 0.5 * (pts[i].y + pts[j].y)},
                     0.5 * std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y)};
      if (c.radius < best.radius && contains_all(c)) best = c;
      for (std::size_t l = j + 1; l < pts.size(); ++l) {
        const Point2 &a = pts[i], &b = pts[j], &q = pts[l];
        const double d = 2.0 * (a.x * (b.y - q.y) + b.x * (q.y - a.y) + q.x * (a.y - b.y));
        if (std::abs(d) < 1e-12) continue;
        const double a2 = a.x * a.x + a.y * a.y;
        const double b2 = b.x * b.x + b.y * b.y;
        const double q2 = q.x * q.x + q.y * q.y;
        const Point2 center{(a2 * (b.y - q.y) + b2 * (q.y - a.y) + q2 * (a.y - b.y)) / d,
                            (a2 * (q.x - b.x) + b2 * (a.x - q.x) + q2 * (b.x - a.x)) / d};
        const Circle cc{center, std::hypot(a.x - center.x, a.y - center.y)};
        if (cc.radius < best.radius && contains_all(cc)) best = cc;
      }
    }
  }
  return best;
}

}  // namespace oracles
