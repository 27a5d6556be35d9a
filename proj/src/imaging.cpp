#include "swarmsim/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "swarmsim/rng.hpp"

namespace swarmsim {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

inline int clamp_index(int v, int n) { return v < 0 ? 0 : (v >= n ? n - 1 : v); }

}  // namespace

ImageBuffer ImageBuffer::filled(int width, int height, int channels, std::uint8_t value) {
  ImageBuffer img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.data.assign(static_cast<std::size_t>(width) * height * channels, value);
  return img;
}

HsvBounds::HsvBounds(HsvTriple lo, HsvTriple hi) : lo_(lo), hi_(hi) {
  require(lo.h < 180 && hi.h < 180, "hsv bounds: hue must be below 180");
  require(lo.h <= hi.h, "hsv bounds: lo.h > hi.h (hue wraparound unsupported)");
  require(lo.s <= hi.s, "hsv bounds: lo.s > hi.s");
  require(lo.v <= hi.v, "hsv bounds: lo.v > hi.v");
}

BinaryMap BinaryMap::empty(int width, int height) {
  BinaryMap map;
  map.width = width;
  map.height = height;
  map.bits.assign(static_cast<std::size_t>(width) * height, 0);
  return map;
}

std::size_t BinaryMap::count() const {
  return static_cast<std::size_t>(std::accumulate(bits.begin(), bits.end(), std::size_t{0}));
}

ImageBuffer gaussian_blur_5x5(const ImageBuffer& img) {
  require(img.valid(), "gaussian_blur_5x5: invalid image");

  const int w = img.width;
  const int h = img.height;
  const int ch = img.channels;
  const int stride = w * ch;

  // Horizontal pass; row sums fit in 16 bits (255 * 16).
  std::vector<std::uint16_t> tmp(static_cast<std::size_t>(h) * stride);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* src = img.data.data() + static_cast<std::size_t>(y) * stride;
    std::uint16_t* dst = tmp.data() + static_cast<std::size_t>(y) * stride;
    for (int x = 0; x < w; ++x) {
      const bool interior = x >= 2 && x < w - 2;
      for (int c = 0; c < ch; ++c) {
        const int i = x * ch + c;
        std::uint32_t sum;
        if (interior) {
          sum = src[i - 2 * ch] + 4u * src[i - ch] + 6u * src[i] + 4u * src[i + ch] +
                src[i + 2 * ch];
        } else {
          sum = static_cast<std::uint32_t>(src[clamp_index(x - 2, w) * ch + c]) +
                4u * src[clamp_index(x - 1, w) * ch + c] + 6u * src[i] +
                4u * src[clamp_index(x + 1, w) * ch + c] + src[clamp_index(x + 2, w) * ch + c];
        }
        dst[i] = static_cast<std::uint16_t>(sum);
      }
    }
  }

  ImageBuffer out = ImageBuffer::filled(w, h, ch, 0);
  for (int y = 0; y < h; ++y) {
    const std::uint16_t* r0 = tmp.data() + static_cast<std::size_t>(clamp_index(y - 2, h)) * stride;
    const std::uint16_t* r1 = tmp.data() + static_cast<std::size_t>(clamp_index(y - 1, h)) * stride;
    const std::uint16_t* r2 = tmp.data() + static_cast<std::size_t>(y) * stride;
    const std::uint16_t* r3 = tmp.data() + static_cast<std::size_t>(clamp_index(y + 1, h)) * stride;
    const std::uint16_t* r4 = tmp.data() + static_cast<std::size_t>(clamp_index(y + 2, h)) * stride;
    std::uint8_t* dst = out.data.data() + static_cast<std::size_t>(y) * stride;
    for (int i = 0; i < stride; ++i) {
      const std::uint32_t sum = r0[i] + 4u * r1[i] + 6u * r2[i] + 4u * r3[i] + r4[i];
      // Exact round-half-away-from-zero of sum/256 for non-negative sums.
      dst[i] = static_cast<std::uint8_t>((sum + 128) >> 8);
    }
  }
  return out;
}

ImageBuffer rgb_to_hsv(const ImageBuffer& img) {
  require(img.valid() && img.channels == 3, "rgb_to_hsv: 3-channel image required");
  ImageBuffer out = ImageBuffer::filled(img.width, img.height, 3, 0);
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  for (std::size_t i = 0; i < n; ++i) {
    const int r = img.data[i * 3 + 0];
    const int g = img.data[i * 3 + 1];
    const int b = img.data[i * 3 + 2];
    const int big = std::max({r, g, b});
    const int small = std::min({r, g, b});
    const int delta = big - small;

    const int v = big;
    // round(255 * delta / big), half away from zero, in exact integer math.
    const int s = big == 0 ? 0 : (510 * delta + big) / (2 * big);

    int hue = 0;
    if (delta != 0) {
      // n2 / delta equals half the hue angle in degrees, kept non-negative.
      long n2 = 0;
      if (big == r) {
        n2 = 30L * (g - b);
        if (n2 < 0) n2 += 180L * delta;
      } else if (big == g) {
        n2 = 60L * delta + 30L * (b - r);
      } else {
        n2 = 120L * delta + 30L * (r - g);
      }
      hue = static_cast<int>(((2 * n2 + delta) / (2 * delta)) % 180);
    }

    out.data[i * 3 + 0] = static_cast<std::uint8_t>(hue);
    out.data[i * 3 + 1] = static_cast<std::uint8_t>(s);
    out.data[i * 3 + 2] = static_cast<std::uint8_t>(v);
  }
  return out;
}

BinaryMap apply_mask(const ImageBuffer& hsv, const HsvBounds& bounds) {
  require(hsv.valid() && hsv.channels == 3, "apply_mask: 3-channel image required");
  BinaryMap map = BinaryMap::empty(hsv.width, hsv.height);
  const std::size_t n = static_cast<std::size_t>(hsv.width) * hsv.height;
  for (std::size_t i = 0; i < n; ++i) {
    map.bits[i] =
        bounds.contains(hsv.data[i * 3 + 0], hsv.data[i * 3 + 1], hsv.data[i * 3 + 2]) ? 1 : 0;
  }
  return map;
}

namespace {

// The 3x3 square element separates into a horizontal and a vertical pass.
// Out-of-bounds neighbors count as unoccupied, so border taps contribute 0 to
// a dilation and kill an erosion.
void morph_pass_h(const std::vector<std::uint8_t>& in, std::vector<std::uint8_t>& out, int w,
                  int h, bool erode) {
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* r = in.data() + static_cast<std::size_t>(y) * w;
    std::uint8_t* o = out.data() + static_cast<std::size_t>(y) * w;
    if (erode) {
      o[0] = 0;
      for (int x = 1; x < w - 1; ++x) o[x] = r[x - 1] & r[x] & r[x + 1];
      if (w > 1) o[w - 1] = 0;
    } else {
      o[0] = w > 1 ? (r[0] | r[1]) : r[0];
      for (int x = 1; x < w - 1; ++x) o[x] = r[x - 1] | r[x] | r[x + 1];
      if (w > 1) o[w - 1] = r[w - 2] | r[w - 1];
    }
  }
}

void morph_pass_v(const std::vector<std::uint8_t>& in, std::vector<std::uint8_t>& out, int w,
                  int h, bool erode) {
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* up = y > 0 ? in.data() + static_cast<std::size_t>(y - 1) * w : nullptr;
    const std::uint8_t* mid = in.data() + static_cast<std::size_t>(y) * w;
    const std::uint8_t* dn = y < h - 1 ? in.data() + static_cast<std::size_t>(y + 1) * w : nullptr;
    std::uint8_t* o = out.data() + static_cast<std::size_t>(y) * w;
    if (erode) {
      if (!up || !dn) {
        std::fill(o, o + w, std::uint8_t{0});
      } else {
        for (int x = 0; x < w; ++x) o[x] = up[x] & mid[x] & dn[x];
      }
    } else {
      for (int x = 0; x < w; ++x) {
        std::uint8_t v = mid[x];
        if (up) v |= up[x];
        if (dn) v |= dn[x];
        o[x] = v;
      }
    }
  }
}

}  // namespace

BinaryMap morphology(const BinaryMap& map, Morphology mode, int iterations) {
  require(iterations >= 1, "morphology: iterations must be >= 1");
  const int w = map.width;
  const int h = map.height;
  const bool erode = mode == Morphology::erode;
  BinaryMap cur = map;
  BinaryMap scratch = BinaryMap::empty(w, h);
  BinaryMap result = BinaryMap::empty(w, h);
  for (int it = 0; it < iterations; ++it) {
    morph_pass_h(cur.bits, scratch.bits, w, h, erode);
    morph_pass_v(scratch.bits, result.bits, w, h, erode);
    std::swap(cur, result);
  }
  return cur;
}

std::vector<Component> find_external_components(const BinaryMap& map) {
  const int w = map.width;
  const int h = map.height;
  std::vector<std::int32_t> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<Component> components;
  std::vector<std::int32_t> stack;

  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const std::int32_t start = y0 * w + x0;
      if (!map.bits[start] || label[start] >= 0) continue;

      const auto id = static_cast<std::int32_t>(components.size());
      components.emplace_back();
      Component& comp = components.back();
      stack.clear();
      stack.push_back(start);
      label[start] = id;
      while (!stack.empty()) {
        const std::int32_t idx = stack.back();
        stack.pop_back();
        const int x = idx % w;
        const int y = idx / w;
        comp.pixels.push_back({x, y});
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int xx = x + dx;
            const int yy = y + dy;
            if (xx < 0 || xx >= w || yy < 0 || yy >= h) continue;
            const std::int32_t nidx = yy * w + xx;
            if (map.bits[nidx] && label[nidx] < 0) {
              label[nidx] = id;
              stack.push_back(nidx);
            }
          }
        }
      }
      comp.area = static_cast<int>(comp.pixels.size());
      // Flood fill order is stack-driven; canonicalize for deterministic output.
      std::sort(comp.pixels.begin(), comp.pixels.end(), [w](PixelIndex a, PixelIndex b) {
        return a.y * w + a.x < b.y * w + b.x;
      });
      for (const PixelIndex p : comp.pixels) {
        const bool border = p.x == 0 || p.x == w - 1 || p.y == 0 || p.y == h - 1;
        const bool exposed = border || !map.occupied(p.x - 1, p.y) || !map.occupied(p.x + 1, p.y) ||
                             !map.occupied(p.x, p.y - 1) || !map.occupied(p.x, p.y + 1);
        if (exposed) comp.contour.push_back(p);
      }
    }
  }

  std::sort(components.begin(), components.end(), [w](const Component& a, const Component& b) {
    if (a.area != b.area) return a.area > b.area;
    const auto key = [w](const Component& c) { return c.pixels.front().y * w + c.pixels.front().x; };
    return key(a) < key(b);
  });
  return components;
}

namespace {

bool circle_contains(const Circle& c, const Point2& p, double slack) {
  const double dx = p.x - c.center.x;
  const double dy = p.y - c.center.y;
  return dx * dx + dy * dy <= (c.radius + slack) * (c.radius + slack);
}

Circle circle_from_two(const Point2& a, const Point2& b) {
  const Point2 center{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  const double r = 0.5 * std::hypot(a.x - b.x, a.y - b.y);
  return {center, r};
}

Circle circle_from_three(const Point2& a, const Point2& b, const Point2& c) {
  const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  if (std::abs(d) < 1e-12) {
    // Degenerate (collinear): the widest pair bounds all three.
    Circle best = circle_from_two(a, b);
    const Circle ac = circle_from_two(a, c);
    const Circle bc = circle_from_two(b, c);
    if (ac.radius > best.radius) best = ac;
    if (bc.radius > best.radius) best = bc;
    return best;
  }
  const double a2 = a.x * a.x + a.y * a.y;
  const double b2 = b.x * b.x + b.y * b.y;
  const double c2 = c.x * c.x + c.y * c.y;
  const Point2 center{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
                      (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
  return {center, std::hypot(a.x - center.x, a.y - center.y)};
}

constexpr double kCircleSlack = 1e-10;

}  // namespace

Circle min_enclosing_circle(std::span<const Point2> points) {
  require(!points.empty(), "min_enclosing_circle: empty point set");

  std::vector<Point2> pts(points.begin(), points.end());
  // Fixed-seed shuffle keeps the expected-linear behavior and the output
  // deterministic for a given input.
  Rng rng(0x8badf00d5eedull);
  for (std::size_t i = pts.size() - 1; i > 0; --i) {
    const std::size_t j = rng.next_u64() % (i + 1);
    std::swap(pts[i], pts[j]);
  }

  Circle c{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (circle_contains(c, pts[i], kCircleSlack)) continue;
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (circle_contains(c, pts[j], kCircleSlack)) continue;
      c = circle_from_two(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (!circle_contains(c, pts[k], kCircleSlack)) {
          c = circle_from_three(pts[i], pts[j], pts[k]);
        }
      }
    }
  }

  // Guarantee containment against accumulated rounding.
  double max_sq = 0.0;
  for (const Point2& p : pts) {
    const double dx = p.x - c.center.x;
    const double dy = p.y - c.center.y;
    max_sq = std::max(max_sq, dx * dx + dy * dy);
  }
  c.radius = std::max(c.radius, std::sqrt(max_sq));
  return c;
}

PixelOffsets compute_offsets(const Circle& c, int image_width, int image_height,
                             double radius_setpoint) {
  PixelOffsets off;
  off.dx = c.center.x - image_width / 2.0;
  off.dy = c.center.y - image_height / 2.0;
  off.dr = radius_setpoint - c.radius;
  return off;
}

void write_image(const ImageBuffer& img, const std::filesystem::path& path) {
  require(img.valid(), "write_image: invalid image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_image: cannot open " + path.string());
  out << (img.channels == 3 ? "P6" : "P5") << "\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
  if (!out) throw std::runtime_error("write_image: short write to " + path.string());
}

namespace {

int next_pnm_int(std::istream& in, const std::filesystem::path& path) {
  // Skip whitespace and '#' comments between header fields.
  int ch = in.get();
  while (ch != EOF && (std::isspace(ch) || ch == '#')) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    }
    ch = in.get();
  }
  int value = -1;
  while (ch != EOF && std::isdigit(ch)) {
    if (value < 0) value = 0;
    value = value * 10 + (ch - '0');
    ch = in.get();
  }
  if (value < 0) throw std::runtime_error("read_image: malformed header in " + path.string());
  return value;
}

}  // namespace

ImageBuffer read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_image: cannot open " + path.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  int channels = 0;
  if (magic[0] == 'P' && magic[1] == '6') {
    channels = 3;
  } else if (magic[0] == 'P' && magic[1] == '5') {
    channels = 1;
  } else {
    throw std::runtime_error("read_image: not a binary PPM/PGM: " + path.string());
  }
  const int w = next_pnm_int(in, path);
  const int h = next_pnm_int(in, path);
  const int maxval = next_pnm_int(in, path);
  if (w < 1 || h < 1 || maxval != 255)
    throw std::runtime_error("read_image: unsupported dimensions/maxval in " + path.string());
  ImageBuffer img = ImageBuffer::filled(w, h, channels, 0);
  in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.data.size()))
    throw std::runtime_error("read_image: truncated pixel data in " + path.string());
  return img;
}

}  // namespace swarmsim
