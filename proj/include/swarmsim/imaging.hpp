#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace swarmsim {

// Row-major 8-bit raster, 1 (gray/depth) or 3 (RGB or HSV) channels.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;

  static ImageBuffer filled(int width, int height, int channels, std::uint8_t value);

  std::uint8_t at(int x, int y, int c = 0) const {
    return data[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return data[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
  bool valid() const {
    return width >= 1 && height >= 1 && (channels == 1 || channels == 3) &&
           data.size() == static_cast<std::size_t>(width) * height * channels;
  }
};

struct HsvTriple {
  std::uint8_t h = 0;  // [0, 180), half-degree scale
  std::uint8_t s = 0;
  std::uint8_t v = 0;
};

// Inclusive HSV box; no hue wraparound, lo <= hi per channel is enforced at
// construction.
class HsvBounds {
 public:
  HsvBounds(HsvTriple lo, HsvTriple hi);
  const HsvTriple& lo() const { return lo_; }
  const HsvTriple& hi() const { return hi_; }
  bool contains(std::uint8_t h, std::uint8_t s, std::uint8_t v) const {
    return h >= lo_.h && h <= hi_.h && s >= lo_.s && s <= hi_.s && v >= lo_.v && v <= hi_.v;
  }

 private:
  HsvTriple lo_;
  HsvTriple hi_;
};

// Per-pixel occupancy raster produced by masking.
struct BinaryMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1

  static BinaryMap empty(int width, int height);
  bool occupied(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool on) { bits[static_cast<std::size_t>(y) * width + x] = on ? 1 : 0; }
  std::size_t count() const;
};

struct PixelIndex {
  int x = 0;
  int y = 0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Circle {
  Point2 center;
  double radius = 0.0;
};

// One 8-connected blob. `contour` holds the pixels with at least one
// unoccupied 4-neighbor or lying on the image border (external boundary only;
// interior holes are ignored).
struct Component {
  std::vector<PixelIndex> pixels;
  std::vector<PixelIndex> contour;
  int area = 0;
};

struct PixelOffsets {
  double dx = 0.0;  // positive: object right of image center
  double dy = 0.0;  // positive: object below image center
  double dr = 0.0;  // positive: object smaller than the radius setpoint (too far)
};

enum class Morphology { erode, dilate };

// 5x5 separable binomial blur (1,4,6,4,1)^2/256, edge-replicated borders,
// rounded half away from zero.
ImageBuffer gaussian_blur_5x5(const ImageBuffer& img);

// H on the [0,180) half-degree scale, S and V in [0,255].
ImageBuffer rgb_to_hsv(const ImageBuffer& img);

BinaryMap apply_mask(const ImageBuffer& hsv, const HsvBounds& bounds);

// 3x3 square structuring element; out-of-bounds neighbors count unoccupied.
BinaryMap morphology(const BinaryMap& map, Morphology mode, int iterations);

// 8-connected components sorted by area descending, ties by smallest
// row-major top-left pixel.
std::vector<Component> find_external_components(const BinaryMap& map);

// Smallest circle containing all points (Welzl). Throws on empty input.
Circle min_enclosing_circle(std::span<const Point2> points);

PixelOffsets compute_offsets(const Circle& c, int image_width, int image_height,
                             double radius_setpoint);

// Binary PPM (P6) for 3-channel images, binary PGM (P5) for 1-channel, both
// maxval 255 with the header "P6\n<w> <h>\n255\n".
void write_image(const ImageBuffer& img, const std::filesystem::path& path);
ImageBuffer read_image(const std::filesystem::path& path);

}  // namespace swarmsim
