#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "swarmsim/harness.hpp"

namespace {

using namespace swarmsim;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Scenario load_config(const std::string& path, int seed_override) {
  Scenario s = path.empty() ? load_scenario("{}") : load_scenario(read_file(path));
  if (seed_override >= 0) s.seed = static_cast<std::uint64_t>(seed_override);
  return s;
}

std::vector<double> parse_grid(const std::string& csv, const char* what) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": cannot parse \"" + item + "\" as a number");
    }
  }
  if (values.empty()) throw ConfigError(std::string(what) + ": empty grid");
  return values;
}

HsvBounds parse_bounds(const std::string& text) {
  // "40:75:20,80:255:255"
  const auto parse_triple = [](const std::string& t) {
    int v[3];
    if (std::sscanf(t.c_str(), "%d:%d:%d", &v[0], &v[1], &v[2]) != 3)
      throw ConfigError("--bounds: expected lo,hi as H:S:V,H:S:V");
    for (const int c : v)
      if (c < 0 || c > 255) throw ConfigError("--bounds: components must be in [0,255]");
    return HsvTriple{static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]),
                     static_cast<std::uint8_t>(v[2])};
  };
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("--bounds: expected lo,hi as H:S:V,H:S:V");
  try {
    return HsvBounds(parse_triple(text.substr(0, comma)), parse_triple(text.substr(comma + 1)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--bounds: ") + e.what());
  }
}

void append_json_field(std::string& out, const char* name, double v, bool last = false) {
  if (v == 0.0) v = 0.0;  // fold -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "  \"%s\": %.10g%s\n", name, v, last ? "" : ",");
  out += buf;
}

int run_imgproc(const std::string& in_path, const std::string& op, const std::string& bounds_arg,
                const std::string& out_path) {
  const ImageBuffer input = read_image(in_path);
  const HsvBounds bounds =
      bounds_arg.empty() ? HsvBounds({40, 75, 20}, {80, 255, 255}) : parse_bounds(bounds_arg);

  if (op == "blur") {
    write_image(gaussian_blur_5x5(input), out_path);
  } else if (op == "hsv") {
    write_image(rgb_to_hsv(input), out_path);
  } else if (op == "mask") {
    const BinaryMap mask = apply_mask(rgb_to_hsv(gaussian_blur_5x5(input)), bounds);
    ImageBuffer img = ImageBuffer::filled(mask.width, mask.height, 1, 0);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) img.data[i] = mask.bits[i] ? 255 : 0;
    write_image(img, out_path);
  } else if (op == "track") {
    TrackerConfig cfg;
    cfg.bounds = bounds;
    TrackerState states;
    const TrackResult result = track_frame(input, cfg, states, 1.0 / 30.0, 0.0);
    write_image(render_hud(input, result.hud), out_path);
    std::string json = "{\n";
    json += std::string("  \"locked\": ") + (result.hud.target_locked ? "true" : "false") + ",\n";
    if (result.hud.circle) {
      append_json_field(json, "circle_x", result.hud.circle->center.x);
      append_json_field(json, "circle_y", result.hud.circle->center.y);
      append_json_field(json, "circle_radius", result.hud.circle->radius);
    }
    if (result.hud.offset_vector) {
      append_json_field(json, "dx", result.hud.offset_vector->dx);
      append_json_field(json, "dy", result.hud.offset_vector->dy);
    }
    append_json_field(json, "forward", result.command.forward);
    append_json_field(json, "lateral", result.command.lateral);
    append_json_field(json, "vertical", result.command.vertical);
    append_json_field(json, "yaw_rate", result.command.yaw_rate, true);
    json += "}\n";
    std::cout << json;
  } else {
    throw ConfigError("--op must be one of blur|hsv|mask|track");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic leader-follower drone swarm simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int seed = -1;
  bool dump_frames = false;

  CLI::App* run = app.add_subcommand("run", "Run one scenario and write metrics");
  run->add_option("--config", config_path, "Scenario JSON (defaults when omitted)");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--dump-frames", dump_frames, "Write per-tick PPM/PGM frames");

  std::string loss_grid = "0";
  std::string latency_grid = "0";
  CLI::App* compare = app.add_subcommand("compare", "Sweep both architectures over a channel grid");
  compare->add_option("--config", config_path, "Scenario JSON (defaults when omitted)");
  compare->add_option("--loss-grid", loss_grid, "Comma-separated loss probabilities");
  compare->add_option("--latency-grid", latency_grid, "Comma-separated latencies, seconds");
  compare->add_option("--seed", seed, "Override the scenario seed");
  compare->add_option("--out", out_dir, "Output directory")->required();

  std::string in_path;
  std::string op;
  std::string bounds;
  std::string out_path;
  CLI::App* imgproc = app.add_subcommand("imgproc", "Single-frame pipeline debugging");
  imgproc->add_option("--in", in_path, "Input PPM frame")->required();
  imgproc->add_option("--op", op, "blur|hsv|mask|track")->required();
  imgproc->add_option("--bounds", bounds, "HSV bounds as H:S:V,H:S:V");
  imgproc->add_option("--out", out_path, "Output image path")->required();

  try {
    app.parse(argc, argv);

    if (run->parsed()) {
      const swarmsim::Scenario s = load_config(config_path, seed);
      swarmsim::RunOptions options;
      if (dump_frames) options.frame_dir = std::filesystem::path(out_dir) / "frames";
      const swarmsim::RunResult result = swarmsim::run_scenario(s, options);
      swarmsim::write_outputs(result, out_dir);
      std::cout << "wrote " << (std::filesystem::path(out_dir) / "metrics.csv").string() << " ("
                << result.metrics.size() << " rows)\n";
    } else if (compare->parsed()) {
      const swarmsim::Scenario s = load_config(config_path, seed);
      const auto losses = parse_grid(loss_grid, "--loss-grid");
      const auto latencies = parse_grid(latency_grid, "--latency-grid");
      const auto rows = swarmsim::compare_architectures(s, losses, latencies);
      std::filesystem::create_directories(out_dir);
      const auto report_path = std::filesystem::path(out_dir) / "report.csv";
      std::ofstream out(report_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open " + report_path.string());
      out << swarmsim::report_to_csv(rows);
      std::cout << "wrote " << report_path.string() << " (" << rows.size() << " rows)\n";
    } else if (imgproc->parsed()) {
      return run_imgproc(in_path, op, bounds, out_path);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const swarmsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
