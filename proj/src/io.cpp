#include "paritylab/io.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <stdexcept>

namespace parity {

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("open_out: cannot write " + path.string());
  return os;
}

Json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_json_file: cannot read " + path);
  return Json::parse(is);
}

void write_manifest(const std::string& dir, const std::string& experiment,
                    const Json& config_echo, std::uint64_t seed,
                    double wall_seconds) {
  Json m;
  m["experiment"] = experiment;
  m["seed"] = seed;
  m["config"] = config_echo;
  m["wall_seconds"] = wall_seconds;
  m["versions"]["compiler"] = __VERSION__;
  m["versions"]["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                           std::to_string(EIGEN_MAJOR_VERSION) + "." +
                           std::to_string(EIGEN_MINOR_VERSION);
  std::ofstream os = open_out(dir, "manifest.json");
  os << m.dump(2) << '\n';
}

}  // namespace parity
