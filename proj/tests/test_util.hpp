#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "foot_mesh.hpp"

namespace footsim::test {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("footsim_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Closed tetrahedron over four vertices with outward-agnostic winding.
inline FootMesh tetra_mesh(const std::vector<Vec3>& v, const std::vector<bool>& pinned) {
  FootMesh m;
  m.vertices = v;
  m.triangles = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {2, 0, 3}};
  m.edges = build_edges(m.vertices, m.triangles);
  m.pinned = pinned;
  m.radial_dir.assign(v.size(), Vec3::Zero());
  m.bbox_min = v.front();
  m.bbox_max = v.front();
  for (const auto& p : v) {
    m.bbox_min = m.bbox_min.cwiseMin(p);
    m.bbox_max = m.bbox_max.cwiseMax(p);
  }
  return m;
}

}  // namespace footsim::test
