// Regenerates the shipped motion data: synthetic walking and standing
// keypoints from the built-in skeleton, and the skeleton description.
#include <cstdio>
#include <filesystem>
#include <string>

#include "error.hpp"
#include "gait_synth.hpp"
#include "text.hpp"

using namespace footsim;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <data-dir>\n", argv[0]);
    return 2;
  }
  const std::filesystem::path dir(argv[1]);
  try {
    const SkeletonModel model = default_skeleton();
    const FootMesh right = generate_foot_mesh(MeshGenSpec{});
    const WalkPattern walk;
    const StandPattern stand;
    const auto w = synthesize_walk(model, right, walk);
    const auto s = synthesize_stand(model, stand);
    text::write_file((dir / "walk_keypoints.csv").string(),
                     keypoints_to_csv(w.keypoints, {"synthetic level walk, " + text::fmt(walk.speed) + " m/s, stride " +
                                                    text::fmt(walk.stride_period) + " s"}));
    text::write_file((dir / "stand_keypoints.csv").string(),
                     keypoints_to_csv(s.keypoints, {"synthetic quiet standing"}));
    text::write_file((dir / "skeleton.cfg").string(), skeleton_to_text(model));
    std::fprintf(stderr, "walk: %zu frames, worst foot placement error %.2e m\n", w.keypoints.frame_count(),
                 w.max_foot_error);
    std::fprintf(stderr, "stand: %zu frames\n", s.keypoints.frame_count());
  } catch (const Error& e) {
    std::fprintf(stderr, "synth_data: %s\n", e.what());
    return 2;
  }
  return 0;
}
