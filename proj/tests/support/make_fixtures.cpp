// Regenerates the bundled fixtures: make_fixtures <out_dir>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "iriscs/imagekit.hpp"
#include "synthetic.hpp"

using namespace iriscs;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: make_fixtures <out_dir>\n");
    return 1;
  }
  const std::filesystem::path out = argv[1];
  std::filesystem::create_directories(out);

  std::ofstream manifest(out / "manifest.txt");
  manifest << "# path<TAB>label\n";
  for (int s = 1; s <= 3; ++s) {
    testing::TexturedEyeSpec t;
    t.seed = static_cast<std::uint64_t>(s);
    t.eye.pupil = {62.0 + s, 65.0 - s, 14.0 + 2 * s};
    t.eye.iris = {63.0 + s, 64.0, 44.0 + s};
    t.eye.pupil_level = 25;
    t.eye.iris_level = 115;
    t.eye.sclera_level = 195;
    const std::string name = "eye" + std::to_string(s) + ".pgm";
    imagekit::save_image(testing::textured_eye(t), out / name);
    manifest << name << "\teye" << s << "\n";
  }

  imagekit::save_image(testing::synthetic_eye({}), out / "synthetic_eye.pgm");

  // The fixtures carry no eyelids, so the whole iris contour is usable.
  std::ofstream ini(out / "experiment.ini");
  ini << "# Fixture experiment: three textured eyes, both domains, 10-40%.\n"
         "[experiment]\n"
         "manifest = manifest.txt\n"
         "fractions = 0.1,0.2,0.3,0.4\n"
         "domains = dct,dft\n"
         "base_seed = 20190101\n"
         "output_dir = results\n"
         "\n"
         "[solver]\n"
         "mode = tv_domain\n"
         "\n"
         "[iris]\n"
         "exclusion_arcs_deg = none\n";
  return 0;
}
