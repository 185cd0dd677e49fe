// Writes the reference problems as .msp.json files into a directory.
#include <iostream>
#include <string>

#include "msturm/fixtures.hpp"
#include "msturm/problem.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: msturm_fixtures <directory>\n";
    return 1;
  }
  const std::string dir = argv[1];
  namespace fx = msturm::fixtures;
  msturm::save(fx::exsimple(), dir + "/exsimple.msp.json");
  msturm::save(fx::excausal(), dir + "/excausal.msp.json");
  msturm::save(fx::excausal_interior(), dir + "/excausal_interior.msp.json");
  msturm::save(fx::null_focal_3d(1.0), dir + "/null_focal_3d.msp.json");
  for (double k : {0.5, 1.5, 2.0, 2.5})
    msturm::save(fx::harmonic(k), dir + "/" + fx::harmonic_name(k) + ".msp.json");
  return 0;
}
