// Prints the volume product of the cube and of a slightly cut cube in
// dimensions 2 and 3, using exact rational arithmetic.

#include <iostream>

#include "mahler/polytope.hpp"

int main() {
  using mahler::Rational;
  using mahler::VPolytope;
  using mahler::operator-;
  for (int n = 2; n <= 3; ++n) {
    const auto cube = VPolytope<Rational>::cube(n);
    std::cout << "n = " << n << "\n";
    std::cout << "  vol(cube)            = " << mahler::volume(cube) << "\n";
    std::cout << "  vol(cross-polytope)  = " << mahler::volume(cube.polar()) << "\n";

    std::vector<mahler::Vector<Rational>> normals;
    for (int j = 0; j < n; ++j) {
      normals.push_back(mahler::unit_vector<Rational>(n, j));
      normals.push_back(-mahler::unit_vector<Rational>(n, j));
    }
    mahler::Vector<Rational> cut(n, Rational(100, 99 * n));
    normals.push_back(cut);
    normals.push_back(-cut);
    const auto cut_cube = mahler::vertices_from_halfspaces(mahler::HPolytope<Rational>(n, normals));
    std::cout << "  P(cube)              = " << mahler::volume_product(cube) << "\n";
    std::cout << "  P(cut cube)          = " << mahler::volume_product(cut_cube) << "\n";
  }
}
