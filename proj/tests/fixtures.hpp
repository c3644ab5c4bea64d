// Small complexes with known structure, shared by the unit and acceptance tests.
#pragma once

#include <random>
#include <vector>

#include "hodgeflow/complex.hpp"

namespace fixtures {

using hodgeflow::Edge;
using hodgeflow::OrientedComplex;
using hodgeflow::Vector;

// Filled triangle on {0,1,2}. Edges (0,1), (0,2), (1,2).
inline OrientedComplex k3() { return hodgeflow::build_clique_complex(3, {{0, 1}, {0, 2}, {1, 2}}); }

// Path 0-1-2-3.
inline OrientedComplex path4() {
  return hodgeflow::build_clique_complex(4, {{0, 1}, {1, 2}, {2, 3}});
}

// Hollow square 0-1-2-3-0. Edges (0,1), (1,2), (2,3), (0,3).
inline OrientedComplex cycle4() {
  return hodgeflow::build_clique_complex(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
}

// Two triangles {0,1,2} and {1,2,3} sharing edge (1,2).
inline OrientedComplex bowtie() {
  return hodgeflow::build_clique_complex(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}});
}

// Square 0-1-2-3 and square 5-6-7-8, joined by the path 3-4-5. The first four
// edges form cycle A, the last four cycle B.
inline OrientedComplex two_cycles() {
  return hodgeflow::build_clique_complex(9, {{0, 1}, {1, 2}, {2, 3}, {0, 3},
                                             {3, 4}, {4, 5},
                                             {5, 6}, {6, 7}, {7, 8}, {5, 8}});
}

inline Vector random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

}  // namespace fixtures
