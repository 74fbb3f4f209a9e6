#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hodgelab/scalar.hpp"

namespace hodgelab {

// Complex Lie-algebra model: d on the (1,0) coframe w^1..w^n, split by type.
//   d(w^i) = sum_{j<k} a2[i][(j,k)] w^j^w^k + sum_{j,k} a11[i][(j,k)] w^j^conj(w^k)
// Indices are 0-based internally; there is never a (0,2) component.
struct StructureEquations {
    int n = 0;
    std::vector<std::string> names;
    using CoeffMap = std::map<std::pair<int, int>, ExactC>;
    std::vector<CoeffMap> a2;  // (2,0) coefficients, keys j < k
    std::vector<CoeffMap> a11; // (1,1) coefficients, any (j,k)

    static StructureEquations trivial(int n);
};

// Known models: torus(k), iwasawa, kodaira_thurston, heisenberg_sum,
// heisenberg_plus_abelian. "torus3" and "torus(3)" both work.
StructureEquations builtin_model(const std::string& name);

std::vector<std::string> builtin_model_names();

} // namespace hodgelab
