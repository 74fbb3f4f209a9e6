#include "hodgelab/structure.hpp"

#include <cctype>

#include "hodgelab/error.hpp"

namespace hodgelab {

StructureEquations StructureEquations::trivial(int n) {
    StructureEquations eq;
    eq.n = n;
    for (int i = 1; i <= n; ++i) eq.names.push_back("w" + std::to_string(i));
    eq.a2.resize(n);
    eq.a11.resize(n);
    return eq;
}

std::vector<std::string> builtin_model_names() {
    return {"torus(n)", "iwasawa", "kodaira_thurston", "heisenberg_sum",
            "heisenberg_plus_abelian"};
}

StructureEquations builtin_model(const std::string& name) {
    if (name.rfind("torus", 0) == 0) {
        std::string rest = name.substr(5);
        if (!rest.empty() && rest.front() == '(' && rest.back() == ')')
            rest = rest.substr(1, rest.size() - 2);
        bool ok = !rest.empty();
        for (char c : rest)
            if (!std::isdigit((unsigned char)c)) ok = false;
        int k = ok ? std::stoi(rest) : 0;
        if (!ok || k < 1 || k > 8)
            throw input_error("bad torus dimension in model name '" + name + "'");
        return StructureEquations::trivial(k);
    }
    if (name == "iwasawa") {
        auto eq = StructureEquations::trivial(3);
        eq.a2[2][{0, 1}] = ExactC(-1); // d(w3) = -w1^w2
        return eq;
    }
    if (name == "kodaira_thurston") {
        auto eq = StructureEquations::trivial(2);
        eq.a11[1][{0, 0}] = ExactC(1); // d(w2) = w1^conj(w1)
        return eq;
    }
    if (name == "heisenberg_sum") {
        auto eq = StructureEquations::trivial(6);
        eq.a2[2][{0, 1}] = ExactC(-1); // d(w3) = -w1^w2
        eq.a2[5][{3, 4}] = ExactC(-1); // d(w6) = -w4^w5
        return eq;
    }
    if (name == "heisenberg_plus_abelian") {
        auto eq = StructureEquations::trivial(4);
        eq.a2[2][{0, 1}] = ExactC(-1); // d(w3) = -w1^w2, w4 closed
        return eq;
    }
    std::string msg = "unknown model '" + name + "'; available:";
    for (const auto& m : builtin_model_names()) msg += " " + m;
    throw input_error(msg);
}

} // namespace hodgelab
